//! Fans, fan moves, covering families, fan-extension closures, cores and
//! wheel gluing by generalized parallel connection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Field, Scalar};
use crate::catalog::{wheel, CatalogError};
use crate::fragility::{
    coextension_candidates_where, extension_candidates_where, fresh_label, ClassId, FragilityError,
};
use crate::iso::{are_isomorphic_fixing, fingerprint, is_isomorphic, Fingerprint};
use crate::linalg::{normalize, nullspace, span_intersection, Matrix};
use crate::matroid::{bit, ElementSet, LinearMatroid, Mask, MatroidError, RankTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("{0} is not a fan")]
    InvalidFan(String),
    #[error("fans {0} and {1} are not disjoint")]
    OverlappingFans(usize, usize),
    #[error("({0}) is not a triangle")]
    NotATriangle(String),
    #[error("fan {fan}: closure point {point} spans dimension {dim}, expected 1")]
    ClosurePoint { fan: usize, point: &'static str, dim: usize },
    #[error("fan {fan}: closure point {point} has inconsistent coordinate supports")]
    InconsistentSupport { fan: usize, point: &'static str },
    #[error("element {0} is parallel to closure points of two fans")]
    ParallelOverlap(String),
    #[error("label {0} already in use")]
    LabelClash(String),
    #[error("invalid gluing: {0}")]
    GlueSpec(String),
    #[error("element correspondence invalid: {0}")]
    Correspondence(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Fragility(#[from] FragilityError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// An ordered fan. With a leading triangle the elements at even (0-based)
/// positions are spokes; with a leading triad they are rims.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fan {
    pub elements: Vec<String>,
    pub first_is_triangle: bool,
}

impl Fan {
    pub fn new(elements: Vec<String>, first_is_triangle: bool) -> Self {
        Fan { elements, first_is_triangle }
    }

    pub fn from_labels(labels: &[&str], first_is_triangle: bool) -> Self {
        Fan::new(labels.iter().map(|s| s.to_string()).collect(), first_is_triangle)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_spoke(&self, i: usize) -> bool {
        (i % 2 == 0) == self.first_is_triangle
    }

    pub fn spokes(&self) -> Vec<&str> {
        (0..self.len()).filter(|&i| self.is_spoke(i)).map(|i| self.elements[i].as_str()).collect()
    }

    pub fn rims(&self) -> Vec<&str> {
        (0..self.len()).filter(|&i| !self.is_spoke(i)).map(|i| self.elements[i].as_str()).collect()
    }

    pub fn reversed(&self) -> Fan {
        let n = self.len();
        let last_role_spoke = self.is_spoke(n - 1);
        Fan { elements: self.elements.iter().rev().cloned().collect(), first_is_triangle: last_role_spoke }
    }

    pub fn set(&self) -> ElementSet {
        self.elements.iter().collect()
    }

    /// `self` is a (not necessarily contiguous) subsequence of `g` or of its
    /// reversal.
    pub fn is_consistent_with(&self, g: &Fan) -> bool {
        let sub = |seq: &mut dyn Iterator<Item = &String>| {
            let mut it = self.elements.iter().peekable();
            for x in seq {
                if it.peek() == Some(&x) {
                    it.next();
                }
            }
            it.peek().is_none()
        };
        sub(&mut g.elements.iter()) || sub(&mut g.elements.iter().rev())
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.elements.join(","))
    }
}

fn mask_of(seq: &[usize]) -> Mask {
    seq.iter().fold(0, |a, &i| a | bit(i))
}

fn indices<S: Scalar>(m: &LinearMatroid<S>, fan: &Fan) -> Result<Vec<usize>, MatroidError> {
    fan.elements.iter().map(|l| m.index_of(l)).collect()
}

/// Checks the fan property with individual rank evaluations, so candidate
/// matroids are rejected without building their rank tables.
pub fn is_fan<S: Scalar>(m: &LinearMatroid<S>, fan: &Fan) -> bool {
    let Ok(seq) = indices(m, fan) else {
        return false;
    };
    if seq.len() < 3 || mask_of(&seq).count_ones() as usize != seq.len() {
        return false;
    }
    let ground: Mask = if m.size() == 32 { !0 } else { bit(m.size()) - 1 };
    let r = m.rank();
    let triangle =
        |t: Mask| m.rank_of_mask(t) == 2 && crate::matroid::mask_elements(t).all(|e| m.rank_of_mask(t & !bit(e)) == 2);
    let triad = |t: Mask| {
        let rest = ground & !t;
        r >= 1
            && m.rank_of_mask(rest) == r - 1
            && crate::matroid::mask_elements(t).all(|e| m.rank_of_mask(rest | bit(e)) == r)
    };
    (0..seq.len() - 2).all(|j| {
        let t = mask_of(&seq[j..j + 3]);
        if (j % 2 == 0) == fan.first_is_triangle {
            triangle(t)
        } else {
            triad(t)
        }
    })
}

fn reverse_flag(len: usize, first_is_triangle: bool) -> bool {
    // the role of the last element becomes the role of the first
    ((len - 1) % 2 == 0) == first_is_triangle
}

fn canonical_orientation(seq: Vec<usize>, flag: bool) -> (Vec<usize>, bool) {
    let rev: Vec<usize> = seq.iter().rev().copied().collect();
    let rflag = reverse_flag(seq.len(), flag);
    if rev < seq {
        (rev, rflag)
    } else {
        (seq, flag)
    }
}

fn extends_right(t: &RankTable, seq: &[usize], flag: bool) -> Vec<usize> {
    let n = seq.len();
    let triangle = ((n - 2) % 2 == 0) == flag;
    let used = mask_of(seq);
    (0..t.len())
        .filter(|&w| {
            if used & bit(w) != 0 {
                return false;
            }
            let m = bit(seq[n - 2]) | bit(seq[n - 1]) | bit(w);
            if triangle {
                t.is_triangle(m)
            } else {
                t.is_triad(m)
            }
        })
        .collect()
}

/// Every fan of length at least 3, each once up to reversal.
fn all_fans_idx(t: &RankTable) -> Vec<(Vec<usize>, bool)> {
    let mut out: BTreeSet<(Vec<usize>, bool)> = BTreeSet::new();
    let mut starts: Vec<(Mask, bool)> = t.triangles().into_iter().map(|m| (m, true)).collect();
    starts.extend(t.triads().into_iter().map(|m| (m, false)));
    fn dfs(t: &RankTable, seq: &mut Vec<usize>, flag: bool, out: &mut BTreeSet<(Vec<usize>, bool)>) {
        if !out.insert(canonical_orientation(seq.clone(), flag)) && seq.len() > 3 {
            // already explored from this orientation or its reverse
        }
        for w in extends_right(t, seq, flag) {
            seq.push(w);
            dfs(t, seq, flag, out);
            seq.pop();
        }
    }
    for (m, flag) in starts {
        let e: Vec<usize> = crate::matroid::mask_elements(m).collect();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut seq = vec![e[perm[0]], e[perm[1]], e[perm[2]]];
            dfs(t, &mut seq, flag, &mut out);
        }
    }
    out.into_iter().collect()
}

fn to_fan<S: Scalar>(m: &LinearMatroid<S>, seq: &[usize], flag: bool) -> Fan {
    Fan::new(seq.iter().map(|&i| m.label(i).to_string()).collect(), flag)
}

/// Every fan of `m`, including non-maximal ones, once up to reversal.
pub fn all_fans<S: Scalar>(m: &LinearMatroid<S>) -> Vec<Fan> {
    all_fans_idx(m.table()).into_iter().map(|(s, f)| to_fan(m, &s, f)).collect()
}

/// The maximal fans of `m`, once up to reversal. A 3-element set that is
/// both a triangle and a triad yields one fan per typing.
pub fn find_fans<S: Scalar>(m: &LinearMatroid<S>) -> Vec<Fan> {
    let t = m.table();
    all_fans_idx(t)
        .into_iter()
        .filter(|(seq, flag)| {
            let rev: Vec<usize> = seq.iter().rev().copied().collect();
            extends_right(t, seq, *flag).is_empty() && extends_right(t, &rev, reverse_flag(seq.len(), *flag)).is_empty()
        })
        .map(|(s, f)| to_fan(m, &s, f))
        .collect()
}

/// Families of pairwise disjoint fans of `m` whose lengths are `lengths`
/// in order. Fans of equal length are taken in increasing order, so each
/// unordered family appears once per arrangement of distinct lengths.
pub fn disjoint_fan_families<S: Scalar>(m: &LinearMatroid<S>, lengths: &[usize]) -> Vec<Vec<Fan>> {
    let fans: Vec<(Fan, Mask)> =
        all_fans_idx(m.table()).into_iter().map(|(s, f)| (to_fan(m, &s, f), mask_of(&s))).collect();
    let mut out = Vec::new();
    fn rec(
        k: usize,
        lengths: &[usize],
        fans: &[(Fan, Mask)],
        used: Mask,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<Fan>>,
    ) {
        if k == lengths.len() {
            out.push(chosen.iter().map(|&i| fans[i].0.clone()).collect());
            return;
        }
        let start = match chosen.last() {
            Some(&p) if k > 0 && lengths[k - 1] == lengths[k] => p + 1,
            _ => 0,
        };
        for i in start..fans.len() {
            if fans[i].0.len() == lengths[k] && fans[i].1 & used == 0 {
                chosen.push(i);
                rec(k + 1, lengths, fans, used | fans[i].1, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(0, lengths, &fans, 0, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveKind {
    DeleteFirst,
    DeleteLast,
    ContractFirst,
    ContractLast,
    /// `M / e_i \ e_{i+1}` with `e_i` a rim (0-based `i`).
    ContractDelete(usize),
    /// `M / e_{i+1} \ e_i` with `e_i` a spoke (0-based `i`).
    DeleteContract(usize),
}

#[derive(Clone, Debug)]
pub struct ShorteningMove<S: Scalar> {
    pub kind: MoveKind,
    pub minor: LinearMatroid<S>,
    pub residual: Fan,
}

fn residual(fan: &Fan, removed: &[usize]) -> Fan {
    let keep: Vec<usize> = (0..fan.len()).filter(|i| !removed.contains(i)).collect();
    Fan::new(keep.iter().map(|&i| fan.elements[i].clone()).collect(), fan.is_spoke(keep[0]))
}

/// The reverse of each fan-lengthening move applicable to `fan`, keeping
/// those whose minor is 3-connected with the residual sequence as a fan.
pub fn fan_shortening_moves<S: Scalar>(
    m: &LinearMatroid<S>,
    fan: &Fan,
) -> Result<Vec<ShorteningMove<S>>, StructureError> {
    if !is_fan(m, fan) {
        return Err(StructureError::InvalidFan(fan.to_string()));
    }
    let n = fan.len();
    let mut out = Vec::new();
    if n < 4 {
        return Ok(out);
    }
    let e = |i: usize| fan.elements[i].as_str();
    let mut cands: Vec<(MoveKind, Vec<&str>, Vec<&str>, Vec<usize>)> = Vec::new();
    if fan.is_spoke(0) {
        cands.push((MoveKind::DeleteFirst, vec![], vec![e(0)], vec![0]));
    } else {
        cands.push((MoveKind::ContractFirst, vec![e(0)], vec![], vec![0]));
    }
    if fan.is_spoke(n - 1) {
        cands.push((MoveKind::DeleteLast, vec![], vec![e(n - 1)], vec![n - 1]));
    } else {
        cands.push((MoveKind::ContractLast, vec![e(n - 1)], vec![], vec![n - 1]));
    }
    if n >= 5 {
        for i in 0..n - 1 {
            if !fan.is_spoke(i) {
                cands.push((MoveKind::ContractDelete(i), vec![e(i)], vec![e(i + 1)], vec![i, i + 1]));
            } else {
                cands.push((MoveKind::DeleteContract(i), vec![e(i + 1)], vec![e(i)], vec![i, i + 1]));
            }
        }
    }
    for (kind, con, del, removed) in cands {
        let minor = m.contract_labels(&con)?.delete_labels(&del)?;
        let res = residual(fan, &removed);
        if minor.is_3connected() && is_fan(&minor, &res) {
            out.push(ShorteningMove { kind, minor, residual: res });
        }
    }
    Ok(out)
}

/// A family of disjoint fans of `M`, the `i`-th consistent with the `i`-th
/// base fan of `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringFamily {
    pub fans: Vec<Fan>,
    pub base_fans: Vec<Fan>,
}

/// All covering families of `m` relative to a minor on `n_labels` (a
/// subset of `m`'s labels) and its fans.
pub fn covering_families<S: Scalar>(
    m: &LinearMatroid<S>,
    n_labels: &[String],
    base_fans: &[Fan],
) -> Result<Vec<CoveringFamily>, StructureError> {
    let mut n_mask: Mask = 0;
    for l in n_labels {
        n_mask |= bit(m.index_of(l).map_err(|_| StructureError::Correspondence(format!("{l} missing from M")))?);
    }
    for f in base_fans {
        for l in &f.elements {
            if !n_labels.contains(l) {
                return Err(StructureError::Correspondence(format!("base fan element {l} not in N")));
            }
        }
    }
    let uncovered_needed = m.table().ground() & !n_mask;
    let fans = all_fans(m);
    let with_masks: Vec<(Fan, Mask)> = fans
        .into_iter()
        .flat_map(|f| {
            let mk = m.mask_of_labels(f.elements.iter()).expect("own labels");
            let mut v = vec![(f.clone(), mk)];
            // a 3-element fan that is both a triangle and a triad appears with both typings
            if f.len() == 3 && is_fan(m, &Fan::new(f.elements.clone(), !f.first_is_triangle)) {
                v.push((Fan::new(f.elements.clone(), !f.first_is_triangle), mk));
            }
            v
        })
        .collect();
    let candidates: Vec<Vec<usize>> = base_fans
        .iter()
        .map(|b| (0..with_masks.len()).filter(|&i| b.is_consistent_with(&with_masks[i].0)).collect())
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        k: usize,
        used: Mask,
        candidates: &[Vec<usize>],
        with_masks: &[(Fan, Mask)],
        needed: Mask,
        chosen: &mut Vec<usize>,
        base: &[Fan],
        out: &mut Vec<CoveringFamily>,
    ) {
        if k == candidates.len() {
            if used & needed == needed {
                out.push(CoveringFamily {
                    fans: chosen.iter().map(|&i| with_masks[i].0.clone()).collect(),
                    base_fans: base.to_vec(),
                });
            }
            return;
        }
        for &i in &candidates[k] {
            if with_masks[i].1 & used == 0 {
                chosen.push(i);
                rec(k + 1, used | with_masks[i].1, candidates, with_masks, needed, chosen, base, out);
                chosen.pop();
            }
        }
    }
    rec(0, 0, &candidates, &with_masks, uncovered_needed, &mut chosen, base_fans, &mut out);
    Ok(out)
}

/// Fans of `m` that occur in some covering family.
fn usable_fans<S: Scalar>(
    m: &LinearMatroid<S>,
    n_labels: &[String],
    base_fans: &[Fan],
) -> Result<Vec<Fan>, StructureError> {
    let mut set: BTreeSet<Fan> = BTreeSet::new();
    for fam in covering_families(m, n_labels, base_fans)? {
        set.extend(fam.fans);
    }
    Ok(set.into_iter().collect())
}

/// Inserts `ins` (label, is_spoke) pairs at `pos` and tests the result as a
/// fan of `m` with the required roles.
fn lengthened_is_fan<S: Scalar>(m: &LinearMatroid<S>, g: &Fan, pos: usize, ins: &[(&str, bool)]) -> bool {
    let mut seq: Vec<String> = g.elements[..pos].to_vec();
    seq.extend(ins.iter().map(|(l, _)| l.to_string()));
    seq.extend(g.elements[pos..].iter().cloned());
    // role of position `pos` fixes the typing
    let first_is_triangle = (pos % 2 == 0) == ins[0].1;
    let f = Fan::new(seq, first_is_triangle);
    ins.iter().enumerate().all(|(k, &(_, spoke))| f.is_spoke(pos + k) == spoke) && is_fan(m, &f)
}

/// All matroids obtained from `m` by one fan-lengthening move on one of
/// `fans`, restricted to 3-connected members of the class.
pub fn fan_lengthenings<S: Scalar>(
    m: &LinearMatroid<S>,
    fans: &[Fan],
    c: ClassId,
) -> Result<Vec<LinearMatroid<S>>, StructureError> {
    let mut out = Vec::new();
    if fans.is_empty() {
        return Ok(out);
    }
    let e = fresh_label(m);
    let single = |x: &LinearMatroid<S>, spoke: bool| {
        fans.iter()
            .any(|g| lengthened_is_fan(x, g, 0, &[(&e, spoke)]) || lengthened_is_fan(x, g, g.len(), &[(&e, spoke)]))
    };
    out.extend(extension_candidates_where(m, c, &e, &|x| single(x, true))?);
    out.extend(coextension_candidates_where(m, c, &e, &|x| single(x, false))?);
    // two new adjacent elements x (spoke) and y (rim) with N = M'/y\x: in
    // M'/y the spoke x is parallel to a fan element, in M'\x the rim y is in
    // series with one
    let pivots: BTreeSet<&String> = fans.iter().flat_map(|g| g.elements.iter()).collect();
    for p in pivots {
        let par = m.add_parallel(p, &e)?;
        let y = fresh_label(&par);
        out.extend(coextension_candidates_where(&par, c, &y, &|x| double_fits(x, m, fans, &e, &y))?);
        let ser = m.add_series(p, &e)?;
        out.extend(extension_candidates_where(&ser, c, &y, &|x| double_fits(x, m, fans, &y, &e))?);
    }
    Ok(out)
}

fn double_fits<S: Scalar>(cand: &LinearMatroid<S>, m: &LinearMatroid<S>, fans: &[Fan], spoke: &str, rim: &str) -> bool {
    let placed = fans.iter().any(|g| {
        (0..=g.len()).any(|pos| {
            lengthened_is_fan(cand, g, pos, &[(spoke, true), (rim, false)])
                || lengthened_is_fan(cand, g, pos, &[(rim, false), (spoke, true)])
        })
    });
    placed && shortens_back(cand, m, spoke, rim)
}

/// Deleting the spoke and contracting the rim recovers `m` with identical
/// labels.
fn shortens_back<S: Scalar>(cand: &LinearMatroid<S>, m: &LinearMatroid<S>, spoke: &str, rim: &str) -> bool {
    match cand.contract_labels(&[rim]).and_then(|x| x.delete_labels(&[spoke])) {
        Ok(minor) => minor.labels() == m.labels() && minor.table() == m.table(),
        Err(_) => false,
    }
}

/// Breadth-first closure of `n` under fan-lengthening moves on covering
/// families, truncated at `|E(n)| + k` elements and reduced up to
/// isomorphisms fixing `E(n)`. Members are 3-connected members of the class.
pub fn fan_extension_closure<S: Scalar>(
    n: &LinearMatroid<S>,
    base_fans: &[Fan],
    k: usize,
    c: ClassId,
) -> Result<Vec<LinearMatroid<S>>, StructureError> {
    for (i, f) in base_fans.iter().enumerate() {
        if !is_fan(n, f) {
            return Err(StructureError::InvalidFan(f.to_string()));
        }
        for (j, g) in base_fans.iter().enumerate().skip(i + 1) {
            if !f.set().0.is_disjoint(&g.set().0) {
                return Err(StructureError::OverlappingFans(i, j));
            }
        }
    }
    let n_labels = n.labels().to_vec();
    let limit = n.size() + k;
    let mut by_size: BTreeMap<usize, Vec<(Fingerprint, LinearMatroid<S>)>> = BTreeMap::new();
    by_size.entry(n.size()).or_default().push((fingerprint(n), n.clone()));
    for size in n.size()..=limit {
        let level: Vec<LinearMatroid<S>> =
            by_size.get(&size).map(|v| v.iter().map(|(_, m)| m.clone()).collect()).unwrap_or_default();
        for m in level {
            let fans = usable_fans(&m, &n_labels, base_fans)?;
            for next in fan_lengthenings(&m, &fans, c)? {
                if next.size() > limit {
                    continue;
                }
                let fp = fingerprint(&next);
                let bucket = by_size.entry(next.size()).or_default();
                if !bucket.iter().any(|(f, other)| f == &fp && are_isomorphic_fixing(other, &next, &n_labels)) {
                    bucket.push((fp, next));
                }
            }
        }
    }
    Ok(by_size.into_values().flatten().map(|(_, m)| m).collect())
}

/// `m` is isomorphic to a member of the closure of `n` of its size.
pub fn is_fan_extension<S: Scalar>(
    m: &LinearMatroid<S>,
    n: &LinearMatroid<S>,
    base_fans: &[Fan],
    c: ClassId,
) -> Result<bool, StructureError> {
    if m.size() < n.size() {
        return Ok(false);
    }
    let closure = fan_extension_closure(n, base_fans, m.size() - n.size(), c)?;
    Ok(closure.iter().any(|x| x.size() == m.size() && is_isomorphic(x, m)))
}

fn coord_columns<S: Scalar>(m: &LinearMatroid<S>, k: usize, idx: &[usize]) -> Vec<Vec<S::Coord>> {
    idx.iter().map(|&j| m.column(j).iter().map(|x| x.coord(k)).collect()).collect()
}

fn unique_point<F: Field>(
    u: &[Vec<F>],
    w: &[Vec<F>],
    fan: usize,
    point: &'static str,
) -> Result<Vec<F>, StructureError> {
    let int = span_intersection(u, w);
    if int.len() != 1 {
        return Err(StructureError::ClosurePoint { fan, point, dim: int.len() });
    }
    let mut v = int[0].clone();
    normalize(&mut v);
    Ok(v)
}

/// Combines per-coordinate normalized vectors into one column, requiring a
/// common support.
fn combine<S: Scalar>(per: &[Vec<S::Coord>], fan: usize, point: &'static str) -> Result<Vec<S>, StructureError> {
    let support = |v: &Vec<S::Coord>| v.iter().map(|x| !num_traits::Zero::is_zero(x)).collect::<Vec<_>>();
    let s0 = support(&per[0]);
    if per.iter().any(|v| support(v) != s0) {
        return Err(StructureError::InconsistentSupport { fan, point });
    }
    Ok((0..per[0].len()).map(|i| S::from_coords(&per.iter().map(|v| v[i]).collect::<Vec<_>>())).collect())
}

/// The core of `n` relative to disjoint fans: each fan is replaced by a new
/// triangle `{a_i, b_i, c_i}` of closure points, and elements parallel to
/// some `a_i` or `c_i` are removed.
pub fn core<S: Scalar>(n: &LinearMatroid<S>, fans: &[Fan]) -> Result<LinearMatroid<S>, StructureError> {
    let mut in_fans: Mask = 0;
    for (i, f) in fans.iter().enumerate() {
        if !is_fan(n, f) {
            return Err(StructureError::InvalidFan(f.to_string()));
        }
        let mk = n.mask_of_labels(f.elements.iter())?;
        if mk & in_fans != 0 {
            let j = fans[..i].iter().position(|g| !g.set().0.is_disjoint(&f.set().0)).unwrap_or(0);
            return Err(StructureError::OverlappingFans(j, i));
        }
        in_fans |= mk;
    }
    let mut out = n.clone();
    let mut new_points: Vec<(usize, [String; 3])> = Vec::new();
    for (i, f) in fans.iter().enumerate() {
        let fi = n.mask_of_labels(f.elements.iter())?;
        let outside: Vec<usize> = (0..n.size()).filter(|&j| fi & bit(j) == 0).collect();
        let idx = indices(n, f)?;
        let m = f.len();
        let rims: Vec<usize> = (0..m).filter(|&p| !f.is_spoke(p)).map(|p| idx[p]).collect();
        let mut cols: Vec<Vec<S>> = Vec::new();
        for (point, ends) in [("a", [idx[0], idx[1]]), ("b", [0, 0]), ("c", [idx[m - 1], idx[m - 2]])] {
            let mut per = Vec::with_capacity(S::COORDS);
            for k in 0..S::COORDS {
                let w = coord_columns(n, k, &outside);
                let v = match point {
                    "b" => unique_point(&coord_columns(n, k, &rims), &w, i + 1, "b")?,
                    _ if f.is_spoke(if point == "a" { 0 } else { m - 1 }) => {
                        let mut v = coord_columns(n, k, &ends[..1]).remove(0);
                        normalize(&mut v);
                        v
                    }
                    _ => unique_point(&coord_columns(n, k, &ends), &w, i + 1, point)?,
                };
                per.push(v);
            }
            cols.push(combine::<S>(&per, i + 1, point)?);
        }
        let labels = [format!("a{}", i + 1), format!("b{}", i + 1), format!("c{}", i + 1)];
        for (l, col) in labels.iter().zip(&cols) {
            if n.index_of(l).is_ok() {
                return Err(StructureError::LabelClash(l.clone()));
            }
            out = out.extend(col, l)?;
        }
        new_points.push((i, labels));
    }
    // elements of E(N) parallel to some a_i or c_i
    let t = out.table();
    let mut s_owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, labels) in &new_points {
        for l in [&labels[0], &labels[2]] {
            let p = out.index_of(l)?;
            for e in 0..n.size() {
                if in_fans & bit(e) == 0 && t.rank_of(bit(e) | bit(p)) == 1 {
                    if let Some(&prev) = s_owner.get(&e) {
                        if prev != *i {
                            return Err(StructureError::ParallelOverlap(n.label(e).to_string()));
                        }
                    }
                    s_owner.insert(e, *i);
                }
            }
        }
    }
    let remove: Vec<String> = (0..n.size())
        .filter(|&e| in_fans & bit(e) != 0 || s_owner.contains_key(&e))
        .map(|e| n.label(e).to_string())
        .collect();
    Ok(out.delete(&remove.iter().collect())?)
}

fn solve_pair<F: Field>(va: &[F], vc: &[F], vb: &[F]) -> Option<(F, F)> {
    let ns = nullspace(&Matrix::from_columns(va.len(), &[va.to_vec(), vc.to_vec(), vb.to_vec()]));
    if ns.len() != 1 || ns[0][2].is_zero() {
        return None;
    }
    let z = ns[0][2].inverse()?;
    Some((-ns[0][0] * z, -ns[0][1] * z))
}

/// Generalized parallel connection of `m1` and `m2` along the common
/// triangle `t`, which must be a modular flat of `m2`. `m2`'s representation
/// is rescaled so that its triangle columns match those of `m1`.
pub fn gpc<S: Scalar>(
    m1: &LinearMatroid<S>,
    m2: &LinearMatroid<S>,
    t: [&str; 3],
) -> Result<LinearMatroid<S>, StructureError> {
    let tri = |m: &LinearMatroid<S>| -> Result<[usize; 3], StructureError> {
        let idx = [m.index_of(t[0])?, m.index_of(t[1])?, m.index_of(t[2])?];
        if !m.table().is_triangle(mask_of(&idx)) {
            return Err(StructureError::NotATriangle(t.join(",")));
        }
        Ok(idx)
    };
    let [ia, ib, ic] = tri(m1)?;
    let [ja, jb, jc] = tri(m2)?;
    for l in m2.labels() {
        if !t.contains(&l.as_str()) && m1.index_of(l).is_ok() {
            return Err(StructureError::LabelClash(l.clone()));
        }
    }
    // v_b = lambda v_a + mu v_c in m1, coordinatewise
    let (mut lam, mut mu) = (Vec::new(), Vec::new());
    for k in 0..S::COORDS {
        let col = |j: usize| m1.column(j).iter().map(|x| x.coord(k)).collect::<Vec<_>>();
        let (l, u) =
            solve_pair(&col(ia), &col(ic), &col(ib)).ok_or_else(|| StructureError::NotATriangle(t.join(",")))?;
        lam.push(l);
        mu.push(u);
    }
    let lam = S::from_coords(&lam);
    let mu = S::from_coords(&mu);
    let w = m2.rebased(&[ja, jc])?;
    let basis = w.basis_columns().to_vec();
    let row_a = basis.iter().position(|&b| b == ja).expect("rebased");
    let row_c = basis.iter().position(|&b| b == jc).expect("rebased");
    let wm = w.full_matrix();
    let alpha = wm[(row_a, jb)];
    let gamma = wm[(row_c, jb)];
    let sa = lam * alpha.inverse().ok_or(MatroidError::NonUnitPivot)?;
    let sc = mu * gamma.inverse().ok_or(MatroidError::NonUnitPivot)?;
    let r1 = m1.rank();
    let others: Vec<usize> = (0..w.rank()).filter(|&i| i != row_a && i != row_c).collect();
    let rows = r1 + others.len();
    let va = m1.column(ia);
    let vc = m1.column(ic);
    let mut cols: Vec<Vec<S>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for j in 0..m1.size() {
        let mut col = m1.column(j);
        col.resize(rows, S::zero());
        cols.push(col);
        labels.push(m1.label(j).to_string());
    }
    for j in 0..w.size() {
        if j == ja || j == jb || j == jc {
            continue;
        }
        let mut col = vec![S::zero(); rows];
        for i in 0..r1 {
            col[i] = wm[(row_a, j)] * sa * va[i] + wm[(row_c, j)] * sc * vc[i];
        }
        for (k, &i) in others.iter().enumerate() {
            col[r1 + k] = wm[(i, j)];
        }
        cols.push(col);
        labels.push(w.label(j).to_string());
    }
    Ok(LinearMatroid::from_columns_matrix(Matrix::from_columns(rows, &cols), labels)?)
}

/// Triangles `(a_i, b_i, c_i)`, wheel ranks and the deletion set of a gluing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelGlueSpec {
    pub triangles: Vec<[String; 3]>,
    pub ranks: Vec<usize>,
    pub delete: ElementSet,
}

impl WheelGlueSpec {
    pub fn validate(&self) -> Result<(), StructureError> {
        if self.triangles.len() != self.ranks.len() {
            return Err(StructureError::GlueSpec("one rank per triangle".into()));
        }
        if let Some(r) = self.ranks.iter().find(|&&r| r < 2) {
            return Err(StructureError::GlueSpec(format!("wheel rank {r} below 2")));
        }
        let union: BTreeSet<&String> = self.triangles.iter().flatten().collect();
        if let Some(x) = self.delete.iter().find(|x| !union.contains(x)) {
            return Err(StructureError::GlueSpec(format!("{x} is not in any glued triangle")));
        }
        for [_, b, _] in &self.triangles {
            let spoke_elsewhere = self.triangles.iter().any(|[a, _, c]| a == b || c == b);
            if !spoke_elsewhere && !self.delete.contains(b) {
                return Err(StructureError::GlueSpec(format!("{b} must be deleted")));
            }
        }
        Ok(())
    }
}

/// Labels of the wheel glued to triangle `i` (1-based): its triangle
/// `(s1, r1, s2)` takes the triangle labels, other elements become `w{i}.s3`
/// and so on.
pub fn glued_wheel_label(i: usize, wheel_label: &str) -> String {
    format!("w{i}.{wheel_label}")
}

pub fn glue_wheels<S: Scalar>(n: &LinearMatroid<S>, spec: &WheelGlueSpec) -> Result<LinearMatroid<S>, StructureError> {
    spec.validate()?;
    let mut cur = n.clone();
    for (i, (tri, &rank)) in spec.triangles.iter().zip(&spec.ranks).enumerate() {
        let (w, _, _) = wheel::<S>(rank)?;
        let map: BTreeMap<String, String> = w
            .labels()
            .iter()
            .map(|l| {
                let target = match l.as_str() {
                    "s1" => tri[0].clone(),
                    "r1" => tri[1].clone(),
                    "s2" => tri[2].clone(),
                    other => glued_wheel_label(i + 1, other),
                };
                (l.clone(), target)
            })
            .collect();
        let w = w.relabel(&map)?;
        cur = gpc(&cur, &w, [&tri[0], &tri[1], &tri[2]])?;
    }
    Ok(cur.delete(&spec.delete)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gf2, Gf5};
    use crate::catalog::{fano, uniform};

    #[test]
    fn uniform_has_no_fans() {
        assert!(find_fans(&uniform::<Gf5>(3, 6).unwrap()).is_empty());
    }

    #[test]
    fn wheel_rim_spoke_sequence_is_a_fan() {
        let (w, s, r) = wheel::<Gf2>(3).unwrap();
        let f =
            Fan::new(vec![s[0].clone(), r[0].clone(), s[1].clone(), r[1].clone(), s[2].clone(), r[2].clone()], true);
        assert!(is_fan(&w, &f));
        assert!(is_fan(&w, &f.reversed()));
        assert!(find_fans(&w).iter().any(|g| g.len() == 6));
    }

    #[test]
    fn reversal_swaps_typing_for_even_length() {
        let f = Fan::from_labels(&["a", "b", "c", "d"], true);
        let r = f.reversed();
        assert_eq!(r.elements, vec!["d", "c", "b", "a"]);
        assert!(!r.first_is_triangle);
        assert_eq!(f.spokes(), vec!["a", "c"]);
        assert_eq!(r.spokes(), vec!["c", "a"]);
    }

    #[test]
    fn consistency_is_subsequence_up_to_reversal() {
        let g = Fan::from_labels(&["1", "2", "3", "4", "5"], true);
        assert!(Fan::from_labels(&["1", "3", "5"], true).is_consistent_with(&g));
        assert!(Fan::from_labels(&["4", "2", "1"], true).is_consistent_with(&g));
        assert!(!Fan::from_labels(&["2", "1", "3"], true).is_consistent_with(&g));
    }

    #[test]
    fn short_fans_have_no_moves() {
        let f = fano();
        let t = f.triangles().remove(0);
        let fan = Fan::new(t.0.into_iter().collect(), true);
        assert!(fan_shortening_moves(&f, &fan).unwrap().is_empty());
    }

    #[test]
    fn gpc_rank_and_restrictions() {
        let f = fano();
        let (w, _, _) = wheel::<Gf2>(3).unwrap();
        let map: BTreeMap<String, String> =
            [("s1", "2"), ("r1", "6"), ("s2", "9"), ("r2", "x"), ("s3", "y"), ("r3", "z")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect();
        let w = w.relabel(&map).unwrap();
        let p = gpc(&f, &w, ["2", "6", "9"]).unwrap();
        assert_eq!(p.rank(), 4);
        let restricted = p.delete_labels(&["x", "y", "z"]).unwrap();
        assert_eq!(restricted.table(), f.table());
        let back = p.delete_labels(&["0", "1", "7", "8"]).unwrap();
        assert!(is_isomorphic(&back, &w));
    }
}
