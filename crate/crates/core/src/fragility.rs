//! Minor testing, fragility, class membership and single-element
//! extensions within a class.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{Field, Ring, Scalar};
use crate::catalog;
use crate::iso::{dedup, find_isomorphism, reps_equivalent};
use crate::linalg::{nullspace, Matrix};
use crate::matroid::{bit, mask_elements, popcount, subsets_of_size, LinearMatroid, Mask, MatroidError, RankTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    FanoFragile,
    H5Fragile,
}

impl ClassId {
    pub fn name(self) -> &'static str {
        match self {
            ClassId::FanoFragile => "fano",
            ClassId::H5Fragile => "h5",
        }
    }

    pub fn ring(self) -> Ring {
        match self {
            ClassId::FanoFragile => Ring::Gf2,
            ClassId::H5Fragile => Ring::Gf5x6,
        }
    }

    /// Rank tables of the excluded family: {F7, F7*} or {U25, U35}.
    pub fn family(self) -> Vec<RankTable> {
        match self {
            ClassId::FanoFragile => {
                let f = catalog::fano();
                vec![f.table().clone(), f.table().dual()]
            }
            ClassId::H5Fragile => {
                vec![RankTable::from_fn(5, |m| popcount(m).min(2)), RankTable::from_fn(5, |m| popcount(m).min(3))]
            }
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fano" => Ok(ClassId::FanoFragile),
            "h5" => Ok(ClassId::H5Fragile),
            other => Err(format!("unknown class {other:?} (expected fano or h5)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragilityError {
    #[error("{0} is a wheel or a whirl")]
    WheelOrWhirl(String),
    #[error("class {class} needs ring {expected}, got {found}")]
    RingMismatch { class: ClassId, expected: Ring, found: Ring },
    #[error("grown matroid violates {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Counts of dependent subsets by size; a cheap isomorphism invariant.
fn dependency_counts(t: &RankTable) -> Vec<usize> {
    let mut out = vec![0; t.len() + 1];
    for m in 0..=t.ground() {
        if !t.is_independent(m) {
            out[popcount(m)] += 1;
        }
    }
    out
}

struct Target<'a> {
    table: &'a RankTable,
    counts: Vec<usize>,
    simple: bool,
}

impl<'a> Target<'a> {
    fn new(table: &'a RankTable) -> Self {
        Target { table, counts: dependency_counts(table), simple: table.is_simple() }
    }
}

/// Decides whether `n` is a minor of `m`: every minor is `M / C | X` with
/// `C` independent of size `r(M) - r(N)` and `X` spanning in `M / C`.
fn minor_search(m: &RankTable, n: &Target) -> bool {
    let nt = n.table;
    let k = m.rank() - nt.rank();
    let mut seen: HashSet<Mask> = HashSet::new();
    for c in subsets_of_size(m.ground(), k) {
        if !m.is_independent(c) {
            continue;
        }
        if n.simple {
            // M / C restricted to one point per parallel class depends only
            // on cl(C)
            if !seen.insert(m.closure(c)) {
                continue;
            }
        }
        let mut pool: Mask = 0;
        let mut reps: Vec<usize> = Vec::new();
        for e in mask_elements(m.ground() & !c) {
            if n.simple {
                if m.rank_of(c | bit(e)) == k {
                    continue;
                }
                if reps.iter().any(|&f| m.rank_of(c | bit(e) | bit(f)) == k + 1) {
                    continue;
                }
                reps.push(e);
            }
            pool |= bit(e);
        }
        if popcount(pool) < nt.len() {
            continue;
        }
        for x in subsets_of_size(pool, nt.len()) {
            if m.rank_of(x | c) - k != nt.rank() {
                continue;
            }
            let keep: Vec<usize> = mask_elements(x).collect();
            let t = m.minor(&keep, c);
            if dependency_counts(&t) == n.counts && find_isomorphism(&t, nt, &[]).is_some() {
                return true;
            }
        }
    }
    false
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn has_minor_table(m: &RankTable, n: &RankTable) -> bool {
    let (size, r) = (m.len(), m.rank());
    if n.len() > size || n.rank() > r || n.len() - n.rank() > size - r {
        return false;
    }
    let nd = n.dual();
    let simple = n.is_simple();
    let cosimple = nd.is_simple();
    let direct = binom(size, r - n.rank());
    let dual = binom(size, (size - r) - (n.len() - n.rank()));
    if cosimple && (!simple || dual < direct) {
        minor_search(&m.dual(), &Target::new(&nd))
    } else {
        minor_search(m, &Target::new(n))
    }
}

pub fn has_minor<S: Scalar, T: Scalar>(m: &LinearMatroid<S>, n: &LinearMatroid<T>) -> bool {
    has_minor_table(m.table(), n.table())
}

pub fn has_family_minor(m: &RankTable, family: &[RankTable]) -> bool {
    family.iter().any(|n| has_minor_table(m, n))
}

/// For every element at most one of `M \ e`, `M / e` has a family minor.
pub fn is_fragile_table(m: &RankTable, family: &[RankTable]) -> bool {
    let n = m.len();
    for e in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&f| f != e).collect();
        if has_family_minor(&m.minor(&keep, 0), family) && has_family_minor(&m.minor(&keep, bit(e)), family) {
            return false;
        }
    }
    true
}

pub fn is_strictly_fragile_table(m: &RankTable, family: &[RankTable]) -> bool {
    has_family_minor(m, family) && is_fragile_table(m, family)
}

pub fn is_fragile<S: Scalar, T: Scalar>(m: &LinearMatroid<S>, family: &[LinearMatroid<T>]) -> bool {
    let tables: Vec<RankTable> = family.iter().map(|f| f.table().clone()).collect();
    is_fragile_table(m.table(), &tables)
}

pub fn is_strictly_fragile<S: Scalar, T: Scalar>(m: &LinearMatroid<S>, family: &[LinearMatroid<T>]) -> bool {
    let tables: Vec<RankTable> = family.iter().map(|f| f.table().clone()).collect();
    is_strictly_fragile_table(m.table(), &tables)
}

/// All coordinate projections define the same matroid.
pub fn is_valid_product_rep<S: Scalar>(m: &LinearMatroid<S>) -> bool {
    let first = m.table();
    (1..S::COORDS).all(|k| m.projection(k).table() == first)
}

/// Number of classes among the coordinate projections under
/// representation equivalence.
pub fn inequivalent_projection_count<S: Scalar>(m: &LinearMatroid<S>) -> usize {
    let projs: Vec<_> = (0..S::COORDS).map(|k| m.projection(k)).collect();
    let mut class_of: Vec<usize> = (0..projs.len()).collect();
    for i in 0..projs.len() {
        for j in 0..i {
            if class_of[j] == j && reps_equivalent(&projs[i], &projs[j]) == Ok(true) {
                class_of[i] = j;
                break;
            }
        }
    }
    class_of.iter().enumerate().filter(|(i, &c)| *i == c).count()
}

pub fn in_class<S: Scalar>(m: &LinearMatroid<S>, c: ClassId) -> bool {
    if S::RING != c.ring() {
        return false;
    }
    if c == ClassId::H5Fragile && !(is_valid_product_rep(m) && inequivalent_projection_count(m) == S::COORDS) {
        return false;
    }
    is_strictly_fragile_table(m.table(), &c.family())
}

fn check_ring<S: Scalar>(c: ClassId) -> Result<(), FragilityError> {
    if S::RING != c.ring() {
        return Err(FragilityError::RingMismatch { class: c, expected: c.ring(), found: S::RING });
    }
    Ok(())
}

/// Smallest non-negative integer label not already in use.
pub fn fresh_label<S: Scalar>(m: &LinearMatroid<S>) -> String {
    let used: BTreeSet<&str> = m.labels().iter().map(String::as_str).collect();
    (0..).map(|i: usize| i.to_string()).find(|l| !used.contains(l.as_str())).expect("unbounded")
}

/// Nonzero vectors of `F^r` with first nonzero entry 1.
pub fn projective_points<F: Field>(r: usize) -> Vec<Vec<F>> {
    let elems = F::elements();
    let q = elems.len();
    let mut out = Vec::new();
    for lead in 0..r {
        let free = r - lead - 1;
        let total = q.pow(free as u32);
        for mut code in 0..total {
            let mut v = vec![F::zero(); r];
            v[lead] = F::one();
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = elems[code % q];
                code /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Candidate columns, one per distinct simple single-element extension
/// realizable consistently in every coordinate. The extension of each
/// projection is determined by the set of hyperplanes whose span contains
/// the new vector.
pub fn extension_columns<S: Scalar>(m: &LinearMatroid<S>) -> Vec<Vec<S>> {
    let r = m.rank();
    if r == 0 {
        return Vec::new();
    }
    let t = m.table();
    let hyperplanes = t.hyperplanes();
    let words = hyperplanes.len().div_ceil(64).max(1);
    let mut element_sigs: HashSet<Vec<u64>> = HashSet::new();
    for e in 0..m.size() {
        let mut sig = vec![0u64; words];
        for (h, &hm) in hyperplanes.iter().enumerate() {
            if hm & bit(e) != 0 {
                sig[h / 64] |= 1 << (h % 64);
            }
        }
        element_sigs.insert(sig);
    }
    let points = projective_points::<S::Coord>(r);
    let mut per_coord: Vec<BTreeMap<Vec<u64>, Vec<S::Coord>>> = Vec::new();
    for k in 0..S::COORDS {
        let proj = m.projection(k);
        let normals: Vec<Vec<S::Coord>> = hyperplanes
            .iter()
            .map(|&h| {
                let cols: Vec<Vec<S::Coord>> = mask_elements(h).map(|e| proj.column(e)).collect();
                let ns = nullspace(&Matrix::from_rows(cols));
                assert_eq!(ns.len(), 1, "hyperplane spans a hyperplane");
                ns[0].clone()
            })
            .collect();
        let mut sigs: BTreeMap<Vec<u64>, Vec<S::Coord>> = BTreeMap::new();
        for p in &points {
            let mut sig = vec![0u64; words];
            for (h, nv) in normals.iter().enumerate() {
                let dot = nv.iter().zip(p).fold(S::Coord::zero(), |acc, (&a, &b)| acc + a * b);
                if dot.is_zero() {
                    sig[h / 64] |= 1 << (h % 64);
                }
            }
            if !element_sigs.contains(&sig) {
                sigs.entry(sig).or_insert_with(|| p.clone());
            }
        }
        per_coord.push(sigs);
    }
    let mut out = Vec::new();
    for (sig, v0) in &per_coord[0] {
        let mut coords: Vec<&Vec<S::Coord>> = vec![v0];
        for pc in &per_coord[1..] {
            match pc.get(sig) {
                Some(v) => coords.push(v),
                None => break,
            }
        }
        if coords.len() < S::COORDS {
            continue;
        }
        let col: Vec<S> = (0..r).map(|i| S::from_coords(&coords.iter().map(|v| v[i]).collect::<Vec<_>>())).collect();
        out.push(col);
    }
    out
}

/// Every 3-connected class member `m + e` with `e` labelled `label`, one per
/// distinct labelled matroid; not reduced up to isomorphism.
pub fn extension_candidates<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
    label: &str,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    extension_candidates_where(m, c, label, &|_| true)
}

/// [`extension_candidates`] restricted to extensions accepted by `keep`,
/// which runs before the (expensive) connectivity and class tests.
pub fn extension_candidates_where<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
    label: &str,
    keep: &dyn Fn(&LinearMatroid<S>) -> bool,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    filtered_extensions(m, c, label, keep, true)
}

/// Simple single-element extensions in the class, 3-connected or not.
pub fn simple_extensions_in_class<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    Ok(dedup(filtered_extensions(m, c, &fresh_label(m), &|_| true, false)?))
}

/// Dual of [`simple_extensions_in_class`].
pub fn cosimple_coextensions_in_class<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    Ok(simple_extensions_in_class(&m.dual(), c)?.into_iter().map(|x| x.dual()).collect())
}

fn filtered_extensions<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
    label: &str,
    keep: &dyn Fn(&LinearMatroid<S>) -> bool,
    connected: bool,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    check_ring::<S>(c)?;
    let family = c.family();
    let mut found = Vec::new();
    for col in extension_columns(m) {
        let ext = m.extend(&col, label)?;
        if !keep(&ext) || (connected && !ext.is_3connected()) {
            continue;
        }
        if c == ClassId::H5Fragile && !(is_valid_product_rep(&ext) && inequivalent_projection_count(&ext) == S::COORDS)
        {
            continue;
        }
        if is_strictly_fragile_table(ext.table(), &family) {
            found.push(ext);
        }
    }
    Ok(found)
}

/// Dual of [`extension_candidates`].
pub fn coextension_candidates<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
    label: &str,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    coextension_candidates_where(m, c, label, &|_| true)
}

/// Dual of [`extension_candidates_where`]; `keep` sees the coextension.
pub fn coextension_candidates_where<S: Scalar>(
    m: &LinearMatroid<S>,
    c: ClassId,
    label: &str,
    keep: &dyn Fn(&LinearMatroid<S>) -> bool,
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    let keep_dual = |x: &LinearMatroid<S>| keep(&x.dual());
    Ok(extension_candidates_where(&m.dual(), c, label, &keep_dual)?.into_iter().map(|x| x.dual()).collect())
}

/// 3-connected single-element extensions of `m` in the class, up to
/// isomorphism.
pub fn extensions<S: Scalar>(m: &LinearMatroid<S>, c: ClassId) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    Ok(dedup(extension_candidates(m, c, &fresh_label(m))?))
}

/// Coextensions through duality: `(M*)` extended, dualized back.
pub fn coextensions<S: Scalar>(m: &LinearMatroid<S>, c: ClassId) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    Ok(dedup(coextension_candidates(m, c, &fresh_label(m))?))
}

/// Coextensions by appending a new row to the reduced matrix, one row per
/// projective class; only practical over the prime fields.
pub fn coextensions_direct<F: Field>(
    m: &LinearMatroid<F>,
    c: ClassId,
) -> Result<Vec<LinearMatroid<F>>, FragilityError> {
    check_ring::<F>(c)?;
    let label = fresh_label(m);
    let family = c.family();
    let r = m.rank();
    let n = m.size();
    let nonbasis = m.nonbasis_columns();
    let mut found = Vec::new();
    for w in projective_points::<F>(nonbasis.len()) {
        let mut full = Matrix::zeros(r + 1, n + 1);
        for i in 0..r {
            for j in 0..n {
                full[(i, j)] = m.full_matrix()[(i, j)];
            }
        }
        for (k, &j) in nonbasis.iter().enumerate() {
            full[(r, j)] = w[k];
        }
        full[(r, n)] = F::one();
        let mut labels = m.labels().to_vec();
        labels.push(label.clone());
        let co = LinearMatroid::from_columns_matrix(full, labels).expect("unit pivots over a field");
        if co.is_3connected() && is_strictly_fragile_table(co.table(), &family) {
            found.push(co);
        }
    }
    Ok(dedup(found))
}

/// Every 3-connected class member with an `n`-minor and at most
/// `|E(n)| + k` elements, up to isomorphism, grouped by size.
pub fn grow<S: Scalar>(n: &LinearMatroid<S>, k: usize, c: ClassId) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    grow_avoiding(n, k, c, &[])
}

/// [`grow`] restricted to matroids with no minor isomorphic to a member of
/// `avoid`. Excluded minors are inherited by larger matroids, so pruning
/// each level loses nothing.
pub fn grow_avoiding<S: Scalar>(
    n: &LinearMatroid<S>,
    k: usize,
    c: ClassId,
    avoid: &[LinearMatroid<S>],
) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    check_ring::<S>(c)?;
    if n.table().is_wheel_or_whirl() {
        return Err(FragilityError::WheelOrWhirl(format!("{}-element base", n.size())));
    }
    let mut all = vec![n.clone()];
    let mut frontier = vec![n.clone()];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &frontier {
            next.extend(extensions(m, c)?);
            next.extend(coextensions(m, c)?);
        }
        frontier = dedup(next);
        frontier.retain(|m| !avoid.iter().any(|x| has_minor(m, x)));
        for m in &frontier {
            if !m.is_3connected() {
                return Err(FragilityError::InvariantViolated("3-connectivity".into()));
            }
            if !in_class(m, c) {
                return Err(FragilityError::InvariantViolated(format!("membership of {c}")));
            }
            if !has_minor(m, n) {
                return Err(FragilityError::InvariantViolated("base minor".into()));
            }
        }
        all.extend(frontier.iter().cloned());
    }
    Ok(all)
}

/// One extension step applied to a whole level: the next level of the
/// catalog.
pub fn next_level<S: Scalar>(level: &[LinearMatroid<S>], c: ClassId) -> Result<Vec<LinearMatroid<S>>, FragilityError> {
    let mut next = Vec::new();
    for m in level {
        next.extend(extensions(m, c)?);
        next.extend(coextensions(m, c)?);
    }
    Ok(dedup(next))
}
