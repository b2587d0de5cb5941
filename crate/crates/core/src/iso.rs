//! Isomorphism, fingerprints and isomorph-free deduplication.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Field, Scalar};
use crate::format::canonical_key;
use crate::matroid::{bit, mask_elements, popcount, LinearMatroid, Mask, RankTable};

/// Isomorphism-invariant summary of a matroid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub rank: usize,
    pub size: usize,
    pub triangles: usize,
    pub triads: usize,
    /// `circuits[k]` = number of circuits of size `k`.
    pub circuits: Vec<usize>,
    /// `hyperplanes[k]` = number of hyperplanes with `k` elements.
    pub hyperplanes: Vec<usize>,
    /// Sorted per-element profiles.
    pub elements: Vec<Vec<usize>>,
}

impl Fingerprint {
    pub fn short_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("serializable");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }
}

/// Per-element invariants: circuit sizes through the element, hyperplane
/// sizes through it, followed by the same counts in the dual.
pub fn element_profiles(t: &RankTable) -> Vec<Vec<usize>> {
    let n = t.len();
    let r = t.rank();
    let full = t.ground();
    let mut prof = vec![vec![0usize; 2 * (n + 1)]; n];
    for m in 1..=full {
        let k = popcount(m);
        if t.is_circuit(m) {
            for e in mask_elements(m) {
                prof[e][k] += 1;
            }
        }
        if r > 0 && t.rank_of(m) == r - 1 && t.is_flat(m) {
            for e in mask_elements(m) {
                prof[e][n + 1 + k] += 1;
            }
        }
    }
    prof
}

pub fn fingerprint_table(t: &RankTable) -> Fingerprint {
    let n = t.len();
    let r = t.rank();
    let mut circuits = vec![0; n + 2];
    let mut hyperplanes = vec![0; n + 1];
    for m in 1..=t.ground() {
        if t.is_circuit(m) {
            circuits[popcount(m)] += 1;
        }
        if r > 0 && t.rank_of(m) == r - 1 && t.is_flat(m) {
            hyperplanes[popcount(m)] += 1;
        }
    }
    if r == 0 {
        hyperplanes.clear();
    }
    let mut elements = element_profiles(t);
    elements.sort();
    Fingerprint {
        rank: r,
        size: n,
        triangles: circuits.get(3).copied().unwrap_or(0),
        triads: t.triads().len(),
        circuits,
        hyperplanes,
        elements,
    }
}

pub fn fingerprint<S: Scalar>(m: &LinearMatroid<S>) -> Fingerprint {
    fingerprint_table(m.table())
}

/// Searches for a bijection `phi` (index in `a` -> index in `b`) preserving
/// rank on every subset. `fixed` pairs are forced.
pub fn find_isomorphism(a: &RankTable, b: &RankTable, fixed: &[(usize, usize)]) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() || a.rank() != b.rank() {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let pa = element_profiles(a);
    let pb = element_profiles(b);
    {
        let mut sa = pa.clone();
        let mut sb = pb.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return None;
        }
    }
    let mut candidates: Vec<Vec<usize>> = (0..n).map(|e| (0..n).filter(|&f| pa[e] == pb[f]).collect()).collect();
    for &(e, f) in fixed {
        if pa[e] != pb[f] {
            return None;
        }
        candidates[e] = vec![f];
    }
    // fixed first, then scarce candidates, then elements sharing small
    // circuits with earlier choices
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed: Mask = 0;
    let small_circuits: Vec<Mask> = (1..=a.ground()).filter(|&m| popcount(m) <= 4 && a.is_circuit(m)).collect();
    for &(e, _) in fixed {
        if placed & bit(e) == 0 {
            order.push(e);
            placed |= bit(e);
        }
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&e| placed & bit(e) == 0)
            .min_by_key(|&e| {
                let links = small_circuits.iter().filter(|&&c| c & bit(e) != 0 && c & placed != 0).count();
                (candidates[e].len(), usize::MAX - links, e)
            })
            .expect("unplaced element");
        order.push(next);
        placed |= bit(next);
    }

    let mut phi = vec![usize::MAX; n];
    let mut used: Mask = 0;
    let mut img_a = vec![0 as Mask; 1 << n];
    let mut img_b = vec![0 as Mask; 1 << n];

    fn rec(
        depth: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        a: &RankTable,
        b: &RankTable,
        phi: &mut [usize],
        used: &mut Mask,
        img_a: &mut [Mask],
        img_b: &mut [Mask],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let e = order[depth];
        let lo = 1usize << depth;
        for &f in &candidates[e] {
            if *used & bit(f) != 0 {
                continue;
            }
            let mut ok = true;
            for s in 0..lo {
                let ma = img_a[s] | bit(e);
                let mb = img_b[s] | bit(f);
                img_a[lo + s] = ma;
                img_b[lo + s] = mb;
                if a.rank_of(ma) != b.rank_of(mb) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            phi[e] = f;
            *used |= bit(f);
            if rec(depth + 1, order, candidates, a, b, phi, used, img_a, img_b) {
                return true;
            }
            *used &= !bit(f);
            phi[e] = usize::MAX;
        }
        false
    }

    if rec(0, &order, &candidates, a, b, &mut phi, &mut used, &mut img_a, &mut img_b) {
        Some(phi)
    } else {
        None
    }
}

/// A label bijection carrying independent sets of `m` onto those of `n`.
pub fn are_isomorphic<S: Scalar, T: Scalar>(
    m: &LinearMatroid<S>,
    n: &LinearMatroid<T>,
) -> Option<BTreeMap<String, String>> {
    let phi = find_isomorphism(m.table(), n.table(), &[])?;
    Some(phi.iter().enumerate().map(|(i, &j)| (m.label(i).to_string(), n.label(j).to_string())).collect())
}

pub fn is_isomorphic<S: Scalar, T: Scalar>(m: &LinearMatroid<S>, n: &LinearMatroid<T>) -> bool {
    m.size() == n.size() && m.rank() == n.rank() && are_isomorphic(m, n).is_some()
}

/// An isomorphism that fixes every label shared by both matroids.
pub fn are_isomorphic_fixing<S: Scalar>(m: &LinearMatroid<S>, n: &LinearMatroid<S>, fixed_labels: &[String]) -> bool {
    let mut fixed = Vec::new();
    for l in fixed_labels {
        match (m.index_of(l), n.index_of(l)) {
            (Ok(i), Ok(j)) => fixed.push((i, j)),
            _ => return false,
        }
    }
    find_isomorphism(m.table(), n.table(), &fixed).is_some()
}

/// One representative per isomorphism class, sorted by fingerprint; within a
/// class the representative with the smallest canonical serialization wins.
pub fn dedup<S: Scalar>(items: Vec<LinearMatroid<S>>) -> Vec<LinearMatroid<S>> {
    dedup_by(items, |a, b| is_isomorphic(a, b))
}

/// Deduplication under a caller-supplied equivalence that refines
/// fingerprint equality.
pub fn dedup_by<S: Scalar>(
    items: Vec<LinearMatroid<S>>,
    same: impl Fn(&LinearMatroid<S>, &LinearMatroid<S>) -> bool,
) -> Vec<LinearMatroid<S>> {
    let mut keyed: Vec<(Fingerprint, String, LinearMatroid<S>)> =
        items.into_iter().map(|m| (fingerprint(&m), canonical_key(&m), m)).collect();
    keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let mut out: Vec<(Fingerprint, LinearMatroid<S>)> = Vec::new();
    let mut bucket_start = 0;
    for (fp, _, m) in keyed {
        if out.last().map(|(f, _)| f != &fp).unwrap_or(true) {
            bucket_start = out.len();
        }
        if !out[bucket_start..].iter().any(|(_, r)| same(r, &m)) {
            out.push((fp, m));
        }
    }
    out.into_iter().map(|(_, m)| m).collect()
}

// ---------------------------------------------------------------------------
// Representation equivalence

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("representations are over different ground sets or bases")]
    DifferentFrames,
    #[error("matrices represent different matroids")]
    DifferentMatroids,
}

/// Scales rows and columns of `a` so that every edge of a spanning forest of
/// its nonzero-support bipartite graph carries a 1. Rows are visited in
/// order, then columns; ties go to the lower index.
pub fn normalize_on_forest<F: Field>(a: &crate::linalg::Matrix<F>) -> crate::linalg::Matrix<F> {
    let (r, c) = (a.rows(), a.cols());
    let mut rs: Vec<Option<F>> = vec![None; r];
    let mut cs: Vec<Option<F>> = vec![None; c];
    for root in 0..r {
        if rs[root].is_some() {
            continue;
        }
        rs[root] = Some(F::one());
        let mut queue = VecDeque::new();
        queue.push_back((true, root));
        while let Some((is_row, v)) = queue.pop_front() {
            if is_row {
                let s = rs[v].expect("scaled");
                for j in 0..c {
                    if cs[j].is_none() && !a[(v, j)].is_zero() {
                        cs[j] = Some((s * a[(v, j)]).inverse().expect("nonzero"));
                        queue.push_back((false, j));
                    }
                }
            } else {
                let s = cs[v].expect("scaled");
                for i in 0..r {
                    if rs[i].is_none() && !a[(i, v)].is_zero() {
                        rs[i] = Some((s * a[(i, v)]).inverse().expect("nonzero"));
                        queue.push_back((true, i));
                    }
                }
            }
        }
    }
    let mut out = a.clone();
    for i in 0..r {
        for j in 0..c {
            out[(i, j)] = a[(i, j)] * rs[i].unwrap_or(F::one()) * cs[j].unwrap_or(F::one());
        }
    }
    out
}

/// Whether two standard-form representations of the same matroid over the
/// same basis differ only by row and column scaling.
pub fn reps_equivalent<F: Field>(a: &LinearMatroid<F>, b: &LinearMatroid<F>) -> Result<bool, EquivalenceError> {
    if a.labels() != b.labels() || a.basis_columns() != b.basis_columns() {
        return Err(EquivalenceError::DifferentFrames);
    }
    if a.table() != b.table() {
        return Err(EquivalenceError::DifferentMatroids);
    }
    Ok(normalize_on_forest(&a.reduced_matrix()) == normalize_on_forest(&b.reduced_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Gf5;
    use crate::catalog;
    use crate::linalg::Matrix;

    #[test]
    fn self_isomorphism_and_rank_mismatch() {
        let u = catalog::uniform::<Gf5>(2, 5).unwrap();
        let phi = are_isomorphic(&u, &u).unwrap();
        assert_eq!(phi.len(), 5);
        assert!(are_isomorphic(&u, &u.dual()).is_none());
    }

    #[test]
    fn k4_is_wheel3() {
        let (w, _, _) = catalog::wheel::<Gf5>(3).unwrap();
        let k4 = catalog::graphic::<Gf5>(&catalog::Graph::complete(4));
        let phi = are_isomorphic(&k4, &w).expect("isomorphic");
        // brute-force check: the bijection maps every circuit of K4 to a circuit of W3
        for c in k4.table().circuits() {
            let img = mask_elements(c).map(|i| w.index_of(&phi[k4.label(i)]).unwrap()).fold(0, |acc, j| acc | bit(j));
            assert!(w.table().is_circuit(img));
        }
    }

    #[test]
    fn dedup_merges_relabelings() {
        let f7 = catalog::fano();
        let map: BTreeMap<String, String> = f7.labels().iter().map(|l| (l.clone(), format!("x{l}"))).collect();
        let g = f7.relabel(&map).unwrap();
        assert_eq!(dedup(vec![f7.clone(), g]).len(), 1);
        assert!(dedup::<Gf5>(Vec::new()).is_empty());
    }

    #[test]
    fn scaled_and_row_operated_reps_are_equivalent() {
        let u = catalog::uniform::<Gf5>(2, 5).unwrap();
        let mut a = u.reduced_matrix();
        a.scale_column(1, Gf5::new(3));
        a.scale_row(0, Gf5::new(2));
        let v = LinearMatroid::from_matrix(a, u.labels().to_vec()).unwrap();
        assert!(reps_equivalent(&u, &v).unwrap());
        let other = LinearMatroid::from_matrix(
            Matrix::from_rows(vec![
                vec![Gf5::new(1), Gf5::new(1), Gf5::new(1)],
                vec![Gf5::new(1), Gf5::new(3), Gf5::new(2)],
            ]),
            u.labels().to_vec(),
        )
        .unwrap();
        assert!(!reps_equivalent(&u, &other).unwrap());
        let bad = LinearMatroid::from_matrix(
            Matrix::from_rows(vec![
                vec![Gf5::new(1), Gf5::new(1), Gf5::new(1)],
                vec![Gf5::new(1), Gf5::new(1), Gf5::new(2)],
            ]),
            u.labels().to_vec(),
        )
        .unwrap();
        assert_eq!(reps_equivalent(&u, &bad), Err(EquivalenceError::DifferentMatroids));
    }
}
