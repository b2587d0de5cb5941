//! Represented matroids.
//!
//! A [`LinearMatroid`] stores a full-row-rank `r x n` matrix in standard form:
//! for every row `i` the column `basis[i]` is the `i`-th unit vector. Columns
//! follow the ground-set order given by `labels`. Minors keep the relative
//! order of surviving elements; extensions append.

mod table;

pub use table::{bit, mask_elements, mask_of, popcount, subsets_of_size, Mask, RankTable, MAX_TABLE_ELEMENTS};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::algebra::{Field, Ring, Scalar};
use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("matrix has {cols} columns but {labels} labels were given")]
    LabelCount { cols: usize, labels: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("representation has a nonzero non-unit pivot; not a valid product representation")]
    NonUnitPivot,
    #[error("{0} elements exceed the rank-table limit")]
    TooLarge(usize),
}

/// A set of element labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(pub BTreeSet<String>);

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }
    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }
}

impl<S: AsRef<str>> FromIterator<S> for ElementSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ElementSet(iter.into_iter().map(|s| s.as_ref().to_string()).collect())
    }
}

impl<const N: usize> From<[&str; N]> for ElementSet {
    fn from(v: [&str; N]) -> Self {
        v.iter().collect()
    }
}

/// Maps each label removed by simplification to the label it was merged into
/// (`None` for loops or coloops).
pub type LabelMap = BTreeMap<String, Option<String>>;

pub struct LinearMatroid<S: Scalar> {
    labels: Vec<String>,
    matrix: Matrix<S>,
    basis: Vec<usize>,
    table: OnceLock<Arc<RankTable>>,
}

impl<S: Scalar> Clone for LinearMatroid<S> {
    fn clone(&self) -> Self {
        let table = OnceLock::new();
        if let Some(t) = self.table.get() {
            let _ = table.set(t.clone());
        }
        LinearMatroid { labels: self.labels.clone(), matrix: self.matrix.clone(), basis: self.basis.clone(), table }
    }
}

impl<S: Scalar> std::fmt::Debug for LinearMatroid<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinearMatroid<{}>(r={}, E={:?})\n{:?}", S::RING, self.rank(), self.labels, self.matrix)
    }
}

fn check_labels(labels: &[String]) -> Result<(), MatroidError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(MatroidError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl<S: Scalar> LinearMatroid<S> {
    /// Builds the matroid of `[I | reduced]`; the first `r` labels name the
    /// identity columns.
    pub fn from_matrix(reduced: Matrix<S>, labels: Vec<String>) -> Result<Self, MatroidError> {
        let r = reduced.rows();
        let n = r + reduced.cols();
        if labels.len() != n {
            return Err(MatroidError::LabelCount { cols: n, labels: labels.len() });
        }
        check_labels(&labels)?;
        let mut full = Matrix::zeros(r, n);
        for i in 0..r {
            full[(i, i)] = S::one();
            for j in 0..reduced.cols() {
                full[(i, r + j)] = reduced[(i, j)];
            }
        }
        Ok(LinearMatroid { labels, matrix: full, basis: (0..r).collect(), table: OnceLock::new() })
    }

    /// Builds the column matroid of an arbitrary matrix (zero rows allowed).
    pub fn from_columns_matrix(m: Matrix<S>, labels: Vec<String>) -> Result<Self, MatroidError> {
        if labels.len() != m.cols() {
            return Err(MatroidError::LabelCount { cols: m.cols(), labels: labels.len() });
        }
        check_labels(&labels)?;
        let mut a = m;
        let pivots = a.rref().ok_or(MatroidError::NonUnitPivot)?;
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let matrix = a.select_rows(&keep);
        Ok(LinearMatroid { labels, matrix, basis: pivots, table: OnceLock::new() })
    }

    pub fn free(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self::from_matrix(Matrix::zeros(n, 0), labels).expect("distinct labels")
    }

    pub fn ring(&self) -> Ring {
        S::RING
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MatroidError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| MatroidError::UnknownLabel(label.to_string()))
    }

    pub fn mask_of_labels<'a>(&self, labels: impl IntoIterator<Item = &'a String>) -> Result<Mask, MatroidError> {
        labels.into_iter().try_fold(0, |acc, l| Ok(acc | bit(self.index_of(l)?)))
    }

    pub fn set_of(&self, m: Mask) -> ElementSet {
        ElementSet(mask_elements(m).map(|i| self.labels[i].clone()).collect())
    }

    pub fn full_matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn basis_columns(&self) -> &[usize] {
        &self.basis
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        self.matrix.column(j)
    }

    pub fn nonbasis_columns(&self) -> Vec<usize> {
        (0..self.size()).filter(|j| !self.basis.contains(j)).collect()
    }

    /// The `r x (n-r)` matrix `A` of the standard form `[I | A]`, with rows in
    /// basis order and columns in ground order.
    pub fn reduced_matrix(&self) -> Matrix<S> {
        self.matrix.select_columns(&self.nonbasis_columns())
    }

    pub fn table(&self) -> &RankTable {
        self.table.get_or_init(|| Arc::new(self.compute_table()))
    }

    fn compute_table(&self) -> RankTable {
        let n = self.size();
        assert!(n <= MAX_TABLE_ELEMENTS, "{n} elements exceed the rank-table limit");
        let proj = self.matrix.project(0);
        let cols = proj.columns();
        let ranks = <S::Coord as Field>::subset_ranks(&cols);
        RankTable::from_ranks(n, ranks)
    }

    /// Rank of an index set; uses the rank table when it is already built and
    /// eliminates directly otherwise.
    pub fn rank_of_mask(&self, m: Mask) -> usize {
        if let Some(t) = self.table.get() {
            return t.rank_of(m);
        }
        let cols: Vec<Vec<S::Coord>> =
            mask_elements(m).map(|j| self.matrix.column(j).iter().map(|x| x.coord(0)).collect()).collect();
        crate::linalg::rank_of(&cols)
    }

    pub fn rank_of(&self, x: &ElementSet) -> Result<usize, MatroidError> {
        let m = self.mask_of_labels(x.iter())?;
        Ok(self.table().rank_of(m))
    }

    pub fn closure(&self, x: &ElementSet) -> Result<ElementSet, MatroidError> {
        let m = self.mask_of_labels(x.iter())?;
        Ok(self.set_of(self.table().closure(m)))
    }

    /// Coordinate projection; the identity for fields.
    pub fn projection(&self, k: usize) -> LinearMatroid<S::Coord> {
        LinearMatroid {
            labels: self.labels.clone(),
            matrix: self.matrix.project(k),
            basis: self.basis.clone(),
            table: OnceLock::new(),
        }
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(S) -> T) -> LinearMatroid<T> {
        LinearMatroid {
            labels: self.labels.clone(),
            matrix: self.matrix.map(f),
            basis: self.basis.clone(),
            table: OnceLock::new(),
        }
    }

    /// Standard-form dual: `[I | A]` becomes `[-A^T | I]` on the same ground order.
    pub fn dual(&self) -> Self {
        let r = self.rank();
        let n = self.size();
        let nb = self.nonbasis_columns();
        let mut m = Matrix::zeros(n - r, n);
        for (k, &j) in nb.iter().enumerate() {
            m[(k, j)] = S::one();
            for (i, &b) in self.basis.iter().enumerate() {
                m[(k, b)] = -self.matrix[(i, j)];
            }
        }
        let table = OnceLock::new();
        if let Some(t) = self.table.get() {
            let _ = table.set(Arc::new(t.dual()));
        }
        LinearMatroid { labels: self.labels.clone(), matrix: m, basis: nb, table }
    }

    fn remove_column(&mut self, j: usize) {
        let keep: Vec<usize> = (0..self.size()).filter(|&c| c != j).collect();
        self.matrix = self.matrix.select_columns(&keep);
        self.labels.remove(j);
        for b in self.basis.iter_mut() {
            if *b > j {
                *b -= 1;
            }
        }
        self.table = OnceLock::new();
    }

    fn remove_row(&mut self, i: usize) {
        let keep: Vec<usize> = (0..self.rank()).filter(|&r| r != i).collect();
        self.matrix = self.matrix.select_rows(&keep);
        self.basis.remove(i);
        self.table = OnceLock::new();
    }

    fn delete_index(&mut self, j: usize) -> Result<(), MatroidError> {
        if let Some(i) = self.basis.iter().position(|&b| b == j) {
            let partner =
                (0..self.size()).find(|&c| c != j && !self.basis.contains(&c) && !self.matrix[(i, c)].is_zero());
            match partner {
                Some(c) => {
                    if !self.matrix.pivot(i, c) {
                        return Err(MatroidError::NonUnitPivot);
                    }
                    self.basis[i] = c;
                }
                None => self.remove_row(i),
            }
        }
        self.remove_column(j);
        Ok(())
    }

    fn contract_index(&mut self, j: usize) -> Result<(), MatroidError> {
        let row = match self.basis.iter().position(|&b| b == j) {
            Some(i) => Some(i),
            None => {
                match (0..self.rank()).find(|&i| !self.matrix[(i, j)].is_zero()) {
                    None => None, // loop
                    Some(i) => {
                        if !self.matrix.pivot(i, j) {
                            return Err(MatroidError::NonUnitPivot);
                        }
                        self.basis[i] = j;
                        Some(i)
                    }
                }
            }
        };
        if let Some(i) = row {
            self.remove_row(i);
        }
        self.remove_column(j);
        Ok(())
    }

    /// `M \ X`.
    pub fn delete(&self, x: &ElementSet) -> Result<Self, MatroidError> {
        let mut m = self.clone();
        self.mask_of_labels(x.iter())?;
        for l in x.iter() {
            let j = m.index_of(l)?;
            m.delete_index(j)?;
        }
        Ok(m)
    }

    /// `M / X`; elements are contracted in label order.
    pub fn contract(&self, x: &ElementSet) -> Result<Self, MatroidError> {
        let mut m = self.clone();
        self.mask_of_labels(x.iter())?;
        for l in x.iter() {
            let j = m.index_of(l)?;
            m.contract_index(j)?;
        }
        Ok(m)
    }

    pub fn delete_labels(&self, labels: &[&str]) -> Result<Self, MatroidError> {
        self.delete(&labels.iter().collect())
    }

    pub fn contract_labels(&self, labels: &[&str]) -> Result<Self, MatroidError> {
        self.contract(&labels.iter().collect())
    }

    /// `M / contract \ delete` by element indices.
    pub fn minor_by_mask(&self, contract: Mask, delete: Mask) -> Result<Self, MatroidError> {
        let c = self.set_of(contract);
        let d = self.set_of(delete);
        self.contract(&c)?.delete(&d)
    }

    /// Appends a column given in the coordinates of the current rows.
    pub fn extend(&self, column: &[S], label: &str) -> Result<Self, MatroidError> {
        if self.labels.iter().any(|l| l == label) {
            return Err(MatroidError::DuplicateLabel(label.to_string()));
        }
        let mut m = self.clone();
        m.matrix.push_column(column);
        m.labels.push(label.to_string());
        m.table = OnceLock::new();
        Ok(m)
    }

    /// Single-element coextension: extends the dual by `column` (in the dual's
    /// row coordinates) and dualizes back.
    pub fn coextend(&self, column: &[S], label: &str) -> Result<Self, MatroidError> {
        Ok(self.dual().extend(column, label)?.dual())
    }

    /// Adds `label` parallel to the existing element `of`.
    pub fn add_parallel(&self, of: &str, label: &str) -> Result<Self, MatroidError> {
        let j = self.index_of(of)?;
        self.extend(&self.column(j), label)
    }

    /// Adds `label` in series with the existing element `of`.
    pub fn add_series(&self, of: &str, label: &str) -> Result<Self, MatroidError> {
        Ok(self.dual().add_parallel(of, label)?.dual())
    }

    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Result<Self, MatroidError> {
        let labels: Vec<String> =
            self.labels.iter().map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone())).collect();
        check_labels(&labels)?;
        let mut m = self.clone();
        m.labels = labels;
        Ok(m)
    }

    /// Reorders the ground set; `order[k]` is the old index placed at position `k`.
    pub fn reorder(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.size());
        let mut inv = vec![0; order.len()];
        for (k, &o) in order.iter().enumerate() {
            inv[o] = k;
        }
        LinearMatroid {
            labels: order.iter().map(|&o| self.labels[o].clone()).collect(),
            matrix: self.matrix.select_columns(order),
            basis: self.basis.iter().map(|&b| inv[b]).collect(),
            table: OnceLock::new(),
        }
    }

    /// Reduced row echelon form: the basis becomes the lexicographically first
    /// basis in ground order.
    pub fn canonical(&self) -> Result<Self, MatroidError> {
        let mut m = self.matrix.clone();
        let pivots = m.rref().ok_or(MatroidError::NonUnitPivot)?;
        debug_assert_eq!(pivots.len(), self.rank());
        let mut out = self.clone();
        out.matrix = m;
        out.basis = pivots;
        Ok(out)
    }

    /// The standard form over a basis containing the independent set `required`.
    pub fn rebased(&self, required: &[usize]) -> Result<Self, MatroidError> {
        let mut m = self.clone();
        for &j in required {
            if m.basis.contains(&j) {
                continue;
            }
            let row = (0..m.rank())
                .find(|&i| !required.contains(&m.basis[i]) && m.matrix[(i, j)].is_unit())
                .ok_or(MatroidError::NonUnitPivot)?;
            m.matrix.pivot(row, j);
            m.basis[row] = j;
        }
        Ok(m)
    }

    /// Same labels and the same row space after sorting by label.
    pub fn same_labeled(&self, other: &Self) -> bool {
        if self.size() != other.size() || self.rank() != other.rank() {
            return false;
        }
        let order = |m: &Self| {
            let mut idx: Vec<usize> = (0..m.size()).collect();
            idx.sort_by(|&a, &b| m.labels[a].cmp(&m.labels[b]));
            idx
        };
        let a = self.reorder(&order(self)).canonical();
        let b = other.reorder(&order(other)).canonical();
        match (a, b) {
            (Ok(a), Ok(b)) => a.labels == b.labels && a.matrix == b.matrix,
            _ => false,
        }
    }

    /// Removes loops and all but the first element of each parallel class.
    pub fn simplify(&self) -> (Self, LabelMap) {
        let t = self.table();
        let mut map = LabelMap::new();
        let mut remove = t.loops();
        for e in mask_elements(t.loops()) {
            map.insert(self.labels[e].clone(), None);
        }
        for class in t.parallel_classes() {
            for &e in &class[1..] {
                remove |= bit(e);
                map.insert(self.labels[e].clone(), Some(self.labels[class[0]].clone()));
            }
        }
        let out = self.delete(&self.set_of(remove)).expect("known labels");
        (out, map)
    }

    /// Removes coloops and all but the first element of each series class.
    pub fn cosimplify(&self) -> (Self, LabelMap) {
        let (d, map) = self.dual().simplify();
        (d.dual(), map)
    }

    pub fn is_3connected(&self) -> bool {
        self.table().is_3connected()
    }

    /// Iterates simplification and cosimplification to a fixed point and
    /// tests the result for 3-connectivity (or fewer than four elements).
    pub fn is_3connected_up_to_sp(&self) -> bool {
        let mut m = self.clone();
        loop {
            let (s, m1) = m.simplify();
            let (c, m2) = s.cosimplify();
            if m1.is_empty() && m2.is_empty() {
                break;
            }
            m = c;
        }
        m.size() < 4 || m.is_3connected()
    }

    pub fn triangles(&self) -> Vec<ElementSet> {
        self.table().triangles().into_iter().map(|m| self.set_of(m)).collect()
    }

    pub fn triads(&self) -> Vec<ElementSet> {
        self.table().triads().into_iter().map(|m| self.set_of(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gf2, Gf5, Gf5x6};
    use crate::catalog;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn u25() -> LinearMatroid<Gf5> {
        let a = Matrix::from_rows(vec![
            vec![Gf5::new(1), Gf5::new(1), Gf5::new(1)],
            vec![Gf5::new(1), Gf5::new(2), Gf5::new(3)],
        ]);
        LinearMatroid::from_matrix(a, labels(5)).unwrap()
    }

    #[test]
    fn free_matroid_from_empty_matrix() {
        let m = LinearMatroid::<Gf2>::from_matrix(Matrix::zeros(3, 0), labels(3)).unwrap();
        assert_eq!(m.rank(), 3);
        assert_eq!(m.table().circuits().len(), 0);
    }

    #[test]
    fn fano_from_all_ones() {
        let ones = Matrix::from_rows(vec![
            vec![Gf2::new(0), Gf2::new(1), Gf2::new(1), Gf2::new(1)],
            vec![Gf2::new(1), Gf2::new(0), Gf2::new(1), Gf2::new(1)],
            vec![Gf2::new(1), Gf2::new(1), Gf2::new(0), Gf2::new(1)],
        ]);
        let f7 = LinearMatroid::from_matrix(ones, labels(7)).unwrap();
        // brute force over 3-subsets: dependent triples of distinct nonzero vectors
        let cols: Vec<u8> =
            (0..7).map(|j| (0..3).fold(0, |acc, i| acc | (f7.full_matrix()[(i, j)].value() << i))).collect();
        let mut brute = 0;
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    if cols[a] ^ cols[b] ^ cols[c] == 0 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 7);
        assert_eq!(f7.triangles().len(), brute);
    }

    #[test]
    fn label_mismatch_is_an_error() {
        let a = Matrix::<Gf5>::zeros(2, 2);
        assert!(matches!(LinearMatroid::from_matrix(a.clone(), labels(3)), Err(MatroidError::LabelCount { .. })));
        let dup = vec!["a".into(), "a".into(), "b".into(), "c".into()];
        assert!(matches!(LinearMatroid::from_matrix(a, dup), Err(MatroidError::DuplicateLabel(_))));
    }

    #[test]
    fn uniform_minors_and_dual() {
        let m = u25();
        assert_eq!(m.rank_of(&["0", "1", "2"].into()).unwrap(), 2);
        assert_eq!(m.rank_of(&ElementSet::new()).unwrap(), 0);
        let d = m.delete_labels(&["4"]).unwrap();
        assert_eq!((d.rank(), d.size()), (2, 4));
        assert_eq!(d.table(), &RankTable::from_fn(4, |x| popcount(x).min(2)));
        let c = m.contract_labels(&["4"]).unwrap();
        assert_eq!(c.table(), &RankTable::from_fn(4, |x| popcount(x).min(1)));
        let du = m.dual();
        assert_eq!(du.table(), &RankTable::from_fn(5, |x| popcount(x).min(3)));
        assert!(m.rank_of(&["9"].into()).is_err());
        assert_eq!(m.closure(&["0", "1"].into()).unwrap().len(), 5);
    }

    #[test]
    fn dual_is_an_exact_involution() {
        let m = u25();
        let dd = m.dual().dual();
        assert_eq!(dd.full_matrix(), m.full_matrix());
        assert_eq!(dd.labels(), m.labels());
    }

    #[test]
    fn contraction_matches_dual_deletion() {
        let m = catalog::fano();
        for l in m.labels() {
            let set: ElementSet = [l.as_str()].into();
            let a = m.contract(&set).unwrap();
            let b = m.dual().delete(&set).unwrap().dual();
            assert!(a.same_labeled(&b));
        }
    }

    #[test]
    fn simplify_removes_parallel_and_loops() {
        let m = u25();
        let (s, map) = m.simplify();
        assert!(map.is_empty());
        assert_eq!(s.size(), 5);
        let p = m.add_parallel("0", "p").unwrap().extend(&[Gf5::new(0), Gf5::new(0)], "z").unwrap();
        let (s, map) = p.simplify();
        assert_eq!(s.size(), 5);
        assert_eq!(map.get("p"), Some(&Some("0".to_string())));
        assert_eq!(map.get("z"), Some(&None));
        assert!(!p.is_3connected());
        assert!(p.is_3connected_up_to_sp());
    }

    #[test]
    fn product_ring_projection_keeps_basis() {
        let m = catalog::canonical_u25();
        let p: LinearMatroid<Gf5> = m.projection(3);
        assert_eq!(p.table(), m.table());
        let _unused: Option<Gf5x6> = None;
    }
}
