//! Small dense matrices and exact elimination.

use std::fmt;

use crate::algebra::{Field, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix from columns, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// Coordinate projection (identity for fields).
    pub fn project(&self, k: usize) -> Matrix<S::Coord> {
        self.map(|x| x.coord(k))
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)];
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            m.data[ii * self.cols..(ii + 1) * self.cols].copy_from_slice(self.row(i));
        }
        m
    }

    pub fn push_column(&mut self, col: &[S]) {
        assert_eq!(col.len(), self.rows);
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(col[i]);
        }
        self.cols += 1;
        self.data = data;
    }

    pub fn push_row(&mut self, row: &[S]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn scale_row(&mut self, i: usize, c: S) {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)] * c;
        }
    }

    pub fn scale_column(&mut self, j: usize, c: S) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)] * c;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// row[target] -= c * row[src]
    pub fn add_row_multiple(&mut self, target: usize, src: usize, c: S) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(target, j)] = self[(target, j)] - c * v;
        }
    }

    /// Pivots on the unit entry at `(i, j)`, clearing the rest of column `j`.
    pub fn pivot(&mut self, i: usize, j: usize) -> bool {
        let Some(inv) = self[(i, j)].inverse() else {
            return false;
        };
        self.scale_row(i, inv);
        for k in 0..self.rows {
            if k != i {
                let c = self[(k, j)];
                if !c.is_zero() {
                    self.add_row_multiple(k, i, c);
                }
            }
        }
        true
    }

    /// Reduced row echelon form using unit pivots only. Returns the pivot
    /// columns, or `None` when some column has nonzero entries below the
    /// current pivot row but none of them is a unit (possible only over the
    /// product ring).
    pub fn rref(&mut self) -> Option<Vec<usize>> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for j in 0..self.cols {
            if row == self.rows {
                break;
            }
            let unit = (row..self.rows).find(|&i| self[(i, j)].is_unit());
            match unit {
                Some(p) => {
                    self.swap_rows(row, p);
                    self.pivot(row, j);
                    pivots.push(j);
                    row += 1;
                }
                None => {
                    if (row..self.rows).any(|i| !self[(i, j)].is_zero()) {
                        return None;
                    }
                }
            }
        }
        Some(pivots)
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).fold(S::zero(), |acc, (&a, &b)| acc + a * b)).collect()
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Field-only helpers

/// Rank of a list of vectors over a field.
pub fn rank_of<F: Field>(vectors: &[Vec<F>]) -> usize {
    echelon(vectors).len()
}

/// Echelon basis (pivot, vector with pivot entry 1) of the span of `vectors`.
pub fn echelon<F: Field>(vectors: &[Vec<F>]) -> Vec<(usize, Vec<F>)> {
    let mut basis: Vec<(usize, Vec<F>)> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        if let Some(p) = reduce_against(&basis, &mut w) {
            basis.push((p, w));
        }
    }
    basis
}

/// Reduces `w` against an echelon basis; on a nonzero remainder normalizes
/// it and returns its pivot.
pub fn reduce_against<F: Field>(basis: &[(usize, Vec<F>)], w: &mut [F]) -> Option<usize> {
    for (p, b) in basis {
        let c = w[*p];
        if !c.is_zero() {
            for (x, &y) in w.iter_mut().zip(b) {
                *x = *x - c * y;
            }
        }
    }
    let p = w.iter().position(|x| !x.is_zero())?;
    let inv = w[p].inverse().expect("field element");
    for x in w.iter_mut() {
        *x = *x * inv;
    }
    Some(p)
}

pub fn in_span<F: Field>(basis: &[(usize, Vec<F>)], v: &[F]) -> bool {
    let mut w = v.to_vec();
    reduce_against(basis, &mut w).is_none()
}

/// Basis of `{x : A x = 0}` for an `r x c` matrix given by its columns.
pub fn nullspace<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = a.rref().expect("fields always admit unit pivots");
    let free: Vec<usize> = (0..a.cols()).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); a.cols()];
            x[f] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -a[(row, f)];
            }
            x
        })
        .collect()
}

/// Basis of `span(u) ∩ span(w)`.
pub fn span_intersection<F: Field>(u: &[Vec<F>], w: &[Vec<F>]) -> Vec<Vec<F>> {
    let u = echelon(u).into_iter().map(|(_, v)| v).collect::<Vec<_>>();
    let w = echelon(w).into_iter().map(|(_, v)| v).collect::<Vec<_>>();
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    let dim = u[0].len();
    let mut cols = u.clone();
    cols.extend(w.iter().cloned());
    let m = Matrix::from_columns(dim, &cols);
    let ns = nullspace(&m);
    let vecs: Vec<Vec<F>> = ns
        .iter()
        .map(|x| {
            let mut v = vec![F::zero(); dim];
            for (k, ui) in u.iter().enumerate() {
                for (t, &y) in ui.iter().enumerate() {
                    v[t] = v[t] + x[k] * y;
                }
            }
            v
        })
        .collect();
    echelon(&vecs).into_iter().map(|(_, v)| v).collect()
}

/// Scales a nonzero vector so its first nonzero entry is 1.
pub fn normalize<F: Field>(v: &mut [F]) {
    if let Some(p) = v.iter().position(|x| !x.is_zero()) {
        let inv = v[p].inverse().expect("nonzero");
        for x in v.iter_mut() {
            *x = *x * inv;
        }
    }
}

/// Ranks of all `2^n` column subsets by depth-first incremental elimination.
pub fn subset_ranks_dense<F: Field>(columns: &[Vec<F>]) -> Vec<u8> {
    let n = columns.len();
    let mut ranks = vec![0u8; 1usize << n];
    let mut basis: Vec<(usize, Vec<F>)> = Vec::new();
    fn rec<F: Field>(i: usize, mask: usize, columns: &[Vec<F>], basis: &mut Vec<(usize, Vec<F>)>, ranks: &mut [u8]) {
        if i == columns.len() {
            ranks[mask] = basis.len() as u8;
            return;
        }
        rec(i + 1, mask, columns, basis, ranks);
        let mut w = columns[i].clone();
        match reduce_against(basis, &mut w) {
            Some(p) => {
                basis.push((p, w));
                rec(i + 1, mask | (1 << i), columns, basis, ranks);
                basis.pop();
            }
            None => rec(i + 1, mask | (1 << i), columns, basis, ranks),
        }
    }
    rec(0, 0, columns, &mut basis, &mut ranks);
    ranks
}

/// Bit-packed variant of [`subset_ranks_dense`] for GF(2) columns.
pub fn subset_ranks_binary(columns: &[u64]) -> Vec<u8> {
    let n = columns.len();
    let mut ranks = vec![0u8; 1usize << n];
    let mut basis: Vec<u64> = Vec::with_capacity(64);
    fn rec(i: usize, mask: usize, columns: &[u64], basis: &mut Vec<u64>, ranks: &mut [u8]) {
        if i == columns.len() {
            ranks[mask] = basis.len() as u8;
            return;
        }
        rec(i + 1, mask, columns, basis, ranks);
        let mut w = columns[i];
        for &b in basis.iter() {
            if w & (b & b.wrapping_neg()) != 0 {
                w ^= b;
            }
        }
        if w != 0 {
            basis.push(w);
            rec(i + 1, mask | (1 << i), columns, basis, ranks);
            basis.pop();
        } else {
            rec(i + 1, mask | (1 << i), columns, basis, ranks);
        }
    }
    rec(0, 0, columns, &mut basis, &mut ranks);
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gf2, Gf5};
    use num_traits::Zero;

    fn g5(rows: &[&[u8]]) -> Matrix<Gf5> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Gf5::new(x)).collect()).collect())
    }

    #[test]
    fn rref_and_nullspace() {
        let m = g5(&[&[1, 2, 3], &[2, 4, 2]]);
        let mut a = m.clone();
        let piv = a.rref().unwrap();
        assert_eq!(piv, vec![0, 2]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn binary_and_dense_subset_ranks_agree() {
        let cols: Vec<Vec<Gf2>> = (1u8..8).map(|v| (0..3).map(|i| Gf2::new((v >> i) & 1)).collect()).collect();
        let dense = subset_ranks_dense(&cols);
        let packed: Vec<u64> = (1u64..8).collect();
        assert_eq!(dense, subset_ranks_binary(&packed));
        assert_eq!(dense[0b111_1111], 3);
        // {1,2,3} as vectors 001,010,011 is dependent
        assert_eq!(dense[0b111], 2);
    }

    #[test]
    fn intersection_of_planes() {
        let e = |v: [u8; 3]| v.iter().map(|&x| Gf5::new(x)).collect::<Vec<_>>();
        let u = vec![e([1, 0, 0]), e([0, 1, 0])];
        let w = vec![e([0, 1, 0]), e([0, 0, 1])];
        let int = span_intersection(&u, &w);
        assert_eq!(int, vec![e([0, 1, 0])]);
    }
}
