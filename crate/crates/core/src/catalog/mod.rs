//! Constructors for the concrete matroids used throughout: uniform matroids,
//! wheels, whirls, graphic matroids, grafts, F7, R10 and the canonical
//! product-ring representation of U_{2,5}.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Field, Gf2, Gf5, Gf5x6, Scalar};
use crate::linalg::Matrix;
use crate::matroid::{popcount, LinearMatroid, RankTable};

mod named;
pub use named::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("U({r},{n}) is not representable over {ring}")]
    FieldTooSmall { r: usize, n: usize, ring: crate::algebra::Ring },
    #[error("wheel rank must be at least 2, got {0}")]
    WheelTooSmall(usize),
    #[error("whirls are not binary")]
    WhirlOverGf2,
    #[error("graft requires a connected graph")]
    Disconnected,
    #[error("graft terminal set is empty or names an unknown vertex")]
    BadTerminals,
}

fn letter_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("e{i}") }).collect()
}

/// `U_{r,n}` over `S`, labelled `a, b, c, ...`.
pub fn uniform<S: Scalar>(r: usize, n: usize) -> Result<LinearMatroid<S>, CatalogError> {
    assert!(r <= n, "rank exceeds size");
    let labels = letter_labels(n);
    let m = if r <= 1 || n <= r + 1 {
        let mut a = Matrix::zeros(r, n - r);
        for i in 0..r {
            for j in 0..n - r {
                a[(i, j)] = S::one();
            }
        }
        LinearMatroid::from_matrix(a, labels).expect("distinct labels")
    } else {
        // Vandermonde columns (1, x, .., x^{r-1}) for distinct x, then the
        // point at infinity
        let elems = <S::Coord as Field>::elements();
        if n > elems.len() + 1 {
            return Err(CatalogError::FieldTooSmall { r, n, ring: S::RING });
        }
        let mut cols: Vec<Vec<S>> = Vec::new();
        for &x in elems.iter().take(n) {
            let mut col = Vec::with_capacity(r);
            let mut p = S::Coord::one();
            for _ in 0..r {
                col.push(S::diagonal(p));
                p = p * x;
            }
            cols.push(col);
        }
        if cols.len() < n {
            let mut inf = vec![S::zero(); r];
            inf[r - 1] = S::one();
            cols.push(inf);
        }
        LinearMatroid::from_columns_matrix(Matrix::from_columns(r, &cols), labels).expect("field matrix")
    };
    let expected = RankTable::from_fn(n, |x| popcount(x).min(r));
    if m.table() != &expected {
        return Err(CatalogError::FieldTooSmall { r, n, ring: S::RING });
    }
    Ok(m)
}

/// Spoke and rim labels of a wheel: `s1..sn`, `r1..rn`, with triangles
/// `{s_i, r_i, s_{i+1}}`.
pub fn wheel_labels(n: usize) -> (Vec<String>, Vec<String>) {
    ((1..=n).map(|i| format!("s{i}")).collect(), (1..=n).map(|i| format!("r{i}")).collect())
}

fn wheel_like<S: Scalar>(n: usize, twist: S) -> LinearMatroid<S> {
    let (spokes, rims) = wheel_labels(n);
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let mut s = vec![S::zero(); n];
        s[i] = S::one();
        let mut r = vec![S::zero(); n];
        r[i] = S::one();
        let next = (i + 1) % n;
        r[next] = if next == 0 { r[next] - twist } else { r[next] - S::one() };
        cols.push(s);
        cols.push(r);
        labels.push(spokes[i].clone());
        labels.push(rims[i].clone());
    }
    LinearMatroid::from_columns_matrix(Matrix::from_columns(n, &cols), labels).expect("unit pivots")
}

/// The rank-`n` wheel as the signed incidence matroid of the wheel graph
/// (hub row dropped). Ground order is `s1 r1 s2 r2 ... sn rn`.
pub fn wheel<S: Scalar>(n: usize) -> Result<(LinearMatroid<S>, Vec<String>, Vec<String>), CatalogError> {
    if n < 2 {
        return Err(CatalogError::WheelTooSmall(n));
    }
    let (spokes, rims) = wheel_labels(n);
    Ok((wheel_like(n, S::one()), spokes, rims))
}

/// The rank-`n` whirl: the wheel with its last rim element freed.
pub fn whirl<S: Scalar>(n: usize) -> Result<LinearMatroid<S>, CatalogError> {
    if n < 2 {
        return Err(CatalogError::WheelTooSmall(n));
    }
    if S::Coord::ORDER == 2 {
        return Err(CatalogError::WhirlOverGf2);
    }
    let two = S::one() + S::one();
    Ok(wheel_like(n, two))
}

/// A multigraph with labelled vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>) -> Self {
        Graph { vertices, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: impl Into<String>) {
        assert!(u < self.vertices.len() && v < self.vertices.len(), "unknown endpoint");
        self.edges.push((u, v, label.into()));
    }

    /// `K_k` with vertices `v0..` and edges `uv` labelled `"i-j"`.
    pub fn complete(k: usize) -> Self {
        let mut g = Graph::new((0..k).map(|i| format!("v{i}")).collect());
        for i in 0..k {
            for j in i + 1..k {
                g.add_edge(i, j, format!("{i}-{j}"));
            }
        }
        g
    }

    pub fn cycle(k: usize) -> Self {
        let mut g = Graph::new((0..k).map(|i| format!("v{i}")).collect());
        for i in 0..k {
            g.add_edge(i, (i + 1) % k, format!("{}-{}", i, (i + 1) % k));
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn incidence<S: Scalar>(&self, signed: bool) -> Vec<Vec<S>> {
        let n = self.vertices.len();
        self.edges
            .iter()
            .map(|&(u, v, _)| {
                let mut col = vec![S::zero(); n];
                if u != v {
                    col[u] = S::one();
                    col[v] = if signed { -S::one() } else { S::one() };
                }
                col
            })
            .collect()
    }
}

/// Cycle matroid via the signed vertex-edge incidence matrix; redundant rows
/// (one per component) vanish during row reduction.
pub fn graphic<S: Scalar>(g: &Graph) -> LinearMatroid<S> {
    let cols = g.incidence::<S>(true);
    let labels = g.edges.iter().map(|(_, _, l)| l.clone()).collect();
    LinearMatroid::from_columns_matrix(Matrix::from_columns(g.vertices.len(), &cols), labels)
        .expect("incidence matrices are totally unimodular")
}

/// A graph together with a set of terminal vertices and a label for the
/// graft element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graft {
    pub graph: Graph,
    pub terminals: Vec<usize>,
    pub graft_label: String,
}

/// Binary matroid of the incidence matrix augmented by the characteristic
/// vector of the terminal set.
pub fn graft(g: &Graft) -> Result<LinearMatroid<Gf2>, CatalogError> {
    if !g.graph.is_connected() {
        return Err(CatalogError::Disconnected);
    }
    let n = g.graph.vertices.len();
    if g.terminals.is_empty() || g.terminals.iter().any(|&t| t >= n) {
        return Err(CatalogError::BadTerminals);
    }
    let mut cols = g.graph.incidence::<Gf2>(false);
    let mut t = vec![Gf2::zero(); n];
    for &v in &g.terminals {
        t[v] = t[v] + Gf2::one();
    }
    cols.push(t);
    let mut labels: Vec<String> = g.graph.edges.iter().map(|(_, _, l)| l.clone()).collect();
    labels.push(g.graft_label.clone());
    LinearMatroid::from_columns_matrix(Matrix::from_columns(n, &cols), labels).map_err(|_| CatalogError::BadTerminals)
}

fn binary_columns(labels: &[&str], vecs: &[[u8; 3]]) -> LinearMatroid<Gf2> {
    let cols: Vec<Vec<Gf2>> = vecs.iter().map(|v| v.iter().map(|&x| Gf2::new(x)).collect()).collect();
    LinearMatroid::from_columns_matrix(Matrix::from_columns(3, &cols), labels.iter().map(|s| s.to_string()).collect())
        .expect("binary")
}

/// The Fano plane on `{0,1,2,6,7,8,9}`: the lines through 9 are `{2,6,9}`,
/// `{8,0,9}`, `{1,7,9}`, the set `{2,8,1}` is a line and `{6,0,7}` is not.
pub fn fano() -> LinearMatroid<Gf2> {
    binary_columns(
        &["0", "1", "2", "6", "7", "8", "9"],
        &[[0, 1, 1], [1, 1, 0], [1, 0, 0], [1, 0, 1], [1, 1, 1], [0, 1, 0], [0, 0, 1]],
    )
}

/// `[I_5 | A]` with `A` the circulant on `(1,1,0,0,1)`, labelled `0..9`.
pub fn r10() -> LinearMatroid<Gf2> {
    let c = [1u8, 1, 0, 0, 1];
    let mut a = Matrix::zeros(5, 5);
    for i in 0..5 {
        for j in 0..5 {
            a[(i, j)] = Gf2::new(c[(j + 5 - i) % 5]);
        }
    }
    LinearMatroid::from_matrix(a, (0..10).map(|i| i.to_string()).collect()).expect("ten labels")
}

/// The product-ring representation of U_{2,5} on `{a,b,c,d,e}` whose six
/// projections run through the six ordered pairs of distinct values in
/// {2,3,4}.
pub fn canonical_u25() -> LinearMatroid<Gf5x6> {
    let one = Gf5x6::one();
    let x = Gf5x6::new([2, 2, 3, 3, 4, 4]);
    let y = Gf5x6::new([3, 4, 2, 4, 2, 3]);
    let a = Matrix::from_rows(vec![vec![one, one, one], vec![one, x, y]]);
    LinearMatroid::from_matrix(a, letter_labels(5)).expect("five labels")
}

/// Diagonal lift of a GF(5) matrix into the product ring.
pub fn lift_diagonal(m: &LinearMatroid<Gf5>) -> LinearMatroid<Gf5x6> {
    m.map_scalars(Gf5x6::diagonal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::matroid::ElementSet;

    #[test]
    fn uniform_examples() {
        let u = uniform::<Gf5>(2, 5).unwrap();
        assert!(u.is_3connected());
        assert!(matches!(uniform::<Gf2>(2, 4), Err(CatalogError::FieldTooSmall { .. })));
        let free = uniform::<Gf2>(3, 3).unwrap();
        assert_eq!(free.table().circuits().len(), 0);
        assert!(uniform::<Gf5>(2, 6).is_ok());
        assert!(uniform::<Gf5>(2, 7).is_err());
    }

    #[test]
    fn binary_has_no_four_point_line() {
        // oracle: no four pairwise independent nonzero vectors in GF(2)^2
        let nonzero = [1u8, 2, 3];
        assert!(nonzero.len() < 4);
    }

    #[test]
    fn wheel_examples() {
        let (w3, spokes, rims) = wheel::<Gf2>(3).unwrap();
        assert_eq!((w3.size(), w3.rank()), (6, 3));
        assert_eq!(w3.triangles().len(), 4);
        assert!(w3.is_3connected());
        for i in 0..3 {
            let t: ElementSet = [spokes[i].as_str(), rims[i].as_str(), spokes[(i + 1) % 3].as_str()].into();
            assert!(w3.triangles().contains(&t));
        }
        let (w2, _, _) = wheel::<Gf5>(2).unwrap();
        assert_eq!((w2.size(), w2.rank()), (4, 2));
        assert_eq!(w2.rank_of(&["r1", "r2"].into()).unwrap(), 1);
        assert!(!w2.is_3connected());
        assert!(matches!(wheel::<Gf2>(1), Err(CatalogError::WheelTooSmall(1))));
        for n in 3..6 {
            assert!(wheel::<Gf5>(n).unwrap().0.is_3connected());
            assert!(wheel::<Gf5>(n).unwrap().0.table().is_wheel_or_whirl());
            let wh = whirl::<Gf5>(n).unwrap();
            assert!(wh.table().is_wheel_or_whirl());
            assert!(!is_isomorphic(&wh, &wheel::<Gf5>(n).unwrap().0));
        }
    }

    #[test]
    fn graphic_examples() {
        let tri = graphic::<Gf5>(&Graph::cycle(3));
        assert_eq!(tri.table(), &RankTable::from_fn(3, |x| popcount(x).min(2)));
        let mut tree = Graph::new((0..4).map(|i| format!("v{i}")).collect());
        tree.add_edge(0, 1, "a");
        tree.add_edge(1, 2, "b");
        tree.add_edge(1, 3, "c");
        let t = graphic::<Gf2>(&tree);
        assert_eq!((t.rank(), t.table().circuits().len()), (3, 0));
        assert!(is_isomorphic(&graphic::<Gf2>(&Graph::complete(4)), &wheel::<Gf2>(3).unwrap().0));
    }

    #[test]
    fn graft_examples() {
        let g = Graft { graph: Graph::complete(4), terminals: vec![0, 1, 2, 3], graft_label: "t".into() };
        let m = graft(&g).unwrap();
        assert!(is_isomorphic(&m, &fano()));
        let g2 = Graft { graph: Graph::complete(4), terminals: vec![0, 1], graft_label: "t".into() };
        let m2 = graft(&g2).unwrap();
        assert_eq!(m2.rank_of(&["t", "0-1"].into()).unwrap(), 1);
        let restricted = m.delete_labels(&["t"]).unwrap();
        assert_eq!(restricted.table(), graphic::<Gf2>(&Graph::complete(4)).table());
        let mut disconnected = Graph::complete(3);
        disconnected.vertices.push("lonely".into());
        let bad = Graft { graph: disconnected, terminals: vec![0], graft_label: "t".into() };
        assert!(matches!(graft(&bad), Err(CatalogError::Disconnected)));
    }

    #[test]
    fn fano_labelling_evidence() {
        let f = fano();
        for t in [["2", "6", "9"], ["8", "0", "9"], ["1", "7", "9"], ["2", "8", "1"]] {
            assert_eq!(f.rank_of(&t.into()).unwrap(), 2);
        }
        assert_eq!(f.rank_of(&["6", "0", "7"].into()).unwrap(), 3);
        assert_eq!(f.triangles().len(), 7);
    }

    #[test]
    fn canonical_u25_is_uniform_in_every_coordinate() {
        let u = canonical_u25();
        let expected = RankTable::from_fn(5, |x| popcount(x).min(2));
        for k in 0..6 {
            assert_eq!(u.projection(k).table(), &expected);
        }
    }
}
