//! The line-oriented matroid file format.
//!
//! ```text
//! fragile-matroid v1
//! ring gf5x6
//! rank 2 cols 5
//! a b c d e
//! 1:1:1:1:1:1 1:1:1:1:1:1 1:1:1:1:1:1
//! 1:1:1:1:1:1 2:2:3:3:4:4 3:4:2:4:2:3
//! sha256 <hex digest of every preceding byte>
//! ```
//!
//! The first `rank` labels name the identity columns of `[I | A]`; the matrix
//! lines hold the rows of `A`. Writers always emit the canonical standard
//! form (reduced row echelon form in ground order).

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{Gf2, Gf5, Gf5x6, Ring, Scalar};
use crate::linalg::Matrix;
use crate::matroid::{LinearMatroid, MatroidError};

pub const MAGIC: &str = "fragile-matroid v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("checksum mismatch")]
    Checksum,
    #[error("expected ring {expected}, file has {found}")]
    WrongRing { expected: Ring, found: Ring },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn body<S: Scalar>(m: &LinearMatroid<S>) -> String {
    let c = m.canonical().unwrap_or_else(|_| m.clone());
    let basis = c.basis_columns().to_vec();
    let nonbasis = c.nonbasis_columns();
    let mut labels: Vec<&str> = basis.iter().map(|&b| c.label(b)).collect();
    labels.extend(nonbasis.iter().map(|&j| c.label(j)));
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("ring {}\n", S::RING));
    out.push_str(&format!("rank {} cols {}\n", c.rank(), c.size()));
    out.push_str(&labels.join(" "));
    out.push('\n');
    let a = c.reduced_matrix();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Canonical serialization without the checksum line; used as a sort key.
pub fn canonical_key<S: Scalar>(m: &LinearMatroid<S>) -> String {
    body(m)
}

pub fn write_matroid<S: Scalar>(m: &LinearMatroid<S>) -> String {
    let mut out = body(m);
    let digest = hex::encode(Sha256::digest(out.as_bytes()));
    out.push_str(&format!("sha256 {digest}\n"));
    out
}

/// Header information of a matroid file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub ring: Ring,
    pub rank: usize,
    pub cols: usize,
}

fn malformed(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, msg: msg.into() }
}

pub fn read_header(text: &str) -> Result<Header, FormatError> {
    let lines: Vec<&str> = text.split('\n').collect();
    if lines.first() != Some(&MAGIC) {
        return Err(malformed(1, "missing magic line"));
    }
    let ring = lines
        .get(1)
        .and_then(|l| l.strip_prefix("ring "))
        .ok_or_else(|| malformed(2, "expected `ring <name>`"))?
        .parse::<Ring>()
        .map_err(|e| malformed(2, e.to_string()))?;
    let dims: Vec<&str> = lines.get(2).map(|l| l.split(' ').collect()).unwrap_or_default();
    let (rank, cols) = match dims.as_slice() {
        ["rank", r, "cols", c] => {
            (r.parse().map_err(|_| malformed(3, "bad rank"))?, c.parse().map_err(|_| malformed(3, "bad column count"))?)
        }
        _ => return Err(malformed(3, "expected `rank r cols n`")),
    };
    Ok(Header { ring, rank, cols })
}

pub fn read_matroid<S: Scalar>(text: &str) -> Result<LinearMatroid<S>, FormatError> {
    let Some(body_end) = text.rfind("sha256 ") else {
        return Err(malformed(0, "missing checksum line"));
    };
    let (payload, tail) = text.split_at(body_end);
    let digest = tail.trim_end_matches('\n').strip_prefix("sha256 ").unwrap_or("");
    if hex::encode(Sha256::digest(payload.as_bytes())) != digest {
        return Err(FormatError::Checksum);
    }
    let header = read_header(payload)?;
    if header.ring != S::RING {
        return Err(FormatError::WrongRing { expected: S::RING, found: header.ring });
    }
    let lines: Vec<&str> = payload.strip_suffix('\n').unwrap_or(payload).split('\n').collect();
    let (r, n) = (header.rank, header.cols);
    if r > n {
        return Err(malformed(3, "rank exceeds column count"));
    }
    if lines.len() != 4 + r {
        return Err(malformed(lines.len(), format!("expected {} lines before checksum", 4 + r)));
    }
    let labels: Vec<String> = if n == 0 { Vec::new() } else { lines[3].split(' ').map(str::to_string).collect() };
    if labels.len() != n || labels.iter().any(String::is_empty) {
        return Err(malformed(4, format!("expected {n} labels")));
    }
    let mut rows = Vec::with_capacity(r);
    for (i, line) in lines[4..].iter().enumerate() {
        let entries: Vec<&str> = if n == r { Vec::new() } else { line.split(' ').collect() };
        if entries.len() != n - r {
            return Err(malformed(5 + i, format!("expected {} entries", n - r)));
        }
        let row = entries
            .iter()
            .map(|t| S::parse_token(t).ok_or_else(|| malformed(5 + i, format!("bad entry {t:?}"))))
            .collect::<Result<Vec<S>, _>>()?;
        rows.push(row);
    }
    let a = if r == 0 { Matrix::zeros(0, n) } else { Matrix::from_rows(rows) };
    Ok(LinearMatroid::from_matrix(a, labels)?)
}

/// A matroid read from a file of unknown ring.
#[derive(Clone, Debug)]
pub enum AnyMatroid {
    Gf2(LinearMatroid<Gf2>),
    Gf5(LinearMatroid<Gf5>),
    Gf5x6(LinearMatroid<Gf5x6>),
}

impl AnyMatroid {
    pub fn read(text: &str) -> Result<Self, FormatError> {
        Ok(match read_header(text)?.ring {
            Ring::Gf2 => AnyMatroid::Gf2(read_matroid(text)?),
            Ring::Gf5 => AnyMatroid::Gf5(read_matroid(text)?),
            Ring::Gf5x6 => AnyMatroid::Gf5x6(read_matroid(text)?),
        })
    }

    pub fn write(&self) -> String {
        match self {
            AnyMatroid::Gf2(m) => write_matroid(m),
            AnyMatroid::Gf5(m) => write_matroid(m),
            AnyMatroid::Gf5x6(m) => write_matroid(m),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AnyMatroid::Gf2(m) => m.size(),
            AnyMatroid::Gf5(m) => m.size(),
            AnyMatroid::Gf5x6(m) => m.size(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            AnyMatroid::Gf2(m) => m.rank(),
            AnyMatroid::Gf5(m) => m.rank(),
            AnyMatroid::Gf5x6(m) => m.rank(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn write_then_read_round_trips() {
        let m = catalog::canonical_u25();
        let text = write_matroid(&m);
        let back: LinearMatroid<Gf5x6> = read_matroid(&text).unwrap();
        assert!(back.same_labeled(&m));
        assert_eq!(write_matroid(&back), text);
        assert!(text.contains("2:2:3:3:4:4"));
    }

    #[test]
    fn tampered_rank_is_rejected() {
        let text = write_matroid(&catalog::fano());
        let bad = text.replacen("rank 3", "rank 4", 1);
        assert!(matches!(read_matroid::<Gf2>(&bad), Err(FormatError::Checksum)));
    }

    #[test]
    fn wrong_ring_is_rejected() {
        let text = write_matroid(&catalog::fano());
        assert!(matches!(read_matroid::<Gf5>(&text), Err(FormatError::WrongRing { .. })));
        assert!(matches!(AnyMatroid::read(&text), Ok(AnyMatroid::Gf2(_))));
    }

    #[test]
    fn free_and_rank_zero_matroids_round_trip() {
        let free = LinearMatroid::<Gf5>::free(vec!["a".into(), "b".into()]);
        let t = write_matroid(&free);
        assert!(read_matroid::<Gf5>(&t).unwrap().same_labeled(&free));
        let zero = free.dual();
        let t = write_matroid(&zero);
        assert!(read_matroid::<Gf5>(&t).unwrap().same_labeled(&zero));
    }
}
