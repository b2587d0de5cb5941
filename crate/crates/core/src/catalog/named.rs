//! Named matroids that can be built without the enumerated catalog, each
//! pinned by a list of evidence checks. Catalog-derived names (X8, M_9_i and
//! so on) are resolved by the harness.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{canonical_u25, fano, r10, uniform};
use crate::algebra::{Gf2, Gf5};
use crate::format::AnyMatroid;
use crate::fragility::{coextensions, extensions, has_minor, in_class, ClassId};
use crate::iso::is_isomorphic;
use crate::linalg::Matrix;
use crate::matroid::{popcount, ElementSet, LinearMatroid, RankTable};
use crate::structure::{glue_wheels, WheelGlueSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExplicitMatrix,
    DerivedByEnumeration,
    DerivedByConstruction,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ExplicitMatrix => "explicit-matrix",
            Provenance::DerivedByEnumeration => "derived-by-enumeration",
            Provenance::DerivedByConstruction => "derived-by-construction",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub check: String,
    pub passed: bool,
}

impl Evidence {
    pub fn new(check: impl Into<String>, passed: bool) -> Self {
        Evidence { check: check.into(), passed }
    }
}

#[derive(Clone, Debug)]
pub struct NamedMatroid {
    pub name: String,
    pub matroid: AnyMatroid,
    pub provenance: Provenance,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NamedError {
    #[error("unknown matroid name {0:?}")]
    Unknown(String),
    #[error("{name}: evidence failed: {check}")]
    Evidence { name: String, check: String },
    #[error("{name}: ambiguous derivation: {detail}")]
    Ambiguous { name: String, detail: String },
    #[error("{name}: derivation failed: {detail}")]
    Derivation { name: String, detail: String },
}

impl NamedMatroid {
    /// Fails with the first evidence check that did not pass.
    pub fn checked(
        name: &str,
        matroid: AnyMatroid,
        provenance: Provenance,
        evidence: Vec<Evidence>,
    ) -> Result<Self, NamedError> {
        if let Some(e) = evidence.iter().find(|e| !e.passed) {
            return Err(NamedError::Evidence { name: name.into(), check: e.check.clone() });
        }
        Ok(NamedMatroid { name: name.into(), matroid, provenance, evidence })
    }
}

/// Names built directly by [`named`].
pub const EXPLICIT_NAMES: &[&str] =
    &["R10", "F7", "F7*", "N11", "N11+", "N12", "U25", "U35", "U26", "U36", "U46", "P6", "Q6"];

/// Names resolved against the enumerated catalog.
pub const CATALOG_NAMES: &[&str] = &[
    "X8", "Y8", "Y8*", "M_7_1", "M_8_5", "M_8_6", "M_9_0", "M_9_1", "M_9_2", "M_9_5", "M_9_7", "M_9_8", "M_9_9",
    "M_9_10", "M_9_11", "M_9_12", "M_9_15", "M_9_17", "M_9_18", "M_9_19",
];

fn derivation(name: &str, detail: impl Into<String>) -> NamedError {
    NamedError::Derivation { name: name.into(), detail: detail.into() }
}

fn unique<T>(name: &str, mut v: Vec<T>, what: &str) -> Result<T, NamedError> {
    match v.len() {
        1 => Ok(v.remove(0)),
        0 => Err(derivation(name, format!("no {what}"))),
        k => Err(NamedError::Ambiguous { name: name.into(), detail: format!("{k} candidate {what}s") }),
    }
}

fn gf5_columns(cols: &[[u8; 3]]) -> LinearMatroid<Gf5> {
    let cols: Vec<Vec<Gf5>> = cols.iter().map(|c| c.iter().map(|&x| Gf5::new(x)).collect()).collect();
    let labels = (0..cols.len()).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    LinearMatroid::from_columns_matrix(Matrix::from_columns(3, &cols), labels).expect("rank-3 points")
}

/// The rank-3 six-point plane with a single three-point line.
pub fn p6() -> LinearMatroid<Gf5> {
    gf5_columns(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 2, 3], [1, 4, 2]])
}

/// Two three-point lines meeting in `a`.
pub fn q6() -> LinearMatroid<Gf5> {
    gf5_columns(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [1, 2, 3]])
}

/// Number of triangles, and whether every two of them meet.
fn triangle_pattern<S: crate::algebra::Scalar>(m: &LinearMatroid<S>) -> (usize, bool) {
    let t = m.triangles();
    let meet = t.iter().all(|a| t.iter().all(|b| a.iter().any(|x| b.contains(x))));
    (t.len(), meet)
}

fn plane_evidence(m: &LinearMatroid<Gf5>, triangles: usize, meet: bool) -> Vec<Evidence> {
    let (k, all_meet) = triangle_pattern(m);
    vec![
        Evidence::new("rank 3 on 6 elements", m.rank() == 3 && m.size() == 6),
        Evidence::new("3-connected", m.is_3connected()),
        Evidence::new(format!("exactly {triangles} three-point lines"), k == triangles),
        Evidence::new("three-point lines meet", !meet || all_meet),
    ]
}

/// The three lines of F7 through `9` carry rank-3 wheels; deleting
/// `{0,6,7,9}` afterwards.
pub fn n12_spec() -> WheelGlueSpec {
    let tri = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
    WheelGlueSpec {
        triangles: vec![tri("2", "6", "9"), tri("8", "0", "9"), tri("1", "7", "9")],
        ranks: vec![3, 3, 3],
        delete: ElementSet::from(["0", "6", "7", "9"]),
    }
}

pub fn named_n11() -> Result<LinearMatroid<Gf2>, NamedError> {
    let ext = extensions(&r10(), ClassId::FanoFragile).map_err(|e| derivation("N11", e.to_string()))?;
    unique("N11", ext, "extension of R10")
}

pub fn named_n11_plus() -> Result<LinearMatroid<Gf2>, NamedError> {
    let n11 = named_n11()?;
    let co = coextensions(&n11, ClassId::FanoFragile).map_err(|e| derivation("N11+", e.to_string()))?;
    unique("N11+", co, "coextension of N11")
}

pub fn named_n12() -> Result<LinearMatroid<Gf2>, NamedError> {
    glue_wheels(&fano(), &n12_spec()).map_err(|e| derivation("N12", e.to_string()))
}

fn n11_evidence(m: &LinearMatroid<Gf2>) -> Vec<Evidence> {
    let f = fano();
    let new = m.labels().iter().find(|l| r10().index_of(l).is_err()).cloned().unwrap_or_default();
    let through_new = m.triangles().into_iter().filter(|t| t.contains(&new)).collect::<Vec<_>>();
    let contracts_to_fano =
        m.contract_labels(&[new.as_str()]).map(|c| has_minor(&c, &f) || has_minor(&c, &f.dual())).unwrap_or(false);
    vec![
        Evidence::new("11 elements of rank 5", m.size() == 11 && m.rank() == 5),
        Evidence::new(
            "deleting the new element gives R10",
            m.delete_labels(&[new.as_str()]).map(|d| is_isomorphic(&d, &r10())).unwrap_or(false),
        ),
        Evidence::new("the new element lies on a triangle", !through_new.is_empty()),
        Evidence::new("contracting the new element leaves an F7 or F7* minor", contracts_to_fano),
        Evidence::new("Fano-fragile and 3-connected", in_class(m, ClassId::FanoFragile) && m.is_3connected()),
    ]
}

/// Builds a name that needs no catalog.
pub fn named(name: &str) -> Result<NamedMatroid, NamedError> {
    use AnyMatroid as A;
    use Provenance::*;
    let h5 = ClassId::H5Fragile;
    match name {
        "R10" => {
            let m = r10();
            let d0 = m.delete_labels(&["0"]).expect("label 0");
            let ev = vec![
                Evidence::new("10 elements of rank 5", m.size() == 10 && m.rank() == 5),
                Evidence::new("self-dual", is_isomorphic(&m, &m.dual())),
                Evidence::new(
                    "single-element deletions are isomorphic",
                    m.labels().iter().all(|l| is_isomorphic(&m.delete_labels(&[l.as_str()]).unwrap(), &d0)),
                ),
                Evidence::new("no F7 minor", !has_minor(&m, &fano()) && !has_minor(&m, &fano().dual())),
            ];
            NamedMatroid::checked(name, A::Gf2(m), ExplicitMatrix, ev)
        }
        "F7" | "F7*" => {
            let f = fano();
            let m = if name == "F7" { f.clone() } else { f.dual() };
            let ev = vec![
                Evidence::new("7 elements", m.size() == 7),
                Evidence::new("every pair of lines meets", f.triangles().len() == 7 && triangle_pattern(&f).1),
                Evidence::new("binary", true),
            ];
            NamedMatroid::checked(name, A::Gf2(m), ExplicitMatrix, ev)
        }
        "N11" => {
            let m = named_n11()?;
            let ev = n11_evidence(&m);
            NamedMatroid::checked(name, A::Gf2(m), DerivedByEnumeration, ev)
        }
        "N11+" => {
            let m = named_n11_plus()?;
            let n11 = named_n11()?;
            let ev = vec![
                Evidence::new("12 elements of rank 6", m.size() == 12 && m.rank() == 6),
                Evidence::new("has an N11 minor", has_minor(&m, &n11)),
                Evidence::new(
                    "N11 has no extension in the class",
                    extensions(&n11, ClassId::FanoFragile).map(|e| e.is_empty()).unwrap_or(false),
                ),
                Evidence::new("Fano-fragile and 3-connected", in_class(&m, ClassId::FanoFragile) && m.is_3connected()),
            ];
            NamedMatroid::checked(name, A::Gf2(m), DerivedByEnumeration, ev)
        }
        "N12" => {
            let f = fano();
            let m = named_n12()?;
            let ev = vec![
                Evidence::new("{6,0,7} is independent in F7", f.rank_of(&["6", "0", "7"].into()).ok() == Some(3)),
                Evidence::new("{2,8,1} is a circuit of F7", f.triangles().contains(&["2", "8", "1"].into())),
                Evidence::new("12 elements of rank 6", m.size() == 12 && m.rank() == 6),
                Evidence::new("Fano-fragile and 3-connected", in_class(&m, ClassId::FanoFragile) && m.is_3connected()),
            ];
            NamedMatroid::checked(name, A::Gf2(m), DerivedByConstruction, ev)
        }
        "U25" | "U35" => {
            let u = canonical_u25();
            let m = if name == "U25" { u } else { u.dual() };
            let ev = vec![
                Evidence::new("uniform", is_isomorphic(&m, &uniform::<Gf5>(m.rank(), 5).expect("U(r,5) over GF(5)"))),
                Evidence::new("valid product representation", in_class(&m, h5)),
            ];
            NamedMatroid::checked(name, A::Gf5x6(m), ExplicitMatrix, ev)
        }
        "U26" | "U36" | "U46" => {
            let r = (name.as_bytes()[1] - b'0') as usize;
            let m = uniform::<Gf5>(r, 6).expect("U(r,6) over GF(5)");
            let expected = RankTable::from_fn(6, |x| popcount(x).min(r));
            let ev = vec![Evidence::new("every r-subset is a basis", m.table() == &expected)];
            NamedMatroid::checked(name, A::Gf5(m), ExplicitMatrix, ev)
        }
        "P6" => {
            let m = p6();
            let ev = plane_evidence(&m, 1, false);
            NamedMatroid::checked(name, A::Gf5(m), ExplicitMatrix, ev)
        }
        "Q6" => {
            let m = q6();
            let ev = plane_evidence(&m, 2, true);
            NamedMatroid::checked(name, A::Gf5(m), ExplicitMatrix, ev)
        }
        other => Err(NamedError::Unknown(other.into())),
    }
}
