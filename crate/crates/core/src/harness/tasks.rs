//! The individual checks behind the verification tasks. Each takes the
//! grown set of a base matroid and decides one claim about it.

use std::collections::BTreeMap;

use crate::algebra::Scalar;
use crate::fragility::{has_minor, ClassId};
use crate::iso::is_isomorphic;
use crate::matroid::{bit, LinearMatroid};
use crate::structure::{core, disjoint_fan_families, fan_extension_closure, Fan};

use super::HarnessError;

/// Result of one check: witnesses are the members that broke the claim.
#[derive(Clone, Debug)]
pub struct Outcome<S: Scalar> {
    pub pass: bool,
    pub counts: BTreeMap<String, usize>,
    pub witnesses: Vec<LinearMatroid<S>>,
    pub notes: Vec<String>,
    /// The fan family that settled a passing fan check.
    pub family: Option<Vec<Fan>>,
}

impl<S: Scalar> Outcome<S> {
    fn new(pass: bool) -> Self {
        Outcome { pass, counts: BTreeMap::new(), witnesses: Vec::new(), notes: Vec::new(), family: None }
    }

    fn count(mut self, key: &str, v: usize) -> Self {
        self.counts.insert(key.into(), v);
        self
    }
}

/// Every choice of orientation for each fan of a family.
pub fn orientations(fans: &[Fan]) -> Vec<Vec<Fan>> {
    (0..1u32 << fans.len())
        .map(|mask| {
            fans.iter().enumerate().map(|(j, f)| if mask & (1 << j) != 0 { f.reversed() } else { f.clone() }).collect()
        })
        .collect()
}

pub fn family_string(fans: &[Fan]) -> String {
    fans.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
}

/// The labelled elements form a parallel class of `m`.
pub fn is_parallel_class<S: Scalar>(m: &LinearMatroid<S>, labels: &[&str]) -> bool {
    let owned: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    let Ok(mk) = m.mask_of_labels(&owned) else { return false };
    let t = m.table();
    t.rank_of(mk) == 1 && (0..m.size()).all(|e| mk & bit(e) != 0 || t.rank_of(mk | bit(e)) == 2)
}

pub fn simplifies_to<S: Scalar, T: Scalar>(m: &LinearMatroid<S>, target: &LinearMatroid<T>) -> bool {
    is_isomorphic(&m.simplify().0, target)
}

fn in_closure<S: Scalar>(m: &LinearMatroid<S>, closure: &[LinearMatroid<S>]) -> bool {
    closure.iter().any(|x| x.size() == m.size() && is_isomorphic(x, m))
}

/// Oriented disjoint fan families of the given lengths, in search order.
pub fn oriented_families<S: Scalar>(m: &LinearMatroid<S>, shape: &[usize]) -> Vec<Vec<Fan>> {
    disjoint_fan_families(m, shape).iter().flat_map(|f| orientations(f)).collect()
}

/// Oriented families of `shape` whose core satisfies `core_ok`.
pub fn matching_families<S: Scalar>(
    m: &LinearMatroid<S>,
    shape: &[usize],
    core_ok: &dyn Fn(&LinearMatroid<S>) -> bool,
) -> Vec<Vec<Fan>> {
    oriented_families(m, shape).into_iter().filter(|f| core(m, f).map(|k| core_ok(&k)).unwrap_or(false)).collect()
}

/// `grown` consists of `m` alone.
pub fn check_terminal<S: Scalar>(m: &LinearMatroid<S>, grown: &[LinearMatroid<S>]) -> Outcome<S> {
    let others: Vec<_> = grown.iter().filter(|x| !is_isomorphic(*x, m)).cloned().collect();
    let mut out = Outcome::new(others.is_empty()).count("grown", grown.len());
    out.witnesses = others;
    out
}

/// Some fan family of `shape` with a matching core has every grown member
/// in its fan-extension closure.
pub fn check_fan_case<S: Scalar>(
    m: &LinearMatroid<S>,
    grown: &[LinearMatroid<S>],
    shape: &[usize],
    core_ok: &dyn Fn(&LinearMatroid<S>) -> bool,
    c: ClassId,
) -> Result<Outcome<S>, HarnessError> {
    let families = matching_families(m, shape, core_ok);
    if families.is_empty() {
        let mut out = Outcome::new(false).count("grown", grown.len()).count("families", 0);
        out.witnesses.push(m.clone());
        out.notes.push(format!("no fan family of lengths {shape:?} has the expected core"));
        return Ok(out);
    }
    let mut best: Option<Vec<LinearMatroid<S>>> = None;
    for fans in &families {
        let closure = fan_extension_closure(m, fans, 2, c)?;
        let missing: Vec<_> = grown.iter().filter(|x| !in_closure(x, &closure)).cloned().collect();
        if missing.is_empty() {
            let mut out = Outcome::new(true)
                .count("grown", grown.len())
                .count("families", families.len())
                .count("closure", closure.len());
            out.notes.push(format!("fan family {}", family_string(fans)));
            out.family = Some(fans.clone());
            return Ok(out);
        }
        if best.as_ref().map(|b| missing.len() < b.len()).unwrap_or(true) {
            best = Some(missing);
        }
    }
    let missing = best.unwrap_or_default();
    let mut out = Outcome::new(false)
        .count("grown", grown.len())
        .count("families", families.len())
        .count("missing", missing.len());
    out.notes.push("no family's closure contains every grown member".into());
    out.witnesses = missing;
    Ok(out)
}

/// Some family of `shape` covers every grown member lacking a `minor`.
pub fn check_dichotomy<S: Scalar>(
    m: &LinearMatroid<S>,
    grown: &[LinearMatroid<S>],
    shape: &[usize],
    minor: &LinearMatroid<S>,
    c: ClassId,
) -> Result<Outcome<S>, HarnessError> {
    let rest: Vec<_> = grown.iter().filter(|x| !has_minor(*x, minor)).cloned().collect();
    let with_minor = grown.len() - rest.len();
    let families = oriented_families(m, shape);
    let mut best: Option<Vec<LinearMatroid<S>>> = None;
    for fans in &families {
        let closure = fan_extension_closure(m, fans, 2, c)?;
        let missing: Vec<_> = rest.iter().filter(|x| !in_closure(x, &closure)).cloned().collect();
        if missing.is_empty() {
            let mut out = Outcome::new(true)
                .count("grown", grown.len())
                .count("with_minor", with_minor)
                .count("in_closure", rest.len());
            out.notes.push(format!("fan family {}", family_string(fans)));
            out.family = Some(fans.clone());
            return Ok(out);
        }
        if best.as_ref().map(|b| missing.len() < b.len()).unwrap_or(true) {
            best = Some(missing);
        }
    }
    let mut out = Outcome::new(false)
        .count("grown", grown.len())
        .count("with_minor", with_minor)
        .count("families", families.len());
    out.witnesses = best.unwrap_or_else(|| vec![m.clone()]);
    Ok(out)
}
