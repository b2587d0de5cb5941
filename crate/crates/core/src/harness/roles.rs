//! Identification of the named members of the H5 catalog.
//!
//! Catalog indices carry no meaning, so every name is pinned by evidence.
//! X8 and the Y8 pair come from segment structure and the exclusion
//! pattern at size 9; M9_2 and M9_0 from their fan structure alone. The
//! remaining 9-element names are assigned in the order in which the case
//! analysis excludes them: each role goes to the unique dual pair, among
//! those still unassigned and carrying the role's fan evidence, whose
//! check passes once all earlier pairs are excluded.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::Catalog;
use super::gluing::{gluings, triangle};
use super::tasks::{
    check_dichotomy, check_fan_case, check_terminal, is_parallel_class, matching_families, oriented_families,
    simplifies_to, Outcome,
};
use super::HarnessError;
use crate::algebra::Gf5x6;
use crate::catalog::canonical_u25;
use crate::fragility::{grow_avoiding, has_minor, ClassId};
use crate::iso::is_isomorphic;
use crate::matroid::{subsets_of_size, RankTable};
use crate::structure::core;
use crate::ProductMatroid;

const H5: ClassId = ClassId::H5Fragile;

/// The 9-element tasks in the order the case analysis settles them.
pub const ROLE_ORDER: [usize; 7] = [9, 18, 7, 15, 2, 1, 0];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub catalog_digest: String,
    pub x8: usize,
    pub y8: usize,
    pub y8_star: usize,
    pub m7_1: usize,
    pub m8_5: usize,
    pub m8_6: usize,
    /// Size-9 catalog index of `M_9_k`, dual names included.
    pub nine: BTreeMap<usize, usize>,
    /// Size-9 members with a minor in {X8, Y8, Y8*}.
    pub excluded: Vec<usize>,
    pub evidence: BTreeMap<String, Vec<String>>,
}

#[derive(Debug)]
pub enum RoleError {
    Ambiguous(String),
    /// No candidate passed the check of `role`; the outcome of the best
    /// candidate is kept for the report.
    NoCandidate {
        role: usize,
        outcome: Option<Box<Outcome<Gf5x6>>>,
    },
    Harness(HarnessError),
}

impl From<HarnessError> for RoleError {
    fn from(e: HarnessError) -> Self {
        RoleError::Harness(e)
    }
}

impl From<crate::fragility::FragilityError> for RoleError {
    fn from(e: crate::fragility::FragilityError) -> Self {
        RoleError::Harness(e.into())
    }
}

pub struct Resolution {
    pub roles: Roles,
    /// Outcome of each role's check on the assigned member, by role number.
    pub trials: BTreeMap<usize, Outcome<Gf5x6>>,
}

pub fn dual_role(k: usize) -> usize {
    (k + 10) % 20
}

fn has_segment(t: &RankTable, k: usize) -> bool {
    subsets_of_size(t.ground(), k).into_iter().any(|s| t.rank_of(s) == 2)
}

/// Index of the dual of each member; errors if the level is not closed
/// under duality.
pub fn dual_indices(level: &[ProductMatroid]) -> Result<Vec<usize>, RoleError> {
    level
        .iter()
        .map(|m| {
            let d = m.dual();
            level
                .iter()
                .position(|x| is_isomorphic(x, &d))
                .ok_or_else(|| RoleError::Ambiguous(format!("catalog not closed under duality at size {}", m.size())))
        })
        .collect()
}

fn unique<T>(what: &str, mut v: Vec<T>) -> Result<T, RoleError> {
    match v.len() {
        1 => Ok(v.remove(0)),
        k => Err(RoleError::Ambiguous(format!("{k} candidates for {what}"))),
    }
}

/// Lower rank first, then lower index.
fn representative(level: &[ProductMatroid], members: &[usize]) -> Option<usize> {
    members.iter().copied().min_by_key(|&i| (level[i].rank(), i))
}

fn pairs(duals: &[usize]) -> Vec<(usize, usize)> {
    (0..duals.len()).filter(|&i| i <= duals[i]).map(|i| (i, duals[i])).collect()
}

pub fn core_is_u25_with(
    classes: &'static [&'static [&'static str]],
    size: Option<usize>,
) -> impl Fn(&ProductMatroid) -> bool + Sync {
    let u25 = canonical_u25();
    move |k: &ProductMatroid| {
        size.map(|s| k.size() == s).unwrap_or(true)
            && classes.iter().all(|c| is_parallel_class(k, c))
            && simplifies_to(k, &u25)
    }
}

pub fn shape_of(role: usize) -> &'static [usize] {
    match role {
        18 => &[3, 3, 3],
        7 => &[5],
        15 => &[5, 3],
        2 => &[4, 4],
        0 => &[7],
        _ => &[],
    }
}

/// Core predicate for the fan roles; `m7_1` pins the core of M9_7 once
/// known, and before that any 7-element catalog member is accepted.
fn core_check<'a>(
    role: usize,
    cat: &'a Catalog<Gf5x6>,
    m7_1: Option<&'a ProductMatroid>,
) -> Box<dyn Fn(&ProductMatroid) -> bool + Sync + 'a> {
    match role {
        18 => Box::new(core_is_u25_with(&[&["a1", "a2", "a3"], &["c1", "c2", "c3"]], None)),
        15 => Box::new(core_is_u25_with(&[&["a1", "a2"], &["c1", "c2"]], Some(7))),
        2 => Box::new(core_is_u25_with(&[&["c1", "c2"]], Some(6))),
        7 => Box::new(move |k: &ProductMatroid| match m7_1 {
            Some(t) => is_isomorphic(k, t),
            None => k.size() == 7 && cat.index_of(k).is_some(),
        }),
        _ => Box::new(|_: &ProductMatroid| true),
    }
}

/// The excluded minors in force when `role` is checked: X8, Y8, Y8* and
/// both members of every pair settled earlier.
pub fn avoid_for(cat: &Catalog<Gf5x6>, roles: &Roles, role: usize) -> Vec<ProductMatroid> {
    let eight = cat.level(8);
    let nine = cat.level(9);
    let mut avoid = vec![eight[roles.x8].clone(), eight[roles.y8].clone(), eight[roles.y8_star].clone()];
    for &k in ROLE_ORDER.iter().take_while(|&&k| k != role) {
        avoid.push(nine[roles.nine[&k]].clone());
        avoid.push(nine[roles.nine[&dual_role(k)]].clone());
    }
    avoid
}

/// Runs the check of `role` on `m` against the given exclusions.
pub fn role_check(
    role: usize,
    m: &ProductMatroid,
    avoid: &[ProductMatroid],
    cat: &Catalog<Gf5x6>,
    m7_1: Option<&ProductMatroid>,
    m8_5: Option<&ProductMatroid>,
) -> Result<Outcome<Gf5x6>, HarnessError> {
    let grown = grow_avoiding(m, 2, H5, avoid)?;
    match role {
        9 | 1 => Ok(check_terminal(m, &grown)),
        0 => {
            let minor = m8_5.expect("M_8_5 resolved before M9_0");
            check_dichotomy(m, &grown, shape_of(0), minor, H5)
        }
        _ => check_fan_case(m, &grown, shape_of(role), &*core_check(role, cat, m7_1), H5),
    }
}

fn gluing_cases(m7_1: &ProductMatroid, size: usize) -> Vec<ProductMatroid> {
    let u = canonical_u25();
    let mut out = gluings(&u, &[triangle("a", "c", "b"), triangle("a", "d", "b"), triangle("a", "e", "b")], size);
    out.extend(gluings(&u, &[triangle("a", "b", "c"), triangle("c", "d", "e")], size));
    for t in oriented_triangles(m7_1) {
        out.extend(gluings(m7_1, &[t], size));
    }
    out
}

/// Each triangle once per choice of middle element.
fn oriented_triangles(m: &ProductMatroid) -> Vec<[String; 3]> {
    m.triangles()
        .into_iter()
        .flat_map(|t| {
            let v: Vec<String> = t.0.into_iter().collect();
            [[0, 1, 2], [1, 0, 2], [0, 2, 1]].map(|p| [v[p[0]].clone(), v[p[1]].clone(), v[p[2]].clone()])
        })
        .collect()
}

struct Trial {
    member: usize,
    outcome: Outcome<Gf5x6>,
}

pub fn resolve(cat: &Catalog<Gf5x6>) -> Result<Resolution, RoleError> {
    let (seven, eight, nine) = (cat.level(7), cat.level(8), cat.level(9));
    let dual8 = dual_indices(eight)?;
    let dual9 = dual_indices(nine)?;
    let mut evidence: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut note = |name: &str, s: String| evidence.entry(name.to_string()).or_default().push(s);

    let x8 = unique(
        "X8",
        (0..eight.len())
            .filter(|&i| has_segment(eight[i].table(), 4) && has_segment(&eight[i].table().dual(), 4))
            .collect(),
    )?;
    note("X8", "the only 8-element member with a 4-element segment and a 4-element cosegment".into());

    let minor_holders = |ms: &[usize]| -> BTreeSet<usize> {
        (0..nine.len()).filter(|&j| ms.iter().any(|&i| has_minor(&nine[j], &eight[i]))).collect()
    };
    let y_pairs: Vec<((usize, usize), BTreeSet<usize>)> = pairs(&dual8)
        .into_iter()
        .filter(|&(i, j)| i != x8 && j != x8)
        .map(|(i, j)| ((i, j), minor_holders(&[x8, i, j])))
        .filter(|(_, ex)| ex.len() == 6 && ex.iter().all(|&k| ex.contains(&dual9[k])))
        .collect();
    let ((yi, yj), excluded) = unique("the Y8 pair", y_pairs)?;
    let y8 = representative(eight, &[yi, yj]).expect("pair");
    let y8_star = if y8 == yi { yj } else { yi };
    note("Y8", "with X8 and its dual, a minor of exactly three dual pairs of 9-element members".into());

    let open: Vec<(usize, usize)> = pairs(&dual9).into_iter().filter(|(i, _)| !excluded.contains(i)).collect();
    // role -> (assigned member, its dual)
    let mut assigned: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut trials: BTreeMap<usize, Outcome<Gf5x6>> = BTreeMap::new();
    let member_and_dual = |r: usize| (r, dual9[r]);

    // static identifications
    let with_evidence = |role: usize, pair: (usize, usize), pred: &dyn Fn(&ProductMatroid) -> bool| -> Vec<usize> {
        [pair.0, pair.1]
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter(|&i| !matching_families(&nine[i], shape_of(role), pred).is_empty())
            .collect()
    };
    let u2 = core_check(2, cat, None);
    let m92 = unique(
        "M9_2 (two 4-fans, core with a parallel pair over U25)",
        open.iter().filter_map(|&p| representative(nine, &with_evidence(2, p, &*u2))).collect(),
    )?;
    let m90 = unique(
        "M9_0 (a 7-element fan)",
        open.iter()
            .filter_map(|&p| {
                let has7: Vec<usize> =
                    [p.0, p.1].into_iter().filter(|&i| !oriented_families(&nine[i], &[7]).is_empty()).collect();
                representative(nine, &has7)
            })
            .collect(),
    )?;
    note("M_9_2", "the only pair with two disjoint 4-fans whose core has a parallel pair and simplifies to U25".into());
    note("M_9_0", "the only pair with a 7-element fan".into());

    let base_avoid = vec![eight[x8].clone(), eight[y8].clone(), eight[y8_star].clone()];
    let mut m7_1: Option<usize> = None;
    let mut m8_5: Option<usize> = None;
    for &role in &ROLE_ORDER {
        let mut avoid = base_avoid.clone();
        for (i, j) in ROLE_ORDER.iter().take_while(|&&k| k != role).map(|k| assigned[k]) {
            avoid.push(nine[i].clone());
            avoid.push(nine[j].clone());
        }
        let taken: BTreeSet<usize> =
            assigned.values().chain(&[member_and_dual(m92), member_and_dual(m90)]).flat_map(|&(i, j)| [i, j]).collect();
        let free: Vec<(usize, usize)> = open.iter().copied().filter(|p| !taken.contains(&p.0)).collect();
        if role == 0 {
            let settled = [assigned[&9], assigned[&2]];
            m8_5 = Some(resolve_m85(cat, &dual8, [x8, y8, y8_star], &excluded, &settled)?);
            note("M_8_5", "9-element members containing it are the M9_2 and M9_9 pairs and two excluded pairs".into());
        }
        let candidates: Vec<usize> = match role {
            2 => vec![m92],
            0 => vec![m90],
            1 => {
                let p = unique("M9_1 (the last unassigned pair)", free)?;
                vec![representative(nine, &[p.0, p.1]).expect("pair")]
            }
            9 => free.iter().map(|&p| representative(nine, &[p.0, p.1]).expect("pair")).collect(),
            _ => {
                let pred = core_check(role, cat, None);
                free.iter().filter_map(|&p| representative(nine, &with_evidence(role, p, &*pred))).collect()
            }
        };
        let m71_ref = m7_1.map(|i| &seven[i]);
        let m85_ref = m8_5.map(|i| &eight[i]);
        let results: Vec<Trial> = candidates
            .par_iter()
            .map(|&member| {
                role_check(role, &nine[member], &avoid, cat, m71_ref, m85_ref).map(|outcome| Trial { member, outcome })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (passed, failed): (Vec<Trial>, Vec<Trial>) = results.into_iter().partition(|t| t.outcome.pass);
        let t = match passed.len() {
            1 => passed.into_iter().next().expect("one"),
            0 => {
                let outcome = failed.into_iter().map(|t| t.outcome).min_by_key(|o| o.witnesses.len());
                return Err(RoleError::NoCandidate { role, outcome: outcome.map(Box::new) });
            }
            k => return Err(RoleError::Ambiguous(format!("{k} pairs pass the M9_{role} check"))),
        };
        if role == 7 {
            let fans = t.outcome.family.as_ref().expect("fan check records its family");
            let k = core(&nine[t.member], fans).map_err(HarnessError::from)?;
            m7_1 =
                Some(cat.index_of(&k).ok_or_else(|| RoleError::Ambiguous("core of M9_7 not in the catalog".into()))?);
            note("M_7_1", "the core of M9_7".into());
        }
        assigned.insert(role, member_and_dual(t.member));
        note(&format!("M_9_{role}"), format!("settled in order with {} excluded minors", avoid.len()));
        trials.insert(role, t.outcome);
    }
    let m8_5 = m8_5.expect("resolved with M9_0");
    let m7_1 = m7_1.expect("resolved with M9_7");

    // Y8 is not among the gluing constructions
    let glued = gluing_cases(&seven[m7_1], 8);
    if glued.iter().any(|g| is_isomorphic(g, &eight[y8]) || is_isomorphic(g, &eight[y8_star])) {
        return Err(RoleError::Ambiguous("Y8 is obtainable by gluing wheels".into()));
    }
    note("Y8", "not obtainable by any of the wheel-gluing constructions".into());

    let m9_7 = &nine[assigned[&7].0];
    let m8_6 = resolve_m86(cat, &seven[m7_1], m9_7)?;
    note("M_8_6", "a rank-3 wheel glued to the triangle of M7_1 that also yields M9_7".into());

    let mut nine_map = BTreeMap::new();
    for (&k, &(i, j)) in &assigned {
        nine_map.insert(k, i);
        nine_map.insert(dual_role(k), j);
    }
    let roles = Roles {
        catalog_digest: cat.digest(),
        x8,
        y8,
        y8_star,
        m7_1,
        m8_5,
        m8_6,
        nine: nine_map,
        excluded: excluded.into_iter().collect(),
        evidence,
    };
    Ok(Resolution { roles, trials })
}

fn resolve_m85(
    cat: &Catalog<Gf5x6>,
    dual8: &[usize],
    skip: [usize; 3],
    excluded: &BTreeSet<usize>,
    settled: &[(usize, usize)],
) -> Result<usize, RoleError> {
    let (eight, nine) = (cat.level(8), cat.level(9));
    let must: BTreeSet<usize> = settled.iter().flat_map(|&(i, j)| [i, j]).collect();
    let found: Vec<usize> = (0..eight.len())
        .filter(|i| !skip.contains(i) && *i <= dual8[*i])
        .filter(|&i| {
            let holders: BTreeSet<usize> = (0..nine.len()).filter(|&j| has_minor(&nine[j], &eight[i])).collect();
            let outside: BTreeSet<usize> = holders.difference(&must).copied().collect();
            must.is_subset(&holders) && outside.len() == 4 && outside.is_subset(excluded)
        })
        .collect();
    let i = unique("M8_5", found)?;
    Ok(i)
}

fn resolve_m86(cat: &Catalog<Gf5x6>, m7_1: &ProductMatroid, m9_7: &ProductMatroid) -> Result<usize, RoleError> {
    let mut found = BTreeSet::new();
    for t in oriented_triangles(m7_1) {
        let makes_m97 = gluings(m7_1, std::slice::from_ref(&t), 9)
            .iter()
            .any(|g| is_isomorphic(g, m9_7) || is_isomorphic(&g.dual(), m9_7));
        if !makes_m97 {
            continue;
        }
        for g in gluings(m7_1, &[t], 8) {
            if g.is_3connected() {
                if let Some(i) = cat.index_of(&g) {
                    found.insert(i);
                }
            }
        }
    }
    unique("M8_6", found.into_iter().collect())
}
