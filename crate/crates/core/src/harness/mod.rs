//! Orchestration of the verification tasks: catalog persistence, identified
//! names, reports and the commands behind the CLI.

pub mod cache;
pub mod gluing;
pub mod roles;
pub mod tasks;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Gf2, Gf5x6, Scalar};
use crate::catalog::{self, canonical_u25, fano, Evidence, NamedError, NamedMatroid, Provenance, CATALOG_NAMES};
use crate::format::{write_matroid, AnyMatroid, FormatError};
use crate::fragility::{
    coextensions, cosimple_coextensions_in_class, extensions, grow, in_class, simple_extensions_in_class, ClassId,
    FragilityError,
};
use crate::iso::{dedup, is_isomorphic};
use crate::matroid::{ElementSet, LinearMatroid, MatroidError};
use crate::structure::{glue_wheels, StructureError, WheelGlueSpec};

use cache::{Catalog, FORMAT_VERSION};
use roles::{avoid_for, dual_indices, role_check, RoleError, Roles, ROLE_ORDER};
use tasks::{check_fan_case, simplifies_to, Outcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("requested size {0} exceeds the resource guard of {max}", max = cache::MAX_CATALOG_SIZE)]
    ResourceGuard(usize),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("invalid glue spec: {0}")]
    BadSpec(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("ambiguous: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Named(#[from] NamedError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Fragility(#[from] FragilityError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn is_ambiguity(&self) -> bool {
        matches!(self, HarnessError::Ambiguous(_) | HarnessError::Named(NamedError::Ambiguous { .. }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Ambiguous,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Ambiguous => "ambiguous",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub task: String,
    pub status: Status,
    pub counts: BTreeMap<String, usize>,
    /// Paths of serialized witness matroids.
    pub witnesses: Vec<String>,
    pub millis: u128,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn text(&self) -> String {
        let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = format!("{} {} {} ({} ms)", self.task, self.status, counts.join(" "), self.millis);
        for n in &self.notes {
            s.push_str(&format!("\n  {n}"));
        }
        for w in &self.witnesses {
            s.push_str(&format!("\n  witness {w}"));
        }
        s
    }
}

pub const TASKS: [&str; 11] =
    ["N11", "N12", "M9_9", "M9_18", "M9_7", "M9_15", "M9_2", "M9_1", "M9_0", "hypotheses", "duality"];

/// Largest size the H5 tasks need.
const H5_SIZE: usize = 9;

/// One CLI invocation's worth of state: catalogs and names are loaded or
/// derived once and reused.
pub struct Session {
    pub cache_dir: PathBuf,
    h5: Option<Catalog<Gf5x6>>,
    fano: Option<Catalog<Gf2>>,
    roles: Option<Roles>,
    trials: BTreeMap<usize, Outcome<Gf5x6>>,
}

fn load_or_build<S: Scalar>(
    root: &Path,
    class: ClassId,
    seeds: impl FnOnce() -> Vec<LinearMatroid<S>>,
    max_size: usize,
) -> Result<Catalog<S>, HarnessError> {
    if max_size > cache::MAX_CATALOG_SIZE {
        return Err(HarnessError::ResourceGuard(max_size));
    }
    let mut cat = match Catalog::load(root, class)? {
        Some(c) => c,
        None => Catalog::seeds(class, seeds()),
    };
    if cat.max_size() < max_size {
        cat.extend_to(max_size)?;
        cat.save(root)?;
    } else if !root.join(format!("v{FORMAT_VERSION}")).join(class.name()).join("manifest.json").exists() {
        cat.save(root)?;
    }
    Ok(cat)
}

impl Session {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Session { cache_dir: cache_dir.into(), h5: None, fano: None, roles: None, trials: BTreeMap::new() }
    }

    pub fn h5_catalog(&mut self, max_size: usize) -> Result<&Catalog<Gf5x6>, HarnessError> {
        if self.h5.as_ref().map(|c| c.max_size() < max_size).unwrap_or(true) {
            let seeds = || vec![canonical_u25(), canonical_u25().dual()];
            self.h5 = Some(load_or_build(&self.cache_dir, ClassId::H5Fragile, seeds, max_size)?);
        }
        Ok(self.h5.as_ref().expect("loaded"))
    }

    pub fn fano_catalog(&mut self, max_size: usize) -> Result<&Catalog<Gf2>, HarnessError> {
        if self.fano.as_ref().map(|c| c.max_size() < max_size).unwrap_or(true) {
            let seeds = || vec![fano(), fano().dual()];
            self.fano = Some(load_or_build(&self.cache_dir, ClassId::FanoFragile, seeds, max_size)?);
        }
        Ok(self.fano.as_ref().expect("loaded"))
    }

    fn roles_path(&self) -> PathBuf {
        self.cache_dir.join(format!("v{FORMAT_VERSION}")).join(ClassId::H5Fragile.name()).join("roles.json")
    }

    /// Identified H5 names, from the cache when it matches the catalog.
    pub fn roles(&mut self) -> Result<Roles, RoleError> {
        if let Some(r) = &self.roles {
            return Ok(r.clone());
        }
        let path = self.roles_path();
        let cat = self.h5_catalog(H5_SIZE)?.clone();
        let digest = cat.digest();
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(r) = serde_json::from_str::<Roles>(&text) {
                if r.catalog_digest == digest {
                    self.roles = Some(r.clone());
                    return Ok(r);
                }
            }
        }
        let res = roles::resolve(&cat)?;
        fs::write(&path, serde_json::to_string_pretty(&res.roles).map_err(HarnessError::from)?)
            .map_err(HarnessError::from)?;
        self.trials = res.trials;
        self.roles = Some(res.roles.clone());
        Ok(res.roles)
    }

    fn write_witnesses<S: Scalar>(&self, task: &str, ms: &[LinearMatroid<S>]) -> Result<Vec<String>, HarnessError> {
        let dir = self.cache_dir.join("witnesses");
        fs::create_dir_all(&dir)?;
        ms.iter()
            .enumerate()
            .map(|(i, m)| {
                let p = dir.join(format!("{task}-{i}.txt"));
                fs::write(&p, write_matroid(m))?;
                Ok(p.display().to_string())
            })
            .collect()
    }

    fn report<S: Scalar>(&self, task: &str, o: &Outcome<S>, start: Instant) -> Result<Report, HarnessError> {
        let witnesses = if o.pass { Vec::new() } else { self.write_witnesses(task, &o.witnesses)? };
        Ok(Report {
            task: task.into(),
            status: if o.pass { Status::Pass } else { Status::Fail },
            counts: o.counts.clone(),
            witnesses,
            millis: start.elapsed().as_millis(),
            notes: o.notes.clone(),
        })
    }

    fn ambiguous(task: &str, why: String, start: Instant) -> Report {
        Report {
            task: task.into(),
            status: Status::Ambiguous,
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            millis: start.elapsed().as_millis(),
            notes: vec![why],
        }
    }

    pub fn cmd_catalog(&mut self, class: ClassId, max_size: usize) -> Result<Report, HarnessError> {
        let start = Instant::now();
        let counts = match class {
            ClassId::H5Fragile => self.h5_catalog(max_size)?.counts(),
            ClassId::FanoFragile => self.fano_catalog(max_size)?.counts(),
        };
        Ok(Report {
            task: format!("catalog {class}"),
            status: Status::Pass,
            counts: counts.into_iter().filter(|(k, _)| *k <= max_size).map(|(k, v)| (format!("size-{k}"), v)).collect(),
            witnesses: Vec::new(),
            millis: start.elapsed().as_millis(),
            notes: Vec::new(),
        })
    }

    pub fn cmd_verify(&mut self, task: &str) -> Result<Report, HarnessError> {
        let start = Instant::now();
        match task {
            "N11" => self.verify_n11(start),
            "N12" => self.verify_n12(start),
            "hypotheses" => self.verify_hypotheses(start),
            "duality" => self.verify_duality(start),
            t => match t.strip_prefix("M9_").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) if ROLE_ORDER.contains(&k) => self.verify_role(task, k, start),
                _ => Err(HarnessError::UnknownTask(task.into())),
            },
        }
    }

    fn verify_n11(&mut self, start: Instant) -> Result<Report, HarnessError> {
        let c = ClassId::FanoFragile;
        let r10 = catalog::r10();
        let ext = extensions(&r10, c)?;
        if ext.len() != 1 {
            let o = Outcome {
                pass: false,
                counts: [("r10_extensions".into(), ext.len())].into(),
                witnesses: ext.clone(),
                notes: vec!["R10 does not have exactly one extension".into()],
                family: None,
            };
            let mut r = self.report("N11", &o, start)?;
            if ext.is_empty() {
                r.witnesses = self.write_witnesses("N11", &[r10])?;
            }
            return Ok(r);
        }
        let n11 = ext[0].clone();
        let n11_ext = extensions(&n11, c)?;
        let co = coextensions(&n11, c)?;
        if !n11_ext.is_empty() || co.len() != 1 {
            let mut w = n11_ext.clone();
            w.extend(co.iter().cloned());
            if w.is_empty() {
                w.push(n11.clone());
            }
            let counts = [("n11_extensions".into(), n11_ext.len()), ("n11_coextensions".into(), co.len())].into();
            let o = Outcome {
                pass: false,
                counts,
                witnesses: w,
                notes: vec!["N11 growth is not as claimed".into()],
                family: None,
            };
            return self.report("N11", &o, start);
        }
        let n11p = co[0].clone();
        let grown = grow(&n11p, 2, c)?;
        let mut o = check_fan_case(&n11p, &grown, &[4], &|k| is_isomorphic(k, &n11), c)?;
        o.counts.insert("r10_extensions".into(), 1);
        o.counts.insert("n11_extensions".into(), 0);
        o.counts.insert("n11_coextensions".into(), 1);
        self.report("N11", &o, start)
    }

    fn verify_n12(&mut self, start: Instant) -> Result<Report, HarnessError> {
        let c = ClassId::FanoFragile;
        let named = catalog::named("N12")?;
        let AnyMatroid::Gf2(n12) = named.matroid else { unreachable!("N12 is binary") };
        let f7 = fano();
        let core_ok =
            |k: &LinearMatroid<Gf2>| simplifies_to(k, &f7) && k.table().parallel_classes().iter().any(|p| p.len() == 3);
        let grown = grow(&n12, 2, c)?;
        let o = check_fan_case(&n12, &grown, &[4, 4, 4], &core_ok, c)?;
        self.report("N12", &o, start)
    }

    fn verify_role(&mut self, task: &str, k: usize, start: Instant) -> Result<Report, HarnessError> {
        let roles = match self.roles() {
            Ok(r) => r,
            Err(RoleError::NoCandidate { role, outcome }) if role == k => {
                let o = outcome.map(|b| *b).unwrap_or_else(|| Outcome {
                    pass: false,
                    counts: BTreeMap::new(),
                    witnesses: Vec::new(),
                    notes: vec!["no candidate carries the expected structure".into()],
                    family: None,
                });
                let mut r = self.report(task, &o, start)?;
                if r.witnesses.is_empty() {
                    let nine = self.h5_catalog(H5_SIZE)?.level(9).to_vec();
                    r.witnesses = self.write_witnesses(task, &nine)?;
                }
                return Ok(r);
            }
            Err(RoleError::NoCandidate { role, .. }) => {
                return Ok(Self::ambiguous(task, format!("M9_{role} could not be identified"), start))
            }
            Err(RoleError::Ambiguous(why)) => return Ok(Self::ambiguous(task, why, start)),
            Err(RoleError::Harness(e)) => return Err(e),
        };
        if let Some(o) = self.trials.get(&k) {
            let o = o.clone();
            return self.report(task, &o, start);
        }
        let cat = self.h5_catalog(H5_SIZE)?.clone();
        let avoid = avoid_for(&cat, &roles, k);
        let m = &cat.level(9)[roles.nine[&k]];
        let m7_1 = &cat.level(7)[roles.m7_1];
        let m8_5 = &cat.level(8)[roles.m8_5];
        let o = role_check(k, m, &avoid, &cat, Some(m7_1), Some(m8_5))?;
        self.trials.insert(k, o.clone());
        self.report(task, &o, start)
    }

    /// Class members with a base minor and at most two
    /// more elements are 3-connected up to series and parallel sets.
    fn verify_hypotheses(&mut self, start: Instant) -> Result<Report, HarnessError> {
        let mut counts = BTreeMap::new();
        let mut bad_fano = Vec::new();
        for name in ["N11+", "N12"] {
            let AnyMatroid::Gf2(n) = catalog::named(name)?.matroid else { unreachable!("binary") };
            let (checked, bad) = sp_hypothesis(&n, ClassId::FanoFragile)?;
            counts.insert(name.to_string(), checked);
            bad_fano.extend(bad);
        }
        let mut bad_h5 = Vec::new();
        match self.roles() {
            Ok(roles) => {
                let nine = self.h5_catalog(H5_SIZE)?.level(9).to_vec();
                for k in ROLE_ORDER {
                    let (checked, bad) = sp_hypothesis(&nine[roles.nine[&k]], ClassId::H5Fragile)?;
                    counts.insert(format!("M9_{k}"), checked);
                    bad_h5.extend(bad);
                }
            }
            Err(RoleError::Harness(e)) => return Err(e),
            Err(_) => return Ok(Self::ambiguous("hypotheses", "H5 names could not be identified".into(), start)),
        }
        let pass = bad_fano.is_empty() && bad_h5.is_empty();
        let mut witnesses = self.write_witnesses("hypotheses-fano", &bad_fano)?;
        witnesses.extend(self.write_witnesses("hypotheses-h5", &bad_h5)?);
        Ok(Report {
            task: "hypotheses".into(),
            status: if pass { Status::Pass } else { Status::Fail },
            counts,
            witnesses,
            millis: start.elapsed().as_millis(),
            notes: Vec::new(),
        })
    }

    fn verify_duality(&mut self, start: Instant) -> Result<Report, HarnessError> {
        let cat = self.h5_catalog(H5_SIZE)?.clone();
        let mut counts = BTreeMap::new();
        let mut bad = Vec::new();
        for (size, level) in &cat.levels {
            let open: Vec<_> =
                level.iter().filter(|m| !level.iter().any(|x| is_isomorphic(x, &m.dual()))).cloned().collect();
            counts.insert(format!("size-{size}"), level.len());
            bad.extend(open);
        }
        if bad.is_empty() {
            if let Ok(d) = dual_indices(cat.level(9)) {
                counts.insert("self-dual-9".into(), d.iter().enumerate().filter(|(i, j)| i == *j).count());
            }
        }
        let o = Outcome { pass: bad.is_empty(), counts, witnesses: bad, notes: Vec::new(), family: None };
        self.report("duality", &o, start)
    }

    /// A named matroid: explicit names, identified catalog names, or a
    /// catalog index `class:size:index`.
    pub fn named(&mut self, name: &str) -> Result<NamedMatroid, HarnessError> {
        if catalog::EXPLICIT_NAMES.contains(&name) {
            return Ok(catalog::named(name)?);
        }
        if let Some(entry) = self.catalog_entry(name)? {
            return Ok(entry);
        }
        if !CATALOG_NAMES.contains(&name) {
            return Err(NamedError::Unknown(name.into()).into());
        }
        let roles = match self.roles() {
            Ok(r) => r,
            Err(RoleError::Harness(e)) => return Err(e),
            Err(RoleError::Ambiguous(why)) => {
                return Err(NamedError::Ambiguous { name: name.into(), detail: why }.into())
            }
            Err(RoleError::NoCandidate { role, .. }) => {
                return Err(
                    NamedError::Derivation { name: name.into(), detail: format!("M9_{role} check failed") }.into()
                )
            }
        };
        let cat = self.h5_catalog(H5_SIZE)?;
        let (size, index) = match name {
            "X8" => (8, roles.x8),
            "Y8" => (8, roles.y8),
            "Y8*" => (8, roles.y8_star),
            "M_7_1" => (7, roles.m7_1),
            "M_8_5" => (8, roles.m8_5),
            "M_8_6" => (8, roles.m8_6),
            other => {
                let k: usize = other.trim_start_matches("M_9_").parse().expect("listed name");
                (9, roles.nine[&k])
            }
        };
        let m = cat.level(size)[index].clone();
        let key = if name == "Y8*" { "Y8" } else { name };
        let mut evidence: Vec<Evidence> =
            roles.evidence.get(key).into_iter().flatten().map(|s| Evidence::new(s.clone(), true)).collect();
        if let Some(k) = name.strip_prefix("M_9_").and_then(|k| k.parse::<usize>().ok()) {
            let own = if ROLE_ORDER.contains(&k) { k } else { roles::dual_role(k) };
            evidence.extend(
                roles.evidence.get(&format!("M_9_{own}")).into_iter().flatten().map(|s| Evidence::new(s.clone(), true)),
            );
            if own != k {
                evidence.push(Evidence::new(
                    format!("dual of M_9_{own}"),
                    is_isomorphic(&m.dual(), &cat.level(9)[roles.nine[&own]]),
                ));
            }
        }
        evidence.push(Evidence::new(
            "3-connected member of the class",
            m.is_3connected() && in_class(&m, ClassId::H5Fragile),
        ));
        let provenance =
            if name == "M_8_6" { Provenance::DerivedByConstruction } else { Provenance::DerivedByEnumeration };
        Ok(NamedMatroid::checked(name, AnyMatroid::Gf5x6(m), provenance, evidence)?)
    }

    fn catalog_entry(&mut self, name: &str) -> Result<Option<NamedMatroid>, HarnessError> {
        let parts: Vec<&str> = name.split(':').collect();
        let [class, size, index] = parts.as_slice() else { return Ok(None) };
        let Ok(class) = class.parse::<ClassId>() else { return Ok(None) };
        let (Ok(size), Ok(index)) = (size.parse::<usize>(), index.parse::<usize>()) else { return Ok(None) };
        let m = match class {
            ClassId::H5Fragile => self.h5_catalog(size)?.level(size).get(index).cloned().map(AnyMatroid::Gf5x6),
            ClassId::FanoFragile => self.fano_catalog(size)?.level(size).get(index).cloned().map(AnyMatroid::Gf2),
        };
        let m = m.ok_or_else(|| NamedError::Unknown(name.into()))?;
        let ok = match &m {
            AnyMatroid::Gf2(x) => x.is_3connected() && in_class(x, class),
            AnyMatroid::Gf5x6(x) => x.is_3connected() && in_class(x, class),
            AnyMatroid::Gf5(_) => false,
        };
        let ev = vec![Evidence::new("3-connected member of the class", ok)];
        Ok(Some(NamedMatroid::checked(name, m, Provenance::DerivedByEnumeration, ev)?))
    }

    /// Serialized matroid for a name or a glue spec, with optional deletions.
    pub fn cmd_construct(
        &mut self,
        name: Option<&str>,
        glue: Option<&str>,
        delete: &[String],
    ) -> Result<String, HarnessError> {
        let del: ElementSet = delete.iter().collect();
        let m = match (name, glue) {
            (Some(n), None) => delete_any(self.named(n)?.matroid, &del)?,
            (None, Some(spec)) => {
                let (base, triangles, ranks) = parse_glue(spec)?;
                let spec = WheelGlueSpec { triangles, ranks, delete: del };
                match self.named(&base)?.matroid {
                    AnyMatroid::Gf2(m) => AnyMatroid::Gf2(glue_wheels(&m, &spec)?),
                    AnyMatroid::Gf5(m) => AnyMatroid::Gf5(glue_wheels(&m, &spec)?),
                    AnyMatroid::Gf5x6(m) => AnyMatroid::Gf5x6(glue_wheels(&m, &spec)?),
                }
            }
            _ => return Err(HarnessError::BadSpec("give exactly one of a name and a glue spec".into())),
        };
        Ok(m.write())
    }
}

fn delete_any(m: AnyMatroid, x: &ElementSet) -> Result<AnyMatroid, HarnessError> {
    if x.is_empty() {
        return Ok(m);
    }
    Ok(match m {
        AnyMatroid::Gf2(m) => AnyMatroid::Gf2(m.delete(x)?),
        AnyMatroid::Gf5(m) => AnyMatroid::Gf5(m.delete(x)?),
        AnyMatroid::Gf5x6(m) => AnyMatroid::Gf5x6(m.delete(x)?),
    })
}

/// Parses `BASE:(a,b,c):r[:(a,b,c):r...]`.
pub fn parse_glue(spec: &str) -> Result<(String, Vec<[String; 3]>, Vec<usize>), HarnessError> {
    let bad = |m: &str| HarnessError::BadSpec(format!("{m} in {spec:?}"));
    let (base, mut rest) = spec.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    if base.is_empty() {
        return Err(bad("missing base name"));
    }
    let mut triangles = Vec::new();
    let mut ranks = Vec::new();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let (tri, after) = inner.split_once(')').ok_or_else(|| bad("unclosed '('"))?;
        let labels: Vec<String> = tri.split(',').map(|s| s.trim().to_string()).collect();
        let [a, b, c]: [String; 3] = labels.try_into().map_err(|_| bad("a triangle needs three labels"))?;
        if [&a, &b, &c].iter().any(|l| l.is_empty()) {
            return Err(bad("empty label"));
        }
        let after = after.strip_prefix(':').ok_or_else(|| bad("expected ':' before the wheel rank"))?;
        let (rank, tail) = after.split_once(':').unwrap_or((after, ""));
        ranks.push(rank.parse().map_err(|_| bad("bad wheel rank"))?);
        triangles.push([a, b, c]);
        rest = tail;
    }
    if triangles.is_empty() {
        return Err(bad("no triangles"));
    }
    Ok((base.to_string(), triangles, ranks))
}

/// Class members with an `n`-minor reachable by at most two simple
/// extensions or cosimple coextensions, and those among them that are not
/// 3-connected up to series and parallel sets.
pub fn sp_hypothesis<S: Scalar>(
    n: &LinearMatroid<S>,
    c: ClassId,
) -> Result<(usize, Vec<LinearMatroid<S>>), HarnessError> {
    let step = |m: &LinearMatroid<S>| -> Result<Vec<LinearMatroid<S>>, HarnessError> {
        let mut v = simple_extensions_in_class(m, c)?;
        v.extend(cosimple_coextensions_in_class(m, c)?);
        Ok(v)
    };
    let one = dedup(step(n)?);
    let mut two = Vec::new();
    for m in &one {
        two.extend(step(m)?);
    }
    let all: Vec<_> = one.into_iter().chain(dedup(two)).collect();
    let bad = all.iter().filter(|m| !m.is_3connected_up_to_sp()).cloned().collect();
    Ok((all.len(), bad))
}
