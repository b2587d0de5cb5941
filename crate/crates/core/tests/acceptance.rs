//! Acceptance suite: one line per criterion. Run with
//! `cargo test -p fragile-core --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use fragile_core::algebra::{allowed_cross_ratios, tuple_permute, Gf2, Gf5, Gf5x6};
use fragile_core::catalog::{canonical_u25, fano, graft, graphic, named, uniform, wheel, Graft, Graph};
use fragile_core::format::AnyMatroid;
use fragile_core::fragility::{
    in_class, inequivalent_projection_count, is_fragile_table, is_valid_product_rep, ClassId,
};
use fragile_core::harness::gluing::gluings;
use fragile_core::harness::{Report, Session, Status};
use fragile_core::iso::{dedup, is_isomorphic};
use fragile_core::linalg::{rank_of, Matrix};
use fragile_core::matroid::{bit, mask_elements, Mask};
use fragile_core::structure::{fan_lengthenings, fan_shortening_moves, find_fans, glue_wheels, gpc, WheelGlueSpec};
use fragile_core::{LinearMatroid, ProductMatroid, Scalar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Check {
    what: String,
    ok: bool,
    /// Why a failure is expected and not a regression.
    gap: Option<&'static str>,
}

fn check(what: impl Into<String>, ok: bool) -> Check {
    Check { what: what.into(), ok, gap: None }
}

type Outcome = Result<Vec<Check>, String>;

fn report_checks(r: &Report, extra: &[(&str, usize)]) -> Vec<Check> {
    let mut v = vec![check(format!("{} {}", r.task, r.status), r.status == Status::Pass)];
    for (k, want) in extra {
        let got = r.counts.get(*k).copied();
        v.push(check(format!("{}: {k} = {got:?}, expected {want}", r.task), got == Some(*want)));
    }
    v
}

fn verify(s: &mut Session, task: &str, extra: &[(&str, usize)]) -> Outcome {
    let r = s.cmd_verify(task).map_err(|e| e.to_string())?;
    let mut v = report_checks(&r, extra);
    for n in &r.notes {
        v.push(check(format!("  {n}"), true));
    }
    Ok(v)
}

fn product(m: AnyMatroid) -> Option<ProductMatroid> {
    match m {
        AnyMatroid::Gf5x6(x) => Some(x),
        _ => None,
    }
}

fn c1() -> Outcome {
    let set = allowed_cross_ratios();
    // oracle: coordinates avoid 0 and 1, and no value fills three coordinates
    let mut oracle = BTreeSet::new();
    for code in 0..5u32.pow(6) {
        let d: [u8; 6] = std::array::from_fn(|i| (code / 5u32.pow(i as u32) % 5) as u8);
        let mut count = [0; 5];
        d.iter().for_each(|&x| count[x as usize] += 1);
        if d.iter().all(|&x| x >= 2) && count.iter().all(|&c| c < 3) {
            oracle.insert(Gf5x6::new(d));
        }
    }
    let mine: BTreeSet<Gf5x6> = set.iter().collect();
    let mut perms_ok = true;
    let mut sigma = [0usize, 1, 2, 3, 4, 5];
    for _ in 0..720 {
        perms_ok &= set.iter().all(|x| set.contains(tuple_permute(x, &sigma)));
        next_permutation(&mut sigma);
    }
    Ok(vec![
        check(format!("{} elements", set.len()), set.len() == 90),
        check("equal to the filtered 5^6 tuples", mine == oracle),
        check("closed under all 720 coordinate permutations", perms_ok),
    ])
}

fn next_permutation(a: &mut [usize; 6]) {
    let Some(i) = (0..5).rev().find(|&i| a[i] < a[i + 1]) else {
        a.reverse();
        return;
    };
    let j = (i + 1..6).rev().find(|&j| a[j] > a[i]).expect("exists");
    a.swap(i, j);
    a[i + 1..].reverse();
}

fn c2() -> Outcome {
    let u = canonical_u25();
    let k = inequivalent_projection_count(&u);
    Ok(vec![
        check("valid product representation", is_valid_product_rep(&u)),
        check(format!("{k} inequivalent projections"), k == 6),
    ])
}

fn c3(s: &mut Session) -> Outcome {
    verify(s, "N11", &[("r10_extensions", 1), ("n11_extensions", 0), ("n11_coextensions", 1)])
}

fn c4(s: &mut Session) -> Outcome {
    let n12 = named("N12").map_err(|e| e.to_string())?;
    let mut v: Vec<Check> =
        n12.evidence.iter().map(|e| check(format!("N12 evidence: {}", e.check), e.passed)).collect();
    v.extend(verify(s, "N12", &[])?);
    Ok(v)
}

fn c5(s: &mut Session) -> Outcome {
    let r = s.cmd_catalog(ClassId::H5Fragile, 9).map_err(|e| e.to_string())?;
    let mut v = Vec::new();
    for (size, want) in [(5, 2), (6, 4), (7, 4), (8, 8), (9, 20)] {
        let got = r.counts.get(&format!("size-{size}")).copied().unwrap_or(0);
        v.push(check(format!("size {size}: {got} classes, expected {want}"), got == want));
    }
    let six = s.h5_catalog(9).map_err(|e| e.to_string())?.level(6).to_vec();
    let contains = |m: &AnyMatroid| -> bool {
        six.iter().any(|x| match m {
            AnyMatroid::Gf2(y) => is_isomorphic(x, y),
            AnyMatroid::Gf5(y) => is_isomorphic(x, y),
            AnyMatroid::Gf5x6(y) => is_isomorphic(x, y),
        })
    };
    for name in ["U26", "U36", "U46", "P6", "Q6"] {
        let m = named(name).map_err(|e| e.to_string())?.matroid;
        let mut c = check(format!("size 6 contains {name}"), contains(&m));
        if name == "U36" {
            // every deletion keeps U35 and every contraction keeps U25
            let u36 = uniform::<Gf5>(3, 6).expect("U36");
            let fragile = is_fragile_table(u36.table(), &ClassId::H5Fragile.family());
            c.what =
                format!("{} (U36 is {}fragile, so it cannot be a member)", c.what, if fragile { "" } else { "not " });
            if !fragile {
                c.gap = Some("U36 is not {U25,U35}-fragile; the class cannot contain it");
            }
        }
        v.push(c);
    }
    v.extend(verify(s, "duality", &[])?);
    Ok(v)
}

fn c6(s: &mut Session) -> Outcome {
    let mut v = verify(s, "M9_9", &[("grown", 1)])?;
    v.extend(verify(s, "M9_1", &[("grown", 1)])?);
    Ok(v)
}

fn c7(s: &mut Session) -> Outcome {
    let mut v = Vec::new();
    for t in ["M9_18", "M9_7", "M9_15", "M9_2"] {
        v.extend(verify(s, t, &[])?);
    }
    Ok(v)
}

fn c8(s: &mut Session) -> Outcome {
    verify(s, "M9_0", &[])
}

fn c9(s: &mut Session) -> Outcome {
    let q = glue_wheels(
        &canonical_u25(),
        &WheelGlueSpec {
            triangles: vec![["a", "c", "b"].map(String::from)],
            ranks: vec![3],
            delete: ["b", "c"].into(),
        },
    )
    .map_err(|e| e.to_string())?;
    let cat = s.h5_catalog(9).map_err(|e| e.to_string())?.clone();
    let q6 = named("Q6").map_err(|e| e.to_string())?.matroid;
    let mut v = vec![
        check("U25 with a rank-3 wheel, b and c deleted, is a size-6 catalog entry", cat.index_of(&q).is_some()),
        check("and that entry is Q6", matches!(&q6, AnyMatroid::Gf5(x) if is_isomorphic(x, &q))),
    ];
    let m71 = s.named("M_7_1").map_err(|e| e.to_string())?.matroid;
    let m86 = s.named("M_8_6").map_err(|e| e.to_string())?.matroid;
    let (Some(m71), Some(m86)) = (product(m71), product(m86)) else {
        return Err("catalog names are not product-ring matroids".into());
    };
    let glued: Vec<ProductMatroid> = m71
        .triangles()
        .into_iter()
        .flat_map(|t| {
            let l: Vec<String> = t.0.into_iter().collect();
            [[0, 1, 2], [1, 0, 2], [0, 2, 1]].map(|p| [l[p[0]].clone(), l[p[1]].clone(), l[p[2]].clone()])
        })
        .flat_map(|t| gluings(&m71, &[t], 8))
        .collect();
    v.push(check(
        format!("{} gluings of a rank-3 wheel onto M7_1 at size 8 include M8_6", glued.len()),
        glued.iter().any(|g| is_isomorphic(g, &m86)),
    ));
    v.push(check("M8_6 is a size-8 catalog entry", cat.index_of(&m86).is_some()));
    Ok(v)
}

fn gf5_random(rng: &mut StdRng, rows: usize, n: usize) -> LinearMatroid<Gf5> {
    let cols: Vec<Vec<Gf5>> = (0..n).map(|_| (0..rows).map(|_| Gf5::new(rng.gen_range(0..5))).collect()).collect();
    LinearMatroid::from_columns_matrix(Matrix::from_columns(rows, &cols), (0..n).map(|i| format!("e{i}")).collect())
        .expect("field")
}

fn ranks_by_label<S: Scalar>(a: &LinearMatroid<S>, b: &LinearMatroid<S>) -> bool {
    let la: BTreeSet<&String> = a.labels().iter().collect();
    let lb: BTreeSet<&String> = b.labels().iter().collect();
    la == lb && (0..1u32 << a.size()).all(|x| a.rank_of(&a.set_of(x)).ok() == b.rank_of(&a.set_of(x)).ok())
}

fn c10() -> Outcome {
    let seed = std::env::var("FRAGILE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x5eed);
    let mut rng = StdRng::seed_from_u64(seed);
    let family = ClassId::H5Fragile.family();
    let mut fails: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bump = |k: &'static str, ok: bool| {
        *fails.entry(k).or_default() += usize::from(!ok);
    };
    for _ in 0..60 {
        let (r, n) = (rng.gen_range(1..=4), rng.gen_range(2..=9));
        let m = gf5_random(&mut rng, r, n);
        let t = m.table();
        let full: Mask = (1 << n) - 1;
        let mut axioms = t.rank_of(0) == 0;
        for x in 0..=full {
            let cols: Vec<Vec<Gf5>> = mask_elements(x).map(|j| m.column(j)).collect();
            axioms &= t.rank_of(x) == rank_of(&cols) && t.rank_of(x) <= x.count_ones() as usize;
            let y = rng.gen_range(0..=full);
            axioms &= t.rank_of(x | y) + t.rank_of(x & y) <= t.rank_of(x) + t.rank_of(y);
            axioms &= (0..n).all(|e| t.rank_of(x | bit(e)) - t.rank_of(x) <= 1);
        }
        bump("rank axioms", axioms);
        bump("duality involution", ranks_by_label(&m.dual().dual(), &m));
        let x = m.set_of(rng.gen_range(0..=full));
        let minor_dual = ranks_by_label(&m.contract(&x).unwrap().dual(), &m.dual().delete(&x).unwrap())
            && ranks_by_label(&m.delete(&x).unwrap().dual(), &m.dual().contract(&x).unwrap());
        bump("minor duality", minor_dual);
        bump("fragility duality", is_fragile_table(t, &family) == is_fragile_table(m.dual().table(), &family));
        let copies = vec![m.clone(), m.reorder(&(0..n).rev().collect::<Vec<_>>()), gf5_random(&mut rng, r, n)];
        let once = dedup(copies);
        bump("dedup idempotence", dedup(once.clone()).len() == once.len() && once.len() <= 2);
    }
    let (k4, _, _) = wheel::<Gf5>(3).expect("W3");
    for _ in 0..60 {
        let extra = rng.gen_range(0..=4);
        let mut cols: Vec<Vec<Gf5>> = vec![
            vec![Gf5::new(1), Gf5::new(0), Gf5::new(0)],
            vec![Gf5::new(0), Gf5::new(1), Gf5::new(0)],
            vec![Gf5::new(1), Gf5::new(rng.gen_range(1..5)), Gf5::new(0)],
        ];
        cols.extend((0..extra).map(|_| (0..3).map(|_| Gf5::new(rng.gen_range(0..5))).collect()));
        let labels = (0..3).map(|i| format!("t{i}")).chain((0..extra).map(|i| format!("e{i}"))).collect();
        let m1 = LinearMatroid::from_columns_matrix(Matrix::from_columns(3, &cols), labels).expect("field");
        let k4_tris = k4.triangles();
        let chosen: Vec<String> = k4_tris[rng.gen_range(0..k4_tris.len())].iter().cloned().collect();
        let map: BTreeMap<String, String> = k4
            .labels()
            .iter()
            .map(|l| match chosen.iter().position(|c| c == l) {
                Some(i) => (l.clone(), format!("t{i}")),
                None => (l.clone(), format!("w{l}")),
            })
            .collect();
        let m2 = k4.relabel(&map).expect("relabel");
        let p = gpc(&m1, &m2, ["t0", "t1", "t2"]).expect("triangle");
        let side = |m: &LinearMatroid<Gf5>| m.labels().iter().fold(0, |a, l| a | bit(p.index_of(l).unwrap()));
        let pull =
            |m: &LinearMatroid<Gf5>, x: Mask| mask_elements(x).fold(0, |a, j| a | bit(m.index_of(p.label(j)).unwrap()));
        let (e1, e2) = (side(&m1), side(&m2));
        let agree = (0..1u32 << p.size()).all(|x| {
            p.table().is_flat(x) == (m1.table().is_flat(pull(&m1, x & e1)) && m2.table().is_flat(pull(&m2, x & e2)))
        });
        bump("gpc flat characterization", agree && p.size() <= 10);
    }
    for m in [named("N11+"), named("N12")] {
        let AnyMatroid::Gf2(m) = m.map_err(|e| e.to_string())?.matroid else { return Err("binary".into()) };
        for fan in find_fans(&m).into_iter().filter(|f| f.len() >= 4) {
            for mv in fan_shortening_moves(&m, &fan).map_err(|e| e.to_string())? {
                if in_class(&mv.minor, ClassId::FanoFragile) {
                    let back = fan_lengthenings(&mv.minor, std::slice::from_ref(&mv.residual), ClassId::FanoFragile)
                        .map_err(|e| e.to_string())?;
                    bump("fan-move round trip", back.iter().any(|x| is_isomorphic(x, &m)));
                }
            }
        }
    }
    Ok(fails.into_iter().map(|(k, f)| check(format!("{k}: {f} failures"), f == 0)).collect())
}

fn c11() -> Outcome {
    let k4 = Graph::complete(4);
    let g =
        graft(&Graft { graph: k4, terminals: vec![0, 1, 2, 3], graft_label: "g".into() }).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(11);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let mut graph = Graph::new((0..n).map(|i| format!("v{i}")).collect());
        for v in 1..n {
            let u = rng.gen_range(0..v);
            graph.add_edge(u, v, format!("x{v}"));
        }
        for k in 0..rng.gen_range(0..6) {
            graph.add_edge(rng.gen_range(0..n), rng.gen_range(0..n), format!("y{k}"));
        }
        let terminals: Vec<usize> = std::iter::once(0).chain((1..n).filter(|_| rng.gen_bool(0.5))).collect();
        let gr =
            graft(&Graft { graph: graph.clone(), terminals, graft_label: "g".into() }).map_err(|e| e.to_string())?;
        let restricted = gr.delete_labels(&["g"]).map_err(|e| e.to_string())?;
        bad += usize::from(!ranks_by_label(&restricted, &graphic::<Gf2>(&graph)));
    }
    Ok(vec![
        check("graft(K4, all vertices) is F7", is_isomorphic(&g, &fano())),
        check(format!("graft minus the graft element is the cycle matroid: {bad} of 100 differ"), bad == 0),
    ])
}

fn main() -> ExitCode {
    let cache = tempfile::tempdir().expect("temporary cache");
    let mut s = Session::new(cache.path());
    type Run<'a> = Box<dyn FnOnce(&mut Session) -> Outcome + 'a>;
    let criteria: Vec<(&str, Run)> = vec![
        ("allowed cross ratios", Box::new(|_| c1())),
        ("canonical product-ring U25", Box::new(|_| c2())),
        ("Fano side: R10, N11, N11+", Box::new(c3)),
        ("Fano side: N12", Box::new(c4)),
        ("H5 catalog", Box::new(c5)),
        ("terminal matroids M9_9, M9_1", Box::new(c6)),
        ("fan-extension cases", Box::new(c7)),
        ("M9_0 dichotomy", Box::new(c8)),
        ("reconstruction by gluing", Box::new(c9)),
        ("property suites", Box::new(|_| c10())),
        ("grafts", Box::new(|_| c11())),
    ];
    // FRAGILE_ACCEPTANCE=3,10 runs a subset
    let only: Option<BTreeSet<usize>> =
        std::env::var("FRAGILE_ACCEPTANCE").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut regressions = 0;
    let mut gaps = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let start = Instant::now();
        let result = run(&mut s);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(checks) => {
                let pass = checks.iter().all(|c| c.ok);
                println!("criterion {:>2}: {} {name} ({secs:.1} s)", i + 1, if pass { "PASS" } else { "FAIL" });
                for c in &checks {
                    println!("    [{}] {}", if c.ok { "ok" } else { "FAIL" }, c.what);
                    if !c.ok {
                        match c.gap {
                            Some(why) => {
                                println!("           documented gap: {why}");
                                gaps += 1;
                            }
                            None => regressions += 1,
                        }
                    }
                }
            }
            Err(e) => {
                println!("criterion {:>2}: FAIL {name} ({secs:.1} s)\n    error: {e}", i + 1);
                regressions += 1;
            }
        }
    }
    println!("acceptance: {regressions} unexplained failures, {gaps} documented gaps");
    if regressions == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
