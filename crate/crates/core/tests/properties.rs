use std::collections::BTreeMap;

use fragile_core::algebra::{Gf2, Gf5, Scalar};
use fragile_core::catalog::{graft, graphic, wheel, Graft, Graph};
use fragile_core::fragility::{is_fragile_table, ClassId};
use fragile_core::iso::{dedup, is_isomorphic};
use fragile_core::linalg::{rank_of, Matrix};
use fragile_core::matroid::{bit, mask_elements, ElementSet, LinearMatroid, Mask};
use fragile_core::structure::gpc;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn seed() -> u64 {
    std::env::var("FRAGILE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x5eed)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(seed()), failure_persistence: None, ..ProptestConfig::default() }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

fn gf5_matroid(rows: usize, entries: &[u8]) -> LinearMatroid<Gf5> {
    let n = entries.len() / rows;
    let cols: Vec<Vec<Gf5>> = (0..n).map(|j| (0..rows).map(|i| Gf5::new(entries[j * rows + i])).collect()).collect();
    LinearMatroid::from_columns_matrix(Matrix::from_columns(rows, &cols), labels(n)).unwrap()
}

/// Random GF(5) column matroid with 1..=4 rows and up to `max_n` columns.
fn matroid(max_n: usize) -> impl Strategy<Value = LinearMatroid<Gf5>> {
    (1usize..=4, 2usize..=max_n)
        .prop_flat_map(|(r, n)| (Just(r), proptest::collection::vec(0u8..5, r * n)))
        .prop_map(|(r, e)| gf5_matroid(r, &e))
}

fn label_set<S: Scalar>(m: &LinearMatroid<S>, mask: Mask) -> ElementSet {
    m.set_of(mask)
}

/// Rank functions agree on every set of labels.
fn same_matroid<S: Scalar>(a: &LinearMatroid<S>, b: &LinearMatroid<S>) -> bool {
    let mut la = a.labels().to_vec();
    let mut lb = b.labels().to_vec();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    (0..1u32 << a.size()).all(|x| {
        let s = label_set(a, x);
        b.rank_of(&s).unwrap() == a.rank_of(&s).unwrap()
    })
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn rank_axioms_and_elimination_agree(m in matroid(8)) {
        let t = m.table();
        let n = m.size();
        prop_assert_eq!(t.rank_of(0), 0);
        for x in 0..1u32 << n {
            let cols: Vec<Vec<Gf5>> = mask_elements(x).map(|j| m.column(j)).collect();
            prop_assert_eq!(t.rank_of(x), rank_of(&cols));
            prop_assert!(t.rank_of(x) <= x.count_ones() as usize);
            for e in 0..n {
                let up = t.rank_of(x | bit(e));
                prop_assert!(up == t.rank_of(x) || up == t.rank_of(x) + 1);
            }
        }
        for x in 0..1u32 << n {
            for y in (0..1u32 << n).step_by(3) {
                prop_assert!(t.rank_of(x | y) + t.rank_of(x & y) <= t.rank_of(x) + t.rank_of(y));
            }
        }
    }

    #[test]
    fn duality_is_an_involution(m in matroid(8)) {
        let d = m.dual();
        prop_assert_eq!(d.rank(), m.size() - m.rank());
        prop_assert!(same_matroid(&d.dual(), &m));
        let n = m.size();
        let full = (1u32 << n) - 1;
        for x in 0..1u32 << n {
            let s = label_set(&m, x);
            let comp = label_set(&m, full & !x);
            prop_assert_eq!(d.rank_of(&s).unwrap(), x.count_ones() as usize + m.rank_of(&comp).unwrap() - m.rank());
        }
    }

    #[test]
    fn contraction_dualizes_to_deletion(m in matroid(8), pick in any::<u32>()) {
        let x = pick & ((1u32 << m.size()) - 1) & !1;
        let s = label_set(&m, x);
        let lhs = m.contract(&s).unwrap().dual();
        let rhs = m.dual().delete(&s).unwrap();
        prop_assert!(same_matroid(&lhs, &rhs));
        let lhs = m.delete(&s).unwrap().dual();
        let rhs = m.dual().contract(&s).unwrap();
        prop_assert!(same_matroid(&lhs, &rhs));
    }

    #[test]
    fn fragility_commutes_with_duality(m in matroid(8)) {
        let family = ClassId::H5Fragile.family();
        prop_assert_eq!(is_fragile_table(m.table(), &family), is_fragile_table(m.dual().table(), &family));
    }

    #[test]
    fn dedup_is_idempotent(ms in proptest::collection::vec(matroid(6), 1..6), swap in any::<bool>()) {
        let once = dedup(ms.clone());
        prop_assert_eq!(dedup(once.clone()).len(), once.len());
        // relabelled and reordered copies add no classes
        let mut more = ms.clone();
        for m in &ms {
            let map: BTreeMap<String, String> = m.labels().iter().map(|l| (l.clone(), format!("{l}'"))).collect();
            let r = m.relabel(&map).unwrap();
            let order: Vec<usize> = if swap { (0..r.size()).rev().collect() } else { (0..r.size()).collect() };
            more.push(r.reorder(&order));
        }
        prop_assert_eq!(dedup(more).len(), once.len());
        for (i, a) in once.iter().enumerate() {
            for b in &once[i + 1..] {
                prop_assert!(!is_isomorphic(a, b));
            }
        }
    }

    #[test]
    fn gpc_flats_are_the_glued_pairs_of_flats(rest in proptest::collection::vec(0u8..5, 3..=12), tri in 0usize..4) {
        // m1: a triangle {x,y,x+y} in rank 3 plus up to four random points
        let mut entries = vec![1, 0, 0, 0, 1, 0, 1, 1, 0];
        entries.extend(rest.iter().take(rest.len() / 3 * 3));
        let m1 = gf5_matroid(3, &entries);
        let t = [m1.label(0).to_string(), m1.label(2).to_string(), m1.label(1).to_string()];
        prop_assume!(m1.table().is_triangle(bit(0) | bit(1) | bit(2)));
        let (k4, _, _) = wheel::<Gf5>(3).unwrap();
        let tris = k4.triangles();
        let chosen: Vec<String> = tris[tri % tris.len()].iter().cloned().collect();
        let map: BTreeMap<String, String> = k4
            .labels()
            .iter()
            .map(|l| match chosen.iter().position(|c| c == l) {
                Some(i) => (l.clone(), t[i].clone()),
                None => (l.clone(), format!("w{l}")),
            })
            .collect();
        let m2 = k4.relabel(&map).unwrap();
        let p = gpc(&m1, &m2, [t[0].as_str(), t[1].as_str(), t[2].as_str()]).unwrap();
        prop_assert!(p.size() <= 10);
        let side = |m: &LinearMatroid<Gf5>| -> Mask {
            m.labels().iter().fold(0, |acc, l| acc | bit(p.index_of(l).unwrap()))
        };
        let (e1, e2) = (side(&m1), side(&m2));
        let restrict = |m: &LinearMatroid<Gf5>, x: Mask| -> Mask {
            mask_elements(x).fold(0, |acc, j| acc | bit(m.index_of(p.label(j)).unwrap()))
        };
        for x in 0..1u32 << p.size() {
            let oracle = m1.table().is_flat(restrict(&m1, x & e1)) && m2.table().is_flat(restrict(&m2, x & e2));
            prop_assert_eq!(p.table().is_flat(x), oracle, "set {:b}", x);
        }
    }
}

fn random_connected_graph(rng: &mut StdRng) -> Graph {
    let n = rng.gen_range(3..=6);
    let mut g = Graph::new((0..n).map(|i| format!("v{i}")).collect());
    let mut k = 0;
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v, format!("t{k}"));
        k += 1;
    }
    for _ in 0..rng.gen_range(0..5) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.add_edge(u, v, format!("t{k}"));
        k += 1;
    }
    g
}

#[test]
fn graft_restriction_is_the_cycle_matroid() {
    let mut rng = StdRng::seed_from_u64(seed());
    for _ in 0..100 {
        let graph = random_connected_graph(&mut rng);
        let n = graph.vertices.len();
        let mut terminals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if terminals.is_empty() {
            terminals.push(0);
        }
        let g = graft(&Graft { graph: graph.clone(), terminals, graft_label: "g".into() }).unwrap();
        let restricted = g.delete_labels(&["g"]).unwrap();
        assert!(same_matroid(&restricted, &graphic::<Gf2>(&graph)));
    }
}
