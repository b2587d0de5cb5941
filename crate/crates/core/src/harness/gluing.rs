//! Bounded enumeration of matroids obtained by gluing wheels to a fixed list
//! of triangles.

use std::collections::BTreeSet;

use crate::algebra::Scalar;
use crate::iso::dedup;
use crate::matroid::{ElementSet, LinearMatroid};
use crate::structure::{glue_wheels, WheelGlueSpec};

fn rank_vectors(t: usize, budget: usize) -> Vec<Vec<usize>> {
    // a rank-n wheel adds 2n - 3 elements
    if t == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut n = 2;
    while 2 * n - 3 <= budget {
        for mut rest in rank_vectors(t - 1, budget - (2 * n - 3)) {
            rest.insert(0, n);
            out.push(rest);
        }
        n += 1;
    }
    out
}

/// Every matroid on `size` elements obtained from `base` by gluing wheels to
/// all of `triangles` (rank-2 wheels act as relabelings), up to isomorphism.
pub fn gluings<S: Scalar>(base: &LinearMatroid<S>, triangles: &[[String; 3]], size: usize) -> Vec<LinearMatroid<S>> {
    let union: Vec<String> = triangles.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let required: BTreeSet<&String> =
        triangles.iter().map(|t| &t[1]).filter(|b| !triangles.iter().any(|[a, _, c]| a == *b || c == *b)).collect();
    let max_added = (size + union.len()).saturating_sub(base.size());
    let mut found = Vec::new();
    for ranks in rank_vectors(triangles.len(), max_added) {
        let added: usize = ranks.iter().map(|n| 2 * n - 3).sum();
        let Some(deleted) = (base.size() + added).checked_sub(size) else { continue };
        for mask in 0u32..(1 << union.len()) {
            if mask.count_ones() as usize != deleted {
                continue;
            }
            let delete: ElementSet =
                union.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l.as_str()).collect();
            if required.iter().any(|b| !delete.contains(b)) {
                continue;
            }
            let spec = WheelGlueSpec { triangles: triangles.to_vec(), ranks: ranks.clone(), delete };
            if let Ok(m) = glue_wheels(base, &spec) {
                found.push(m);
            }
        }
    }
    dedup(found)
}

pub fn triangle(a: &str, b: &str, c: &str) -> [String; 3] {
    [a.to_string(), b.to_string(), c.to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_vectors_respect_the_budget() {
        assert_eq!(rank_vectors(1, 3), vec![vec![2], vec![3]]);
        assert!(rank_vectors(2, 1).is_empty());
        assert_eq!(rank_vectors(2, 5), vec![vec![2, 2], vec![2, 3], vec![3, 2]]);
        assert!(rank_vectors(2, 6).contains(&vec![4, 2]));
    }
}
