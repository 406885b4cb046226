#![allow(dead_code)]

use netpassivity::graph::Digraph;
use netpassivity::suite::random_balanced_digraph;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Arbitrary simple digraph on `1..=n_max` vertices.
pub fn digraph(n_max: usize) -> impl Strategy<Value = Digraph> {
    (1..=n_max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|s| (0..n).map(move |t| (s, t)))
                .filter(|&(s, t)| s != t && mask[s * n + t])
                .collect();
            Digraph::from_zero_based(n, &edges).unwrap()
        })
    })
}

pub fn balanced_digraph(n_max: usize) -> impl Strategy<Value = Digraph> {
    any::<u64>().prop_map(move |seed| random_balanced_digraph(&mut ChaCha8Rng::seed_from_u64(seed), n_max))
}

/// Transitive closure by repeated squaring of the adjacency relation.
pub fn reachability(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n_vertices();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges() {
        r[e.source][e.target] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
