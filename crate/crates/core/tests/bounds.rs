use std::time::{Duration, Instant};

use clustered::greedy::{c2_guarantee, clustered_c2_tokens, clustered_general, clustered_k1, general_guarantee, k1_guarantee};
use clustered::model::random_ktree;
use clustered::{Graph, KTreeModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 200;

/// A random k-tree, thinned to a random spanning-or-not subgraph on odd seeds.
/// Every edge of the thinned graph is still a model edge, so the model stays valid.
fn instance(k: usize, n: usize, seed: u64) -> (Graph, KTreeModel) {
    let (g, m) = random_ktree(k, n, seed).unwrap();
    if seed.is_multiple_of(2) {
        return (g, m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let edges: Vec<_> = g.edges().filter(|_| rng.gen_bool(0.7)).collect();
    (Graph::new(n, &edges).unwrap(), m)
}

fn sizes(seed: u64, lo: usize, hi: usize) -> usize {
    lo + (seed as usize * 7919) % (hi - lo + 1)
}

#[test]
fn general_bound_sweep() {
    let start = Instant::now();
    for k in 1..=4 {
        for c in 1..=5 {
            for seed in 0..SEEDS {
                let n = sizes(seed, k + 1, 60);
                let (g, m) = instance(k, n, seed);
                let s = clustered_general(&m, &g, c).unwrap();
                assert!(g.is_c_clustered(s.vertices(), c).unwrap());
                assert!(s.len() >= general_guarantee(n, k, c), "k={k} c={c} seed={seed}: {} < bound", s.len());
            }
        }
    }
    assert!(start.elapsed() < Duration::from_secs(20));
}

#[test]
fn forest_bound_sweep() {
    for c in 1..=6 {
        for seed in 0..SEEDS {
            let n = sizes(seed, 2, 100);
            let (g, m) = instance(1, n, seed);
            let s = clustered_k1(&m, &g, c).unwrap();
            assert!(g.is_c_clustered(s.vertices(), c).unwrap());
            assert!(s.len() >= k1_guarantee(n, c), "c={c} seed={seed}");
        }
    }
}

#[test]
fn token_procedure_sweep() {
    let start = Instant::now();
    let mut surgeries = 0;
    for k in 1..=5 {
        for seed in 0..SEEDS {
            let n = sizes(seed, k + 1, 300);
            let (g, m) = instance(k, n, seed);
            let out = clustered_c2_tokens(&m, &g).unwrap_or_else(|e| panic!("k={k} seed={seed}: {e}"));
            let s = out.set.vertices();
            assert!(g.is_c_clustered(s, 2).unwrap());
            assert!(s.len() >= c2_guarantee(n, k), "k={k} seed={seed}");
            assert!(k * s.len() >= 2 * out.discarded.len());
            assert_eq!(s.len() + out.discarded.len(), n);
            surgeries += out.cases.surgery;
        }
    }
    assert!(surgeries > 0, "the sweep never exercised surgery");
    assert!(start.elapsed() < Duration::from_secs(40));
}
