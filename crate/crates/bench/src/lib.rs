//! Instance generators shared by the benchmarks.

use muse_core::harness::{gen_random, random_chain, Topology, TopologySpec};
use muse_core::{build_muse, CspInstance, MuseInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random lattice: `layers` layers of `width` nodes.
pub fn lattice(width: usize, layers: usize, labels: usize, p: f64, seed: u64) -> MuseInstance {
    gen_random(&TopologySpec {
        kind: Topology::Lattice,
        branching: width,
        path_length: layers,
        labels,
        p,
        seed,
    })
    .expect("valid lattice spec")
}

/// Random tree with the given branching factor and depth.
pub fn tree(branching: usize, depth: usize, labels: usize, p: f64, seed: u64) -> MuseInstance {
    gen_random(&TopologySpec {
        kind: Topology::Tree,
        branching,
        path_length: depth,
        labels,
        p,
        seed,
    })
    .expect("valid tree spec")
}

/// Single random segment of `n` nodes.
pub fn chain(n: usize, labels: usize, p: f64, seed: u64) -> MuseInstance {
    random_chain(n, labels, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Lattice whose first layer supports nothing, so filtering deletes every
/// label.
pub fn poisoned_lattice(width: usize, layers: usize, labels: usize) -> MuseInstance {
    let n = width * layers;
    let mut edges = Vec::new();
    for layer in 0..layers - 1 {
        for x in 0..width {
            for y in 0..width {
                edges.push((layer * width + x, (layer + 1) * width + y));
            }
        }
    }
    let mut m = build_muse(CspInstance::new(n, labels), edges, 0..width, n - width..n).expect("lattice is a DAG");
    for i in 0..width {
        for j in width..n {
            for a in 0..labels {
                for b in 0..labels {
                    m.csp_mut().set_r2(i, a, j, b, false);
                }
            }
        }
    }
    m
}
