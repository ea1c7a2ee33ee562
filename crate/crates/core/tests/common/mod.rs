//! Brute-force reference implementations written without the library's
//! search code, plus the shared random corpus.

#![allow(dead_code)]

use gapwidth::generators::random_xor_system;
use gapwidth::{CnfSystem, Graph, WeightedGraph, XorSystem};

/// Max total multiplicity of satisfied equations over all assignments.
pub fn brute_max_xor(sys: &XorSystem) -> u64 {
    let n = sys.num_vars();
    assert!(n <= 24);
    (0u64..1 << n)
        .map(|x| {
            sys.equations()
                .iter()
                .filter(|e| e.vars.iter().fold(false, |acc, &v| acc ^ (x >> v & 1 == 1)) == e.rhs)
                .map(|e| e.mult)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0)
}

pub fn brute_max_cnf(sys: &CnfSystem) -> u64 {
    let n = sys.num_vars();
    assert!(n <= 24);
    (0u64..1 << n)
        .map(|x| {
            sys.clauses()
                .iter()
                .filter(|c| c.lits.iter().any(|l| (x >> l.var & 1 == 1) == l.positive))
                .map(|c| c.mult)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0)
}

/// Minimum weight vertex cover by trying every subset.
pub fn brute_weighted_vc(g: &WeightedGraph) -> u64 {
    let n = g.graph().num_vertices();
    assert!(n <= 28);
    let edges: Vec<(usize, usize)> = g.graph().edges().collect();
    (0u64..1 << n)
        .filter(|s| edges.iter().all(|&(u, v)| s >> u & 1 == 1 || s >> v & 1 == 1))
        .map(|s| (0..n).filter(|&v| s >> v & 1 == 1).map(|v| g.weight(v)).sum::<u64>())
        .min()
        .unwrap_or(0)
}

pub fn brute_vc(g: &Graph) -> u64 {
    brute_weighted_vc(&WeightedGraph::unit(g.clone()))
}

/// The fixed corpus of 50 small systems: `n ∈ 3..=10`, `m ∈ 1..=6`.
pub fn corpus() -> Vec<XorSystem> {
    (0..50u64)
        .map(|s| random_xor_system(3 + (s % 8) as usize, 1 + (s % 6) as usize, 1000 + s).unwrap())
        .collect()
}

/// Erdős–Rényi graph with edge probability `num/den`, from a simple LCG.
pub fn random_graph(n: usize, num: u64, den: u64, seed: u64) -> Graph {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if (state >> 33) % den < num {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// A pseudo-random permutation of `0..n`.
pub fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = ((state >> 33) % (i as u64 + 1)) as usize;
        p.swap(i, j);
    }
    p
}

/// Solvability of `rows · x = rhs` over F2, rows as bitmasks (n ≤ 64).
pub fn gauss_solvable(rows: &[(u64, bool)]) -> bool {
    let mut pivot: [Option<(u64, bool)>; 64] = [None; 64];
    for &(mut r, mut b) in rows {
        while r != 0 {
            let top = 63 - r.leading_zeros() as usize;
            match pivot[top] {
                Some((pr, pb)) => {
                    r ^= pr;
                    b ^= pb;
                }
                None => {
                    pivot[top] = Some((r, b));
                    break;
                }
            }
        }
        if r == 0 && b {
            return false;
        }
    }
    true
}
