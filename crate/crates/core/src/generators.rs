//! Seeded random constructions: incidence systems, right-hand sides, gap
//! pairs, and regular graphs.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`. Independent
//! streams derived from one user seed are separated with [`derive_seed`],
//! so outputs are bit-identical across platforms for a fixed seed.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gadgets::{gadget, homogeneous};
use crate::games::k_locally_satisfiable;
use crate::graph::Graph;
use crate::oracles::{max_xor, rank_f2, solve_f2};
use crate::structures::{Encoding, XorEquation, XorSystem};
use crate::Fraction;

/// Default number of attempts for rejection sampling.
pub const DEFAULT_RETRIES: usize = 10_000;
/// Default cap on enumerated subsets in expansion checks.
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer of `seed` mixed with a stream tag.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_ROWS: u64 = 1;
const STREAM_RHS: u64 = 2;

/// `m × n` 0/1 matrix with exactly three ones per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteIncidence {
    n: usize,
    rows: Vec<[usize; 3]>,
}

impl BipartiteIncidence {
    pub fn new(n: usize, rows: Vec<[usize; 3]>) -> Result<Self> {
        let mut rows = rows;
        for r in rows.iter_mut() {
            r.sort_unstable();
            if r[0] == r[1] || r[1] == r[2] || r[2] >= n {
                return Err(Error::InvalidInstance(format!("bad incidence row {r:?}")));
            }
        }
        Ok(BipartiteIncidence { n, rows })
    }

    pub fn num_columns(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[usize; 3]] {
        &self.rows
    }
}

/// `m = r·n` rows, each a uniform 3-subset of `0..n`, drawn independently.
pub fn random_incidence(n: usize, r: usize, seed: u64) -> Result<BipartiteIncidence> {
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 columns".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let mut g = rng(derive_seed(seed, STREAM_ROWS));
    let rows = (0..r * n)
        .map(|_| {
            let s = sample(&mut g, n, 3);
            let mut row = [s.index(0), s.index(1), s.index(2)];
            row.sort_unstable();
            row
        })
        .collect();
    Ok(BipartiteIncidence { n, rows })
}

/// `m` independent uniform bits.
pub fn rhs_random(m: usize, seed: u64) -> Vec<bool> {
    let mut g = rng(derive_seed(seed, STREAM_RHS));
    (0..m).map(|_| g.gen::<bool>()).collect()
}

/// One unit-multiplicity equation per row; identical rows with equal
/// right-hand sides consolidate.
pub fn system_from_incidence(a: &BipartiteIncidence, b: &[bool]) -> Result<XorSystem> {
    if b.len() != a.num_rows() {
        return Err(Error::LengthMismatch {
            expected: a.num_rows(),
            got: b.len(),
        });
    }
    XorSystem::new(
        a.n,
        a.rows.iter().zip(b).map(|(r, &bit)| XorEquation::new(*r, bit, 1)),
    )
}

/// A uniformly random system with `m` equations on `n` variables.
pub fn random_xor_system(n: usize, m: usize, seed: u64) -> Result<XorSystem> {
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 variables".into()));
    }
    let mut g = rng(derive_seed(seed, STREAM_ROWS));
    let rows: Vec<[usize; 3]> = (0..m)
        .map(|_| {
            let s = sample(&mut g, n, 3);
            let mut row = [s.index(0), s.index(1), s.index(2)];
            row.sort_unstable();
            row
        })
        .collect();
    let b = rhs_random(m, seed);
    system_from_incidence(&BipartiteIncidence { n, rows }, &b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionCheck {
    Pass,
    /// The first violating row set in (size, lexicographic) order.
    Fail(Vec<usize>),
}

fn unique_neighbours(a: &BipartiteIncidence, set: &[usize], count: &mut [u8]) -> usize {
    for &u in set {
        for &c in &a.rows[u] {
            count[c] += 1;
        }
    }
    let mut unique = 0;
    for &u in set {
        for &c in &a.rows[u] {
            if count[c] == 1 {
                unique += 1;
            }
        }
    }
    for &u in set {
        for &c in &a.rows[u] {
            count[c] = 0;
        }
    }
    unique
}

fn subset_count(m: usize, s_max: usize) -> u128 {
    (1..=s_max.min(m) as u64).fold(0u128, |acc, j| {
        acc + (0..j).fold(1u128, |x, i| x * (m as u128 - i as u128) / (i as u128 + 1))
    })
}

/// Advances `idx` to the next `j`-subset of `0..m` in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let j = idx.len();
    let mut i = j;
    while i > 0 {
        i -= 1;
        if idx[i] < m - j + i {
            idx[i] += 1;
            for t in i + 1..j {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every nonempty row subset of size at most `s_max`, by size
/// then lexicographically, stopping at the first `false`.
fn for_each_subset(m: usize, s_max: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    for j in 1..=s_max.min(m) {
        let mut idx: Vec<usize> = (0..j).collect();
        loop {
            if !f(&idx) {
                return false;
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    true
}

/// Checks `|∂T| ≥ β|T|` for every row set `T` with `|T| ≤ s_max`, where
/// `∂T` are the columns adjacent to exactly one row of `T`. Refuses when
/// the number of subsets exceeds `budget`.
pub fn check_unique_neighbour_expansion(
    a: &BipartiteIncidence,
    s_max: usize,
    beta: Fraction,
    budget: u64,
) -> Result<ExpansionCheck> {
    let m = a.num_rows();
    let needed = subset_count(m, s_max);
    if needed > budget as u128 {
        return Err(Error::budget("expansion-check", format!("{needed} subsets"), budget));
    }
    let mut count = vec![0u8; a.n];
    let mut violator = None;
    for_each_subset(m, s_max, |t| {
        let d = unique_neighbours(a, t, &mut count) as u128;
        if Fraction::from_integer(d) < beta * Fraction::from_integer(t.len() as u128) {
            violator = Some(t.to_vec());
            false
        } else {
            true
        }
    });
    Ok(match violator {
        None => ExpansionCheck::Pass,
        Some(t) => ExpansionCheck::Fail(t),
    })
}

/// Rejection sampling: the first seed-derived incidence passing the
/// expansion check, with the attempt index that produced it.
pub fn expander_incidence(
    n: usize,
    r: usize,
    s_max: usize,
    beta: Fraction,
    seed: u64,
    retries: usize,
    budget: u64,
) -> Result<(BipartiteIncidence, usize)> {
    for attempt in 0..retries {
        let a = random_incidence(n, r, derive_seed(seed, 1000 + attempt as u64))?;
        if check_unique_neighbour_expansion(&a, s_max, beta, budget)? == ExpansionCheck::Pass {
            return Ok((a, attempt));
        }
    }
    Err(Error::RetriesExhausted(retries))
}

/// Every row subset of size at most `s_max` is linearly independent over
/// F2, equivalently every such subsystem is satisfiable for every
/// right-hand side. Returns the first dependent subset otherwise.
pub fn small_subsets_independent(a: &BipartiteIncidence, s_max: usize, budget: u64) -> Result<Option<Vec<usize>>> {
    let needed = subset_count(a.num_rows(), s_max);
    if needed > budget as u128 {
        return Err(Error::budget("subset-independence", format!("{needed} subsets"), budget));
    }
    let mut bad = None;
    for_each_subset(a.num_rows(), s_max, |t| {
        let rank = rank_f2(a.n, t.iter().map(|&u| &a.rows[u][..]));
        if rank < t.len() {
            bad = Some(t.to_vec());
            false
        } else {
            true
        }
    });
    Ok(bad)
}

/// Every subsystem with at most `s_max` equations of `Ax = b` is
/// satisfiable (Gaussian elimination per subset). Returns the first
/// unsatisfiable subset otherwise.
pub fn small_subsystems_satisfiable(
    a: &BipartiteIncidence,
    b: &[bool],
    s_max: usize,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    if b.len() != a.num_rows() {
        return Err(Error::LengthMismatch {
            expected: a.num_rows(),
            got: b.len(),
        });
    }
    let needed = subset_count(a.num_rows(), s_max);
    if needed > budget as u128 {
        return Err(Error::budget("subsystem-check", format!("{needed} subsets"), budget));
    }
    let mut bad = None;
    for_each_subset(a.num_rows(), s_max, |t| {
        if solve_f2(a.n, t.iter().map(|&u| (&a.rows[u][..], b[u]))).is_none() {
            bad = Some(t.to_vec());
            false
        } else {
            true
        }
    });
    Ok(bad)
}

/// A satisfiable / hard pair of gadget instances built from one random
/// seed system `S`: `I^0 = G(S^0)` and `I^1 = G(S)`.
#[derive(Clone, Debug)]
pub struct GapPair {
    pub seed_system: XorSystem,
    pub satisfiable: XorSystem,
    pub hard: XorSystem,
    pub k_check: usize,
    pub epsilon: Fraction,
    pub rng_seed: u64,
    /// `Some(v)` when `k_check > 0`: whether `S` is `k_check`-locally
    /// satisfiable in the second encoding.
    pub locally_satisfiable: Option<bool>,
    /// Exact `(opt(I^0), opt(I^1))` when small enough to brute-force.
    pub opt: Option<(Fraction, Fraction)>,
}

impl GapPair {
    /// `opt(I^1) ≤ 1/2 + ε`, when measured.
    pub fn is_gap(&self) -> Option<bool> {
        self.opt
            .map(|(_, hard)| hard <= Fraction::new(1, 2) + self.epsilon)
    }
}

/// Builds a gap pair; certifies local satisfiability of `S` when
/// `k_check > 0` and brute-forces both optima when `2n ≤ brute_cap`.
pub fn gap_pair(
    n: usize,
    r: usize,
    epsilon: Fraction,
    k_check: usize,
    seed: u64,
    brute_cap: usize,
    position_budget: u64,
) -> Result<GapPair> {
    let a = random_incidence(n, r, seed)?;
    let b = rhs_random(a.num_rows(), seed);
    let s = system_from_incidence(&a, &b)?;
    let (hard, _) = gadget(&s);
    let (satisfiable, _) = gadget(&homogeneous(&s));
    let locally_satisfiable = if k_check > 0 {
        Some(k_locally_satisfiable(&s, k_check, Encoding::Second, position_budget)?)
    } else {
        None
    };
    let opt = if 2 * n <= brute_cap {
        let o0 = max_xor(&satisfiable, brute_cap)?.fraction;
        let o1 = max_xor(&hard, brute_cap)?.fraction;
        Some((o0, o1))
    } else {
        None
    };
    Ok(GapPair {
        seed_system: s,
        satisfiable,
        hard,
        k_check,
        epsilon,
        rng_seed: seed,
        locally_satisfiable,
        opt,
    })
}

/// Simple `d`-regular graph on `n` vertices by the configuration model,
/// rejecting pairings with loops or repeated edges.
pub fn random_regular_graph(n: usize, d: usize, seed: u64, retries: usize) -> Result<Graph> {
    if !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParameter("n·d must be even".into()));
    }
    if d >= n.max(1) && !(n == 0 && d == 0) {
        return Err(Error::InvalidParameter(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut g = rng(seed);
    let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..retries {
        let mut s = stubs.clone();
        s.shuffle(&mut g);
        let pairs: Vec<(usize, usize)> = s.chunks(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|&(u, v)| u == v) {
            continue;
        }
        let graph = Graph::new(n, pairs.iter().copied())?;
        if graph.is_regular(d) {
            return Ok(graph);
        }
    }
    Err(Error::RetriesExhausted(retries))
}

/// Simple `d`-regular bipartite graph with parts `0..m` and `m..2m`.
pub fn random_regular_bipartite(m: usize, d: usize, seed: u64, retries: usize) -> Result<Graph> {
    if d > m {
        return Err(Error::InvalidParameter(format!("no simple {d}-regular bipartite graph with parts of size {m}")));
    }
    let mut g = rng(seed);
    let left: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let right: Vec<usize> = (m..2 * m).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..retries {
        let mut r = right.clone();
        r.shuffle(&mut g);
        let graph = Graph::new(2 * m, left.iter().copied().zip(r.iter().copied()))?;
        if graph.is_regular(d) {
            return Ok(graph);
        }
    }
    Err(Error::RetriesExhausted(retries))
}
