//! Exact optimization oracles: exhaustive Max-XOR / Max-CNF, F2 Gaussian
//! elimination, label-cover optimum, weighted vertex cover by branch and
//! bound, independent sets and h-clique-free sets.
//!
//! Every oracle re-scores its witness through an independent path before
//! returning; a mismatch is reported as [`Error::Internal`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedGraph};
use crate::labelcover::LabelCover;
use crate::structures::{Assignment, CnfSystem, Literal, Weight, XorSystem};
use crate::{fraction, Fraction};

/// Default variable cap for exhaustive assignment search.
pub const DEFAULT_ASSIGNMENT_CAP: usize = 24;
/// Default vertex cap for branch-and-bound vertex cover.
pub const DEFAULT_VC_CAP: usize = 32;
/// Largest graph the exhaustive vertex-cover fallback accepts.
pub const EXHAUSTIVE_VC_CAP: usize = 24;
/// Default cap on the number of left assignments in label-cover search.
pub const DEFAULT_LC_CAP: u64 = 1 << 24;

/// Optimum with one witness and the number of explored candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult<W> {
    pub value: Weight,
    pub total: Weight,
    pub fraction: Fraction,
    pub witness: W,
    pub explored: u64,
}

impl<W> OptResult<W> {
    fn new(value: Weight, total: Weight, witness: W, explored: u64) -> Self {
        OptResult {
            value,
            total,
            fraction: fraction(value, total),
            witness,
            explored,
        }
    }
}

fn check_cap(stage: &str, n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 63 {
        return Err(Error::budget(stage, format!("{n} variables"), format!("{}", cap.min(63))));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Weighted constraint search
// ---------------------------------------------------------------------------

/// Bit of variable `i` in an assignment rank over `n` variables.
#[inline]
fn bit(n: usize, var: usize) -> u64 {
    1u64 << (n - 1 - var)
}

#[derive(Clone, Debug)]
struct Parity {
    mask: u64,
    rhs: bool,
    weight: Weight,
}

#[derive(Clone, Debug)]
struct MaskClause {
    mask: u64,
    /// The unique assignment to `mask` that falsifies the clause.
    falsifier: u64,
    weight: Weight,
}

/// A weighted mix of parity constraints and disjunctions of literals over
/// up to 63 variables, for exhaustive search. Repeated variables inside a
/// constraint are allowed: they cancel in parities and merge in clauses.
#[derive(Clone, Debug)]
pub struct WeightedCsp {
    num_vars: usize,
    parities: Vec<Parity>,
    clauses: Vec<MaskClause>,
    constant: Weight,
    total: Weight,
}

impl WeightedCsp {
    pub fn new(num_vars: usize) -> Self {
        WeightedCsp {
            num_vars,
            parities: Vec::new(),
            clauses: Vec::new(),
            constant: 0,
            total: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn total_weight(&self) -> Weight {
        self.total
    }

    fn check_var(&self, v: usize) {
        assert!(v < self.num_vars && self.num_vars <= 63, "variable {v} out of range");
    }

    /// `Σ vars = rhs` with weight `w`.
    pub fn add_parity(&mut self, vars: &[usize], rhs: bool, w: Weight) {
        let mut mask = 0;
        for &v in vars {
            self.check_var(v);
            mask ^= bit(self.num_vars, v);
        }
        self.total += w;
        if mask == 0 {
            // 0 = rhs
            if !rhs {
                self.constant += w;
            }
        } else {
            self.parities.push(Parity { mask, rhs, weight: w });
        }
    }

    pub fn add_clause(&mut self, lits: &[Literal], w: Weight) {
        self.total += w;
        let mut mask = 0u64;
        let mut falsifier = 0u64;
        for l in lits {
            self.check_var(l.var);
            let b = bit(self.num_vars, l.var);
            let f = if l.positive { 0 } else { b };
            if mask & b != 0 {
                if falsifier & b != f {
                    self.constant += w;
                    return;
                }
            } else {
                mask |= b;
                falsifier |= f;
            }
        }
        self.clauses.push(MaskClause { mask, falsifier, weight: w });
    }

    /// Weight that holds under every assignment.
    pub fn add_constant(&mut self, w: Weight) {
        self.total += w;
        self.constant += w;
    }

    /// Satisfied weight under the assignment of the given rank.
    #[inline]
    pub fn score_rank(&self, x: u64) -> Weight {
        let mut s = self.constant;
        for p in &self.parities {
            if ((x & p.mask).count_ones() & 1 == 1) == p.rhs {
                s += p.weight;
            }
        }
        for c in &self.clauses {
            if x & c.mask != c.falsifier {
                s += c.weight;
            }
        }
        s
    }

    pub fn score(&self, f: &Assignment) -> Weight {
        assert_eq!(f.len(), self.num_vars);
        self.score_rank(f.rank())
    }
}

impl From<&XorSystem> for WeightedCsp {
    fn from(sys: &XorSystem) -> Self {
        let mut csp = WeightedCsp::new(sys.num_vars());
        for e in sys.equations() {
            csp.add_parity(&e.vars, e.rhs, e.mult);
        }
        csp
    }
}

impl From<&CnfSystem> for WeightedCsp {
    fn from(sys: &CnfSystem) -> Self {
        let mut csp = WeightedCsp::new(sys.num_vars());
        for c in sys.clauses() {
            csp.add_clause(&c.lits, c.mult);
        }
        csp
    }
}

/// Keeps the higher score; on ties the smaller rank.
fn better(a: (Weight, u64), b: (Weight, u64)) -> (Weight, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exhaustive maximization over all `2^n` assignments. The witness is the
/// lexicographically least optimal assignment (`x_0` most significant).
pub fn max_csp(csp: &WeightedCsp, cap: usize) -> Result<OptResult<Assignment>> {
    let n = csp.num_vars;
    check_cap("max-csp", n, cap)?;
    let space = 1u64 << n;
    let chunk_bits = n.min(12);
    let chunk = 1u64 << chunk_bits;
    let chunks = space / chunk;
    let (value, rank) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let base = c * chunk;
            let mut best = (csp.score_rank(base), base);
            for x in base + 1..base + chunk {
                let s = csp.score_rank(x);
                if s > best.0 {
                    best = (s, x);
                }
            }
            best
        })
        .reduce(|| (0, u64::MAX), better);
    let witness = Assignment::from_rank(n, rank);
    Ok(OptResult::new(value, csp.total, witness, space))
}

/// Maximum satisfied weight of a 3XOR system.
pub fn max_xor(sys: &XorSystem, cap: usize) -> Result<OptResult<Assignment>> {
    let res = max_csp(&WeightedCsp::from(sys), cap)?;
    let (sat, total) = sys.sat_count(&res.witness);
    if sat != res.value || total != res.total {
        return Err(Error::Internal(format!(
            "max-xor witness scores {sat}/{total}, search reported {}/{}",
            res.value, res.total
        )));
    }
    Ok(res)
}

/// Maximum satisfied weight of a 3CNF system.
pub fn max_cnf(sys: &CnfSystem, cap: usize) -> Result<OptResult<Assignment>> {
    let res = max_csp(&WeightedCsp::from(sys), cap)?;
    let (sat, total) = sys.sat_count(&res.witness);
    if sat != res.value || total != res.total {
        return Err(Error::Internal(format!(
            "max-cnf witness scores {sat}/{total}, search reported {}/{}",
            res.value, res.total
        )));
    }
    Ok(res)
}

// ---------------------------------------------------------------------------
// Linear algebra over F2
// ---------------------------------------------------------------------------

/// Dense F2 row with an extra right-hand-side bit.
#[derive(Clone)]
struct Row {
    words: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn new(n: usize, vars: &[usize], rhs: bool) -> Self {
        let mut words = vec![0u64; n.div_ceil(64).max(1)];
        for &v in vars {
            words[v / 64] ^= 1 << (v % 64);
        }
        Row { words, rhs }
    }

    fn get(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    fn xor_with(&mut self, other: &Row) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

/// Reduced echelon form. Returns pivot rows with their pivot column, or
/// `None` if some combination gives `0 = 1`.
fn eliminate(n: usize, rows: Vec<Row>) -> Option<Vec<(usize, Row)>> {
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for mut row in rows {
        for (col, prow) in &pivots {
            if row.get(*col) {
                row.xor_with(prow);
            }
        }
        if row.is_zero() {
            if row.rhs {
                return None;
            }
            continue;
        }
        let col = (0..n).find(|&c| row.get(c)).expect("nonzero row has a pivot");
        for (_, prow) in pivots.iter_mut() {
            if prow.get(col) {
                prow.xor_with(&row);
            }
        }
        pivots.push((col, row));
    }
    Some(pivots)
}

/// A solution of `Σ_{i ∈ vars} x_i = rhs` for all rows (free variables 0),
/// or `None` if the system is inconsistent.
pub fn solve_f2<'a>(
    n: usize,
    rows: impl IntoIterator<Item = (&'a [usize], bool)>,
) -> Option<Vec<bool>> {
    let rows = rows.into_iter().map(|(v, b)| Row::new(n, v, b)).collect();
    let pivots = eliminate(n, rows)?;
    let mut x = vec![false; n];
    for (col, row) in pivots {
        x[col] = row.rhs;
    }
    Some(x)
}

/// Rank over F2 of the given 0/1 rows.
pub fn rank_f2<'a>(n: usize, rows: impl IntoIterator<Item = &'a [usize]>) -> usize {
    let rows = rows.into_iter().map(|v| Row::new(n, v, false)).collect();
    eliminate(n, rows).map_or(0, |p| p.len())
}

/// True iff `Ax = b` is consistent.
pub fn xor_satisfiable(sys: &XorSystem) -> bool {
    xor_solution(sys).is_some()
}

/// A satisfying assignment of the system, if one exists.
pub fn xor_solution(sys: &XorSystem) -> Option<Assignment> {
    let x = solve_f2(
        sys.num_vars(),
        sys.equations().iter().map(|e| (&e.vars[..], e.rhs)),
    )?;
    let f = Assignment::new(x);
    debug_assert!(sys.equations().iter().all(|e| e.satisfied_by(&f)));
    Some(f)
}

// ---------------------------------------------------------------------------
// Label cover
// ---------------------------------------------------------------------------

/// Optimal label assignments `(f, g)`.
pub type Labelling = (Vec<usize>, Vec<usize>);

/// Exact optimum of a label-cover instance: enumerates every left
/// assignment and picks the best right label per right vertex. Ties go to
/// the lexicographically least `f`, then the least label per `v`.
pub fn labelcover_opt(lc: &LabelCover, cap: u64) -> Result<OptResult<Labelling>> {
    let (m, n, p, q) = (lc.num_left(), lc.num_right(), lc.left_domain(), lc.right_domain());
    let space = (p as u64)
        .checked_pow(m as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| Error::budget("labelcover-opt", format!("{p}^{m} left assignments"), cap))?;
    let total = lc.total_weight();
    let decode = |rank: u64| -> Vec<usize> {
        let mut f = vec![0usize; m];
        let mut r = rank;
        for slot in f.iter_mut().rev() {
            *slot = (r % p as u64) as usize;
            r /= p as u64;
        }
        f
    };
    let score_f = |f: &[usize], buf: &mut Vec<Weight>| -> Weight {
        buf.iter_mut().for_each(|x| *x = 0);
        for e in lc.edges() {
            let mut acc = e.accept[f[e.u]];
            while acc != 0 {
                let b = acc.trailing_zeros() as usize;
                acc &= acc - 1;
                buf[e.v * q + b] += e.w;
            }
        }
        (0..n)
            .map(|v| buf[v * q..(v + 1) * q].iter().copied().max().unwrap_or(0))
            .sum()
    };
    let chunk = 1024u64;
    let (value, rank) = (0..space.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut buf = vec![0; n * q];
            let mut best = (0, u64::MAX);
            for r in c * chunk..((c + 1) * chunk).min(space) {
                let s = score_f(&decode(r), &mut buf);
                best = better(best, (s, r));
            }
            best
        })
        .reduce(|| (0, u64::MAX), better);
    let f = if space == 0 { Vec::new() } else { decode(rank.min(space - 1)) };
    let mut buf = vec![0; n * q];
    score_f(&f, &mut buf);
    let g: Vec<usize> = (0..n)
        .map(|v| {
            let row = &buf[v * q..(v + 1) * q];
            let best = row.iter().copied().max().unwrap_or(0);
            row.iter().position(|&x| x == best).unwrap_or(0)
        })
        .collect();
    let check = lc.satisfied_weight(&f, &g)?;
    if check != value {
        return Err(Error::Internal(format!(
            "label-cover witness scores {check}, search reported {value}"
        )));
    }
    Ok(OptResult::new(value, total, (f, g), space))
}

// ---------------------------------------------------------------------------
// Vertex cover, independent set, h-clique-free sets
// ---------------------------------------------------------------------------

fn neighbor_masks(g: &Graph) -> Vec<u64> {
    (0..g.num_vertices())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect()
}

fn mask_weight(weights: &[Weight], mut mask: u64) -> Weight {
    let mut s = 0;
    while mask != 0 {
        s += weights[mask.trailing_zeros() as usize];
        mask &= mask - 1;
    }
    s
}

fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

struct VcSearch<'a> {
    nb: &'a [u64],
    w: &'a [Weight],
    best: Weight,
    best_set: u64,
    explored: u64,
}

impl VcSearch<'_> {
    /// Greedy maximal matching inside `cand`; each matched edge needs one
    /// endpoint in any cover.
    fn matching_bound(&self, cand: u64) -> Weight {
        let mut free = cand;
        let mut lb = 0;
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= !(1 << v);
            let nbrs = self.nb[v] & free;
            if nbrs != 0 {
                let u = nbrs.trailing_zeros() as usize;
                free &= !(1 << u);
                lb += self.w[v].min(self.w[u]);
            }
        }
        lb
    }

    /// `cand`: vertices whose mutual edges are still uncovered.
    fn run(&mut self, mut cand: u64, mut chosen: u64, mut cost: Weight) {
        self.explored += 1;
        loop {
            let mut changed = false;
            let mut it = cand;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                if cand & (1 << v) == 0 {
                    continue;
                }
                let nbrs = self.nb[v] & cand;
                if nbrs == 0 {
                    cand &= !(1 << v);
                    changed = true;
                } else if nbrs.count_ones() == 1 {
                    let u = nbrs.trailing_zeros() as usize;
                    if self.w[v] >= self.w[u] {
                        chosen |= 1 << u;
                        cost += self.w[u];
                        cand &= !(1 << u) & !(1 << v);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if cost >= self.best {
            return;
        }
        if cand == 0 {
            self.best = cost;
            self.best_set = chosen;
            return;
        }
        if cost + self.matching_bound(cand) >= self.best {
            return;
        }
        let mut v = usize::MAX;
        let mut deg = 0;
        let mut it = cand;
        while it != 0 {
            let x = it.trailing_zeros() as usize;
            it &= it - 1;
            let d = (self.nb[x] & cand).count_ones();
            if d > deg {
                deg = d;
                v = x;
            }
        }
        let nbrs = self.nb[v] & cand;
        self.run(cand & !(1 << v), chosen | 1 << v, cost + self.w[v]);
        self.run(cand & !(1 << v) & !nbrs, chosen | nbrs, cost + mask_weight(self.w, nbrs));
    }
}

fn verify_cover(g: &Graph, weights: &[Weight], cover: &[usize], value: Weight) -> Result<()> {
    let mut set = vec![false; g.num_vertices()];
    for &v in cover {
        set[v] = true;
    }
    let w: Weight = cover.iter().map(|&v| weights[v]).sum();
    if !g.is_vertex_cover(&set) || w != value {
        return Err(Error::Internal("vertex-cover witness failed re-verification".into()));
    }
    Ok(())
}

fn weighted_parts(wg: &WeightedGraph) -> Result<Weight> {
    wg.total_weight()
        .ok_or_else(|| Error::InvalidInstance("total vertex weight overflows".into()))
}

/// Minimum-weight vertex cover by branch and bound: branch on a vertex of
/// maximum remaining degree (take it, or take all its neighbours), prune
/// with a greedy matching bound.
pub fn min_weighted_vc(wg: &WeightedGraph, cap: usize) -> Result<OptResult<Vec<usize>>> {
    let g = wg.graph();
    let n = g.num_vertices();
    if n > cap || n > 64 {
        return Err(Error::budget("min-vc", format!("{n} vertices"), cap.min(64)));
    }
    let total = weighted_parts(wg)?;
    let nb = neighbor_masks(g);
    let nonisolated = (0..n).filter(|&v| nb[v] != 0).fold(0u64, |m, v| m | 1 << v);
    let mut s = VcSearch {
        nb: &nb,
        w: wg.weights(),
        best: mask_weight(wg.weights(), nonisolated),
        best_set: nonisolated,
        explored: 0,
    };
    let start = nonisolated;
    s.run(start, 0, 0);
    let cover = mask_to_vec(s.best_set);
    verify_cover(g, wg.weights(), &cover, s.best)?;
    Ok(OptResult::new(s.best, total, cover, s.explored))
}

pub fn min_vc(g: &Graph, cap: usize) -> Result<OptResult<Vec<usize>>> {
    min_weighted_vc(&WeightedGraph::unit(g.clone()), cap)
}

/// Exhaustive minimum-weight vertex cover over all `2^n` subsets; used to
/// cross-check the branch and bound. Ties go to the subset whose indicator
/// string `(s_0, ..., s_{n-1})` is lexicographically least.
pub fn min_weighted_vc_exhaustive(wg: &WeightedGraph) -> Result<OptResult<Vec<usize>>> {
    let g = wg.graph();
    let n = g.num_vertices();
    if n > EXHAUSTIVE_VC_CAP {
        return Err(Error::budget("min-vc-exhaustive", format!("{n} vertices"), EXHAUSTIVE_VC_CAP));
    }
    let total = weighted_parts(wg)?;
    let nb = neighbor_masks(g);
    let w = wg.weights();
    let space = 1u64 << n;
    // key: (weight, reversed-bit mask) so the lexicographic tie-break is a plain min
    let rev = |m: u64| -> u64 { (0..n).fold(0, |acc, v| acc | ((m >> v) & 1) << (n - 1 - v)) };
    let best = (0..space)
        .into_par_iter()
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 1 || nb[v] & !s == 0))
        .map(|s| (mask_weight(w, s), rev(s), s))
        .min()
        .expect("the full vertex set is a cover");
    let cover = mask_to_vec(best.2);
    verify_cover(g, w, &cover, best.0)?;
    Ok(OptResult::new(best.0, total, cover, space))
}

/// Maximum-weight independent set as the complement of a minimum cover.
pub fn max_weighted_is(wg: &WeightedGraph, cap: usize) -> Result<OptResult<Vec<usize>>> {
    let vc = min_weighted_vc(wg, cap)?;
    let n = wg.graph().num_vertices();
    let mut in_cover = vec![false; n];
    for &v in &vc.witness {
        in_cover[v] = true;
    }
    let set: Vec<bool> = in_cover.iter().map(|&c| !c).collect();
    let value = vc.total - vc.value;
    if !wg.graph().is_independent(&set) || wg.set_weight(&set) != value {
        return Err(Error::Internal("independent-set witness failed re-verification".into()));
    }
    let witness = (0..n).filter(|&v| set[v]).collect();
    Ok(OptResult::new(value, vc.total, witness, vc.explored))
}

pub fn max_is(g: &Graph, cap: usize) -> Result<OptResult<Vec<usize>>> {
    max_weighted_is(&WeightedGraph::unit(g.clone()), cap)
}

fn has_clique(nb: &[u64], cand: u64, size: usize) -> bool {
    if size == 0 {
        return true;
    }
    if (cand.count_ones() as usize) < size {
        return false;
    }
    let mut it = cand;
    while it != 0 {
        let v = it.trailing_zeros() as usize;
        it &= it - 1;
        // only neighbours above v, so each clique is found once
        if has_clique(nb, nb[v] & it, size - 1) {
            return true;
        }
    }
    false
}

struct HcfSearch<'a> {
    nb: &'a [u64],
    n: usize,
    h: usize,
    best: u64,
    best_len: u32,
    explored: u64,
}

impl HcfSearch<'_> {
    fn run(&mut self, v: usize, chosen: u64) {
        self.explored += 1;
        let size = chosen.count_ones();
        if size + (self.n - v) as u32 <= self.best_len {
            return;
        }
        if v == self.n {
            self.best = chosen;
            self.best_len = size;
            return;
        }
        if !has_clique(self.nb, chosen & self.nb[v], self.h - 1) {
            self.run(v + 1, chosen | 1 << v);
        }
        self.run(v + 1, chosen);
    }
}

/// Largest vertex set containing no `h`-clique.
pub fn max_hclique_free(g: &Graph, h: usize, cap: usize) -> Result<OptResult<Vec<usize>>> {
    let n = g.num_vertices();
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    if n > cap || n > 64 {
        return Err(Error::budget("max-hclique-free", format!("{n} vertices"), cap.min(64)));
    }
    let nb = neighbor_masks(g);
    let mut s = HcfSearch {
        nb: &nb,
        n,
        h,
        best: 0,
        best_len: 0,
        explored: 0,
    };
    // the empty set is always feasible; seed the bound with it
    s.run(0, 0);
    let witness = mask_to_vec(s.best);
    if has_clique(&nb, s.best, h) {
        return Err(Error::Internal("h-clique-free witness contains an h-clique".into()));
    }
    Ok(OptResult::new(s.best_len as Weight, n as Weight, witness, s.explored))
}
