//! Reductions that produce graphs: FGLSS, label cover to co-partite graph,
//! the Dinur–Safra long-code graph, weighted to unweighted, and the
//! end-to-end pipelines from 3XOR.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CoPartiteGraph, Graph, WeightedGraph};
use crate::labelcover::{bipartite_reduction, parallel_repetition, LabelCover, DEFAULT_REPETITION_BUDGET};
use crate::longcode::{longcode_sat, longcode_xor, LongCodeSat, LongCodeXor, DEFAULT_CONSTRAINT_BUDGET};
use crate::structures::{Weight, XorSystem};

/// Default cap on vertices and edges produced by the Dinur–Safra graph and
/// by unweighting.
pub const DEFAULT_GRAPH_BUDGET: u64 = 1 << 25;

/// Vertex of the FGLSS graph: copy `copy` of equation `equation`, locally
/// assigned `assignment` on the equation's variables in written order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FglssVertex {
    pub equation: usize,
    pub copy: usize,
    pub assignment: [bool; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FglssGraph {
    pub graph: Graph,
    pub vertices: Vec<FglssVertex>,
}

/// One 4-clique per equation copy (multiplicities expanded) whose vertices
/// are the four satisfying local assignments, in lexicographic order, plus
/// edges between vertices whose local assignments disagree on a shared
/// variable.
pub fn fglss(sys: &XorSystem) -> FglssGraph {
    let mut vertices = Vec::new();
    let mut copy = 0;
    for (ei, e) in sys.equations().iter().enumerate() {
        for _ in 0..e.mult {
            for bits in 0u8..8 {
                let a = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
                if a[0] ^ a[1] ^ a[2] == e.rhs {
                    vertices.push(FglssVertex {
                        equation: ei,
                        copy,
                        assignment: a,
                    });
                }
            }
            copy += 1;
        }
    }
    let eqs = sys.equations();
    let value = |x: &FglssVertex, var: usize| -> Option<bool> {
        eqs[x.equation]
            .vars
            .iter()
            .position(|&v| v == var)
            .map(|i| x.assignment[i])
    };
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let (x, y) = (&vertices[i], &vertices[j]);
            let adjacent = x.copy == y.copy
                || eqs[x.equation]
                    .vars
                    .iter()
                    .any(|&v| matches!((value(x, v), value(y, v)), (Some(a), Some(b)) if a != b));
            if adjacent {
                edges.push((i, j));
            }
        }
    }
    FglssGraph {
        graph: Graph::new(vertices.len(), edges).expect("valid edges"),
        vertices,
    }
}

/// Vertices `U × A` (id `u·p + a`); `(u, a)` and `(u', a')` are adjacent
/// when `u = u'` and `a ≠ a'`, or when they share a right vertex `v` and
/// `π_{u,v}(a) ≠ π_{u',v}(a')`. The parts `{u} × A` are cliques.
pub fn labelcover_to_graph(lc: &LabelCover) -> Result<CoPartiteGraph> {
    if !lc.flags().projection {
        return Err(Error::NotProjection);
    }
    let (m, p) = (lc.num_left(), lc.left_domain());
    let mut by_v: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); lc.num_right()];
    for e in lc.edges() {
        by_v[e.v].push((e.u, e.pi().expect("projection")));
    }
    let mut edges = Vec::new();
    for u in 0..m {
        for a in 0..p {
            for b in a + 1..p {
                edges.push((u * p + a, u * p + b));
            }
        }
    }
    for list in &by_v {
        for (i, (u1, pi1)) in list.iter().enumerate() {
            for (u2, pi2) in &list[i + 1..] {
                for (a1, b1) in pi1.iter().enumerate() {
                    for (a2, b2) in pi2.iter().enumerate() {
                        if b1 != b2 {
                            edges.push((u1 * p + a1, u2 * p + a2));
                        }
                    }
                }
            }
        }
    }
    let graph = Graph::new(m * p, edges)?;
    let parts = (0..m).map(|u| (u * p..(u + 1) * p).collect()).collect();
    CoPartiteGraph::new(graph, parts)
}

/// `p < (3 - √5)/2`, decided exactly: `N² - 3NM + M² > 0` with `N/M < 3/2`.
pub fn below_pmax(p: Ratio<u64>) -> bool {
    let (n, m) = (*p.numer() as i128, *p.denom() as i128);
    2 * n < 3 * m && n * n - 3 * n * m + m * m > 0
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Index data of the Dinur–Safra vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsLayout {
    pub n: usize,
    pub l: usize,
    pub l1: usize,
    /// Subsets of `[l]` with at least `l1` elements, as position masks, in
    /// increasing mask order; a set system `S` is a mask over this list.
    pub family: Vec<u64>,
    /// The `l`-subsets `B` of the vertices as sorted tuples, lexicographic.
    pub blocks: Vec<Vec<usize>>,
}

impl DsLayout {
    pub fn q(&self) -> usize {
        self.family.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.blocks.len() << self.q()
    }

    pub fn vertex(&self, block: usize, s: u64) -> usize {
        (block << self.q()) | s as usize
    }

    pub fn split(&self, id: usize) -> (usize, u64) {
        (id >> self.q(), (id & ((1 << self.q()) - 1)) as u64)
    }

    /// Member `i` of the family of block `b` as a global vertex mask.
    pub fn member_mask(&self, block: usize, i: usize) -> u64 {
        positions_to_global(self.family[i], &self.blocks[block])
    }

    fn family_index(&self) -> HashMap<u64, usize> {
        self.family.iter().enumerate().map(|(i, &m)| (m, i)).collect()
    }
}

fn positions_to_global(mut mask: u64, tuple: &[usize]) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out |= 1 << tuple[i];
    }
    out
}

fn family(l: usize, l1: usize) -> Vec<u64> {
    (0..1u64 << l).filter(|m| m.count_ones() as usize >= l1).collect()
}

fn combinations(n: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if l > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..l).collect();
    loop {
        out.push(idx.clone());
        let mut i = l;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < n - l + i {
                idx[i] += 1;
                for t in i + 1..l {
                    idx[t] = idx[t - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}

/// Canonical representative of `(u, S)` in `V^{l,≠} × P(family)` modulo
/// simultaneous permutation: the sorted tuple, with `S` transported along
/// the sorting permutation. `S` is a mask over `family`.
pub fn canonical_representative(u: &[usize], s: u64, family: &[u64], index: &HashMap<u64, usize>) -> (Vec<usize>, u64) {
    let l = u.len();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by_key(|&i| u[i]);
    // new position of old position i
    let mut new_pos = vec![0; l];
    for (j, &i) in order.iter().enumerate() {
        new_pos[i] = j;
    }
    let sorted: Vec<usize> = order.iter().map(|&i| u[i]).collect();
    let mut t = 0u64;
    let mut rest = s;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let mut a = family[k];
        let mut moved = 0u64;
        while a != 0 {
            let i = a.trailing_zeros() as usize;
            a &= a - 1;
            moved |= 1 << new_pos[i];
        }
        t |= 1 << index[&moved];
    }
    (sorted, t)
}

/// Counts the classes of `V^{l,≠} × P(family)` by mapping every element
/// to its canonical representative. Returns the number of distinct
/// classes and whether every class has exactly `l!` elements.
pub fn quotient_class_count(n: usize, l: usize, l1: usize, budget: u64) -> Result<(usize, bool)> {
    let fam = family(l, l1);
    let q = fam.len();
    let tuples: u128 = (0..l).fold(1u128, |acc, i| acc * (n as u128).saturating_sub(i as u128));
    let total = tuples << q;
    if q > 40 || total > budget as u128 {
        return Err(Error::budget("dinur-safra-quotient", format!("{total} pairs"), budget));
    }
    let layout = DsLayout {
        n,
        l,
        l1,
        blocks: combinations(n, l),
        family: fam,
    };
    let block_index: HashMap<Vec<usize>, usize> =
        layout.blocks.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    let fidx = layout.family_index();
    // all injective l-tuples
    let mut tuples_list = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn rec(n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, l, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, l, &mut cur, &mut tuples_list);
    let hits: Vec<u32> = {
        let per_tuple: Vec<Vec<usize>> = tuples_list
            .par_iter()
            .map(|u| {
                (0..1u64 << q)
                    .map(|s| {
                        let (b, t) = canonical_representative(u, s, &layout.family, &fidx);
                        layout.vertex(block_index[&b], t)
                    })
                    .collect()
            })
            .collect();
        let mut hits = vec![0u32; layout.num_vertices()];
        for ids in per_tuple {
            for id in ids {
                hits[id] += 1;
            }
        }
        hits
    };
    let fact: u32 = (1..=l as u32).product();
    let distinct = hits.iter().filter(|&&h| h > 0).count();
    Ok((distinct, hits.iter().all(|&h| h == fact)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DinurSafraGraph {
    pub graph: WeightedGraph,
    pub layout: DsLayout,
}

/// The weighted long-code graph over an `(m, r)`-co-partite graph. Vertices
/// are pairs `(B, S)` with `B` an `l`-subset of the vertices, `l = 2·l1·r`,
/// and `S` a set of subsets of `B` of size at least `l1`; the weight is
/// `N^|S| (M-N)^{q-|S|}` for `p = N/M` and `q` the size of the family.
/// `(B, S1) ~ (B, S2)` when `S1 ∩ S2 = ∅`; `(B̂ + v1, S1) ~ (B̂ + v2, S2)`
/// for an edge `v1 v2` when every `(A1, A2) ∈ S1 × S2` has `A1 ∩ B̂ ≠ A2 ∩
/// B̂` or `v1 ∈ A1, v2 ∈ A2`.
pub fn dinur_safra(g: &CoPartiteGraph, p: Ratio<u64>, l1: usize, r: usize, budget: u64) -> Result<DinurSafraGraph> {
    const STAGE: &str = "dinur-safra";
    if r != g.part_size() {
        return Err(Error::InvalidParameter(format!(
            "r = {r} but the graph has parts of size {}",
            g.part_size()
        )));
    }
    if l1 == 0 || r == 0 {
        return Err(Error::InvalidParameter("l1 and r must be positive".into()));
    }
    let (pn, pm) = (*p.numer(), *p.denom());
    if pn == 0 || !below_pmax(p) {
        return Err(Error::InvalidParameter(format!("p = {pn}/{pm} outside (0, (3-√5)/2)")));
    }
    let graph = g.graph();
    let n = graph.num_vertices();
    let l = 2 * l1 * r;
    if n > 64 {
        return Err(Error::budget(STAGE, format!("{n} base vertices"), 64));
    }
    let num_blocks = binomial(n, l);
    if num_blocks == 0 {
        let layout = DsLayout { n, l, l1, family: Vec::new(), blocks: Vec::new() };
        return Ok(DinurSafraGraph {
            graph: WeightedGraph::new(Graph::empty(0), Vec::new())?,
            layout,
        });
    }
    let q_size: u128 = (l1..=l).map(|i| binomial(l, i)).sum();
    if q_size > 40 || num_blocks << q_size > budget as u128 {
        return Err(Error::budget(
            STAGE,
            format!("C({n},{l}) * 2^{q_size} vertices"),
            budget,
        ));
    }
    let q = q_size as usize;
    let per_block_edges: u128 = (3u128.pow(q as u32) - 1) / 2;
    if num_blocks * per_block_edges > budget as u128 {
        return Err(Error::budget(STAGE, format!("{} same-block edges", num_blocks * per_block_edges), budget));
    }
    let layout = DsLayout {
        n,
        l,
        l1,
        family: family(l, l1),
        blocks: combinations(n, l),
    };
    debug_assert_eq!(layout.q(), q);
    let nv = layout.num_vertices();

    let pow_n: Vec<Option<u64>> = (0..=q).map(|i| pn.checked_pow(i as u32)).collect();
    let pow_c: Vec<Option<u64>> = (0..=q).map(|i| (pm - pn).checked_pow(i as u32)).collect();
    let weights: Vec<Weight> = (0..nv)
        .map(|id| {
            let s = layout.split(id).1.count_ones() as usize;
            pow_n[s]
                .zip(pow_c[q - s])
                .and_then(|(a, b)| a.checked_mul(b))
                .ok_or_else(|| Error::budget(STAGE, "weight beyond 64 bits", "u64"))
        })
        .collect::<Result<_>>()?;

    let full = (1u64 << q) - 1;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv];
    let mut edge_count: u128 = 0;
    // same block, disjoint set systems
    for b in 0..layout.blocks.len() {
        for s1 in 0..=full {
            let comp = full & !s1;
            let mut s2 = comp;
            loop {
                if s2 > s1 {
                    let (x, y) = (layout.vertex(b, s1), layout.vertex(b, s2));
                    adj[x].push(y as u32);
                    adj[y].push(x as u32);
                }
                if s2 == 0 {
                    break;
                }
                s2 = (s2 - 1) & comp;
            }
        }
    }
    edge_count += num_blocks * per_block_edges;

    // neighbouring blocks along an edge of the base graph
    let block_index: HashMap<Vec<usize>, usize> =
        layout.blocks.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    for b1 in 0..layout.blocks.len() {
        let blk1 = &layout.blocks[b1];
        for &v1 in blk1 {
            for &v2 in graph.neighbors(v1) {
                let v2 = v2 as usize;
                if blk1.contains(&v2) {
                    continue;
                }
                let mut blk2: Vec<usize> = blk1.iter().copied().filter(|&x| x != v1).collect();
                blk2.push(v2);
                blk2.sort_unstable();
                let b2 = block_index[&blk2];
                if b2 <= b1 {
                    continue;
                }
                let hat: u64 = blk1.iter().filter(|&&x| x != v1).fold(0, |m, &x| m | 1 << x);
                let m1: Vec<u64> = (0..q).map(|i| layout.member_mask(b1, i)).collect();
                let m2: Vec<u64> = (0..q).map(|i| layout.member_mask(b2, i)).collect();
                let conflict: Vec<u64> = m1
                    .iter()
                    .map(|&a1| {
                        m2.iter().enumerate().fold(0u64, |acc, (j, &a2)| {
                            let same_trace = a1 & hat == a2 & hat;
                            let covers = a1 >> v1 & 1 == 1 && a2 >> v2 & 1 == 1;
                            if same_trace && !covers {
                                acc | 1 << j
                            } else {
                                acc
                            }
                        })
                    })
                    .collect();
                let mut forbidden = vec![0u64; 1 << q];
                for s1 in 1..=full {
                    let low = s1.trailing_zeros() as usize;
                    forbidden[s1 as usize] = forbidden[(s1 & (s1 - 1)) as usize] | conflict[low];
                }
                for s1 in 0..=full {
                    let allowed = full & !forbidden[s1 as usize];
                    edge_count += 1u128 << allowed.count_ones();
                    if edge_count > budget as u128 {
                        return Err(Error::budget(STAGE, "cross-block edges", budget));
                    }
                    let x = layout.vertex(b1, s1);
                    let mut s2 = allowed;
                    loop {
                        let y = layout.vertex(b2, s2);
                        adj[x].push(y as u32);
                        adj[y].push(x as u32);
                        if s2 == 0 {
                            break;
                        }
                        s2 = (s2 - 1) & allowed;
                    }
                }
            }
        }
    }
    let graph = Graph::from_adjacency(adj);
    Ok(DinurSafraGraph {
        graph: WeightedGraph::new(graph, weights)?,
        layout,
    })
}

/// Replaces each vertex `v` by `w(v)` copies (ids `offset(v) + i`), with
/// complete bipartite connections between copies of adjacent vertices.
/// Returns the graph and the original vertex of each copy.
pub fn unweight(h: &WeightedGraph, budget: u64) -> Result<(Graph, Vec<usize>)> {
    let total = h
        .total_weight()
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::budget("unweight", "total weight", budget))?;
    let g = h.graph();
    let edges: u128 = g.edges().map(|(u, v)| h.weight(u) as u128 * h.weight(v) as u128).sum();
    if edges > budget as u128 {
        return Err(Error::budget("unweight", format!("{edges} edges"), budget));
    }
    let mut offset = Vec::with_capacity(g.num_vertices());
    let mut owner = Vec::with_capacity(total as usize);
    for v in 0..g.num_vertices() {
        offset.push(owner.len());
        owner.extend(std::iter::repeat_n(v, h.weight(v) as usize));
    }
    let adj: Vec<Vec<u32>> = owner
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .flat_map(|&u| {
                    let u = u as usize;
                    (offset[u]..offset[u] + h.weight(u) as usize).map(|x| x as u32)
                })
                .collect()
        })
        .collect();
    Ok((Graph::from_adjacency(adj), owner))
}

/// Per-stage caps for the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineBudget {
    pub repetition: u64,
    pub longcode: u64,
    pub graph: u64,
}

impl Default for PipelineBudget {
    fn default() -> Self {
        PipelineBudget {
            repetition: DEFAULT_REPETITION_BUDGET,
            longcode: DEFAULT_CONSTRAINT_BUDGET,
            graph: DEFAULT_GRAPH_BUDGET,
        }
    }
}

fn repeated(sys: &XorSystem, t: usize, budget: &PipelineBudget) -> Result<LabelCover> {
    parallel_repetition(&bipartite_reduction(sys), t, budget.repetition)
}

/// 3XOR → label cover → `t`-fold repetition → long code (3XOR).
pub fn pipeline_xor(sys: &XorSystem, t: usize, eps: Ratio<u64>, budget: &PipelineBudget) -> Result<LongCodeXor> {
    longcode_xor(&repeated(sys, t, budget)?, eps, budget.longcode)
}

/// 3XOR → label cover → `t`-fold repetition → layered long code (3SAT).
pub fn pipeline_sat(sys: &XorSystem, t: usize, delta: Ratio<u64>, budget: &PipelineBudget) -> Result<LongCodeSat> {
    longcode_sat(&repeated(sys, t, budget)?, delta, budget.longcode)
}

/// 3XOR → label cover → `t`-fold repetition → co-partite graph →
/// Dinur–Safra graph → unweighted graph.
pub fn pipeline_vc(
    sys: &XorSystem,
    t: usize,
    p: Ratio<u64>,
    l1: usize,
    r: usize,
    budget: &PipelineBudget,
) -> Result<Graph> {
    let lc = repeated(sys, t, budget)?;
    let cg = labelcover_to_graph(&lc)?;
    let ds = dinur_safra(&cg, p, l1, r, budget.graph)?;
    Ok(unweight(&ds.graph, budget.graph)?.0)
}
