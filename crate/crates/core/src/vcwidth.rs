//! The colour-refinement invariant `v_G`, which sandwiches the vertex cover
//! number: `vc(G) ≤ v_G ≤ 2·vc(G)`.

use crate::error::{Error, Result};
use crate::games::{c2_equivalent, color_refinement, RefinementResult};
use crate::generators::{derive_seed, random_regular_bipartite, random_regular_graph, DEFAULT_RETRIES};
use crate::graph::{Graph, WeightedGraph};
use crate::oracles::{min_vc, min_weighted_vc, DEFAULT_VC_CAP};
use crate::structures::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VGReport {
    pub refinement: RefinementResult,
    /// Classes with `δ_ii = 0`, ascending.
    pub x: Vec<usize>,
    /// Classes with `δ_ii > 0`, ascending.
    pub y: Vec<usize>,
    /// Classes of `x` joined when `δ_ij > 0`, weighted by class size;
    /// vertex `t` of this graph is class `x[t]`.
    pub quotient: WeightedGraph,
    /// Classes (indices into the refinement) of a minimum cover of the quotient.
    pub cover: Vec<usize>,
    pub p: Weight,
    pub q: Weight,
    pub v: Weight,
}

pub fn v_invariant(g: &Graph) -> Result<VGReport> {
    let refinement = color_refinement(g);
    let classes = &refinement.classes;
    let delta = &refinement.delta;
    let (x, y): (Vec<usize>, Vec<usize>) = (0..classes.len()).partition(|&i| delta[i][i] == 0);
    let mut edges = Vec::new();
    for (s, &i) in x.iter().enumerate() {
        for (t, &j) in x.iter().enumerate().skip(s + 1) {
            if delta[i][j] > 0 {
                edges.push((s, t));
            }
        }
    }
    let weights = x.iter().map(|&i| classes[i].len() as Weight).collect();
    let quotient = WeightedGraph::new(Graph::new(x.len(), edges)?, weights)?;
    let opt = min_weighted_vc(&quotient, DEFAULT_VC_CAP.max(64))?;
    let cover: Vec<usize> = opt.witness.iter().map(|&t| x[t]).collect();
    let q: Weight = y.iter().map(|&i| classes[i].len() as Weight).sum();
    Ok(VGReport {
        p: opt.value,
        q,
        v: opt.value + q,
        refinement: refinement.clone(),
        x,
        y,
        quotient,
        cover,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C2GapWitness {
    /// 3-regular on `2m` vertices with `vc(G) > m`.
    pub g: Graph,
    /// 3-regular bipartite with parts of size `m`.
    pub h: Graph,
    pub vc_g: Weight,
    pub vc_h: Weight,
    pub report_g: VGReport,
    pub report_h: VGReport,
    /// Samples of `G` drawn before one was accepted.
    pub attempts: usize,
}

/// A pair of C²-equivalent cubic graphs whose vertex cover numbers differ:
/// `G` is resampled until the exact oracle reports `vc(G) > m`.
pub fn c2_gap_witness(m: usize, seed: u64, retries: usize) -> Result<C2GapWitness> {
    if m < 4 {
        return Err(Error::InvalidParameter("m must be at least 4".into()));
    }
    let h = random_regular_bipartite(m, 3, derive_seed(seed, 1), DEFAULT_RETRIES)?;
    let vc_h = min_vc(&h, DEFAULT_VC_CAP.max(2 * m))?.value;
    if vc_h != m as Weight {
        return Err(Error::Internal(format!("bipartite cubic graph with vc {vc_h} != {m}")));
    }
    for attempt in 0..retries {
        let g = random_regular_graph(2 * m, 3, derive_seed(seed, 2 + attempt as u64), DEFAULT_RETRIES)?;
        let vc_g = min_vc(&g, DEFAULT_VC_CAP.max(2 * m))?.value;
        if vc_g <= m as Weight {
            continue;
        }
        if !c2_equivalent(&g, &h) {
            return Err(Error::Internal("regular graphs of equal degree not C2-equivalent".into()));
        }
        return Ok(C2GapWitness {
            report_g: v_invariant(&g)?,
            report_h: v_invariant(&h)?,
            g,
            h,
            vc_g,
            vc_h,
            attempts: attempt + 1,
        });
    }
    Err(Error::RetriesExhausted(retries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star() {
        let g = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = v_invariant(&g).unwrap();
        assert_eq!((r.p, r.q, r.v), (1, 0, 1));
        assert!(r.y.is_empty());
    }

    #[test]
    fn complete_and_cycle() {
        assert_eq!(v_invariant(&Graph::complete(5)).unwrap().v, 5);
        assert_eq!(v_invariant(&Graph::cycle(6).unwrap()).unwrap().v, 6);
        assert_eq!(v_invariant(&Graph::empty(3)).unwrap().v, 0);
    }
}
