mod common;

use common::{brute_vc, random_graph, random_perm};
use gapwidth::games::c2_equivalent;
use gapwidth::vcwidth::{c2_gap_witness, v_invariant};
use gapwidth::Graph;

#[test]
fn examples() {
    let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let r = v_invariant(&p3).unwrap();
    assert_eq!((r.p, r.q, r.v), (1, 0, 1));
    let triangle_plus = Graph::complete(3).disjoint_union(&Graph::empty(2));
    let r = v_invariant(&triangle_plus).unwrap();
    assert_eq!((r.p, r.q, r.v), (0, 3, 3));
    assert_eq!(v_invariant(&Graph::cycle(5).unwrap()).unwrap().v, 5);
}

#[test]
fn report_lifts_to_a_cover() {
    for s in 0..200u64 {
        let n = 1 + (s % 12) as usize;
        let g = random_graph(n, 1 + s % 3, 4, 70_000 + s);
        let r = v_invariant(&g).unwrap();
        let mut in_cover = vec![false; n];
        for &c in r.cover.iter().chain(&r.y) {
            for &v in &r.refinement.classes[c] {
                in_cover[v] = true;
            }
        }
        assert!(g.is_vertex_cover(&in_cover), "graph {s}");
        assert_eq!(in_cover.iter().filter(|&&b| b).count() as u64, r.v);
        let vc = brute_vc(&g);
        assert!(vc <= r.v && r.v <= 2 * vc, "graph {s}: vc {vc}, v {}", r.v);
    }
}

#[test]
fn invariant_under_c2_equivalence() {
    for s in 0..50u64 {
        let n = 2 + (s % 9) as usize;
        let g = random_graph(n, 1, 2, 71_000 + s);
        let h = g.relabel(&random_perm(n, s));
        assert_eq!(v_invariant(&g).unwrap().v, v_invariant(&h).unwrap().v);
    }
    let c6 = Graph::cycle(6).unwrap();
    let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
    assert!(c2_equivalent(&c6, &triangles));
    assert_eq!(v_invariant(&c6).unwrap().v, v_invariant(&triangles).unwrap().v);
}

#[test]
fn gap_witness() {
    let w = c2_gap_witness(6, 3, 500).unwrap();
    assert!(w.g.is_regular(3) && w.h.is_regular(3));
    assert_eq!(w.vc_h, 6);
    assert!(w.vc_g > 6);
    assert_eq!(w.report_g.v, w.report_h.v);
    assert_eq!(w.vc_g, brute_vc(&w.g));
    assert!(c2_gap_witness(3, 0, 10).is_err());
    assert!(c2_gap_witness(6, 3, 0).is_err());
}
