mod common;

use common::{random_graph, random_perm};
use gapwidth::gadgets::{gadget, homogeneous};
use gapwidth::games::{
    bijective_game, c2_equivalent, color_refinement, existential_game, k_locally_satisfiable,
    verify_bijective_certificate, verify_existential_certificate, wl_equivalent, Certificate,
};
use gapwidth::generators::{random_regular_bipartite, random_regular_graph, random_xor_system};
use gapwidth::structures::{encode_language, encode_second};
use gapwidth::{Encoding, Graph, Language, XorEquation, XorSystem};

const BUDGET: u64 = 4_000_000;

fn contradictory() -> XorSystem {
    XorSystem::new(
        3,
        [XorEquation::new([0, 1, 2], false, 1), XorEquation::new([0, 1, 2], true, 1)],
    )
    .unwrap()
}

fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

#[test]
fn existential_examples() {
    let gamma = encode_language(Language::Xor3, Encoding::Second);
    let v = existential_game(&encode_second(&contradictory()), &gamma, 4, BUDGET).unwrap();
    assert!(!v.duplicator_wins());
    let Some(Certificate::Existential(kills)) = &v.certificate else { panic!("no certificate") };
    assert!(verify_existential_certificate(&encode_second(&contradictory()), &gamma, 4, kills, BUDGET).unwrap());
    assert!(!k_locally_satisfiable(&contradictory(), 4, Encoding::Second, BUDGET).unwrap());

    let sat = XorSystem::new(
        4,
        [XorEquation::new([0, 1, 2], true, 1), XorEquation::new([1, 2, 3], false, 1)],
    )
    .unwrap();
    for k in 1..=3 {
        assert!(k_locally_satisfiable(&sat, k, Encoding::Second, BUDGET).unwrap());
        assert!(k_locally_satisfiable(&sat, k, Encoding::First, BUDGET).unwrap());
    }
}

#[test]
fn existential_game_is_directed() {
    // an edge maps into a triangle, not conversely
    let a = Graph::complete(2).to_structure();
    let b = Graph::complete(3).to_structure();
    assert!(existential_game(&a, &b, 3, BUDGET).unwrap().duplicator_wins());
    assert!(!existential_game(&b, &a, 3, BUDGET).unwrap().duplicator_wins());
    // C5 maps to K3 but not to K2; two pebbles do not see the odd cycle
    let c5 = Graph::cycle(5).unwrap().to_structure();
    assert!(existential_game(&c5, &a, 2, BUDGET).unwrap().duplicator_wins());
    assert!(!existential_game(&c5, &a, 3, BUDGET).unwrap().duplicator_wins());
}

#[test]
fn bijective_examples() {
    let c6 = Graph::cycle(6).unwrap();
    let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
    let (a, b) = (c6.to_structure(), triangles.to_structure());
    assert!(bijective_game(&a, &b, 2, BUDGET).unwrap().duplicator_wins());
    let v = bijective_game(&a, &b, 3, BUDGET).unwrap();
    assert!(!v.duplicator_wins());
    assert!(verify_bijective_certificate(&a, &b, 3, v.certificate.as_ref().unwrap(), BUDGET).unwrap());

    let small = Graph::complete(3).to_structure();
    let v = bijective_game(&small, &a, 1, BUDGET).unwrap();
    assert_eq!(v.certificate, Some(Certificate::SizeMismatch));

    let g = random_graph(6, 1, 2, 3);
    let h = g.relabel(&random_perm(6, 5));
    for k in 1..=3 {
        assert!(bijective_game(&g.to_structure(), &h.to_structure(), k, BUDGET).unwrap().duplicator_wins());
    }
}

#[test]
fn refinement_examples() {
    let r = color_refinement(&Graph::cycle(5).unwrap());
    assert_eq!(r.classes.len(), 1);
    assert_eq!(r.delta, vec![vec![2]]);

    let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let r = color_refinement(&star);
    assert_eq!(r.classes.len(), 2);
    let centre = r.colors[0];
    assert_eq!(r.delta[centre][1 - centre], 3);
    assert_eq!(r.delta[1 - centre][centre], 1);
    assert!(r.is_balanced() && r.is_stable(&star));

    let r = color_refinement(&path(3));
    let mid = r.colors[1];
    assert_eq!(r.classes[mid], vec![1]);
    assert_eq!(r.classes[1 - mid], vec![0, 2]);
    assert_eq!(r.delta[mid][1 - mid], 2);
}

#[test]
fn c2_examples() {
    let c6 = Graph::cycle(6).unwrap();
    let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
    assert!(c2_equivalent(&c6, &triangles));
    assert!(!c2_equivalent(&Graph::complete(4), &Graph::cycle(4).unwrap()));
    for seed in 0..5 {
        let g = random_regular_graph(12, 3, seed, 10_000).unwrap();
        let h = random_regular_bipartite(6, 3, seed, 10_000).unwrap();
        assert!(c2_equivalent(&g, &h));
    }
}

#[test]
fn refinement_is_balanced_on_corpus() {
    for s in 0..100 {
        let g = random_graph(2 + (s % 12) as usize, 1 + s % 4, 5, s);
        let r = color_refinement(&g);
        assert!(r.is_balanced(), "graph {s}");
        assert!(r.is_stable(&g), "graph {s}");
    }
}

#[test]
fn wl_agrees_with_games() {
    let c6 = Graph::cycle(6).unwrap();
    let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
    let (a, b) = (c6.to_structure(), triangles.to_structure());
    assert!(wl_equivalent(&a, &b, 1, BUDGET).unwrap());
    assert!(!wl_equivalent(&a, &b, 2, BUDGET).unwrap());
    assert!(!wl_equivalent(&a, &Graph::complete(4).to_structure(), 1, BUDGET).unwrap());
    // 2-WL against the 3-pebble game on small pairs
    for s in 0..30u64 {
        let n = 4 + (s % 3) as usize;
        let g = if s % 3 == 0 {
            random_regular_graph(n, 2, s, 10_000).unwrap()
        } else {
            random_graph(n, 1, 2, 100 + s)
        };
        let h = if s % 3 == 0 {
            random_regular_graph(n, 2, 50 + s, 10_000).unwrap()
        } else if s % 3 == 1 {
            g.relabel(&random_perm(n, s))
        } else {
            random_graph(n, 1, 2, 200 + s)
        };
        let (a, b) = (g.to_structure(), h.to_structure());
        let game = bijective_game(&a, &b, 3, BUDGET).unwrap().duplicator_wins();
        assert_eq!(wl_equivalent(&a, &b, 2, BUDGET).unwrap(), game, "pair {s}");
    }
}

#[test]
fn monotone_and_symmetric() {
    for s in 0..40u64 {
        let n = 3 + (s % 4) as usize;
        let g = random_graph(n, 1, 2, 300 + s);
        let h = if s % 2 == 0 { g.relabel(&random_perm(n, s)) } else { random_graph(n, 1, 2, 400 + s) };
        let (a, b) = (g.to_structure(), h.to_structure());
        let wins: Vec<bool> =
            (1..=3).map(|k| bijective_game(&a, &b, k, BUDGET).unwrap().duplicator_wins()).collect();
        assert!(wins.windows(2).all(|w| w[0] || !w[1]), "pair {s}: {wins:?}");
        assert_eq!(wins[1], bijective_game(&b, &a, 2, BUDGET).unwrap().duplicator_wins());
        // the bijective game refines both existential games
        if wins[1] {
            assert!(existential_game(&a, &b, 2, BUDGET).unwrap().duplicator_wins());
            assert!(existential_game(&b, &a, 2, BUDGET).unwrap().duplicator_wins());
        }
        let e: Vec<bool> =
            (1..=3).map(|k| existential_game(&a, &b, k, BUDGET).unwrap().duplicator_wins()).collect();
        assert!(e.windows(2).all(|w| w[0] || !w[1]), "pair {s}: {e:?}");
    }
}

#[test]
fn spoiler_certificates_replay() {
    for s in 0..20u64 {
        let g = random_graph(5, 1, 2, 500 + s);
        let h = random_graph(5, 1, 2, 600 + s);
        let (a, b) = (g.to_structure(), h.to_structure());
        let v = bijective_game(&a, &b, 2, BUDGET).unwrap();
        if let Some(cert) = &v.certificate {
            assert!(verify_bijective_certificate(&a, &b, 2, cert, BUDGET).unwrap());
        }
        let v = existential_game(&a, &b, 3, BUDGET).unwrap();
        if let Some(Certificate::Existential(kills)) = &v.certificate {
            assert!(verify_existential_certificate(&a, &b, 3, kills, BUDGET).unwrap());
        }
    }
}

/// Gadget instances over a locally satisfiable seed are indistinguishable
/// from their homogeneous companions, in the second encoding.
#[test]
fn gadget_pairs_indistinguishable() {
    let mut checked = [0usize; 2];
    for s in 0..30u64 {
        let sys = random_xor_system(4 + (s % 2) as usize, 2 + (s % 4) as usize, 700 + s).unwrap();
        let (g1, _) = gadget(&sys);
        let (g0, _) = gadget(&homogeneous(&sys));
        let (a, b) = (encode_second(&g1), encode_second(&g0));
        for (slot, k) in [2usize, 3].into_iter().enumerate() {
            if k_locally_satisfiable(&sys, k, Encoding::Second, BUDGET).unwrap() {
                assert!(bijective_game(&a, &b, k, BUDGET).unwrap().duplicator_wins(), "seed {s}, k = {k}");
                checked[slot] += 1;
            }
        }
    }
    assert!(checked.iter().all(|&c| c >= 5), "{checked:?}");
}
