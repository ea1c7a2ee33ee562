mod common;

use common::gauss_solvable;
use gapwidth::generators::{
    check_unique_neighbour_expansion, gap_pair, random_incidence, random_regular_bipartite, random_regular_graph,
    rhs_random, small_subsets_independent, small_subsystems_satisfiable, system_from_incidence,
    BipartiteIncidence, ExpansionCheck,
};
use gapwidth::{Fraction, Graph};

#[test]
fn incidence_shape_and_determinism() {
    let a = random_incidence(10, 2, 7).unwrap();
    assert_eq!((a.num_columns(), a.num_rows()), (10, 20));
    assert!(a.rows().iter().all(|r| r[0] < r[1] && r[1] < r[2] && r[2] < 10));
    assert_eq!(a, random_incidence(10, 2, 7).unwrap());
    let differing = (0..100u64)
        .filter(|&s| random_incidence(10, 2, s).unwrap() != random_incidence(10, 2, s + 1000).unwrap())
        .count();
    assert!(differing >= 99);
    assert!(random_incidence(2, 1, 0).is_err());
    assert!(random_incidence(5, 0, 0).is_err());
}

#[test]
fn rhs_is_balanced() {
    let m = 10_000usize;
    let ones = rhs_random(m, 11).iter().filter(|&&b| b).count() as f64;
    // within four standard deviations of m/2
    assert!((ones - m as f64 / 2.0).abs() <= 4.0 * (m as f64 / 4.0).sqrt());
    assert_eq!(rhs_random(50, 3), rhs_random(50, 3));
}

#[test]
fn expansion_examples() {
    let single = BipartiteIncidence::new(6, vec![[0, 1, 2]]).unwrap();
    for b in 1..=3 {
        let check = check_unique_neighbour_expansion(&single, 3, Fraction::from_integer(b), 1000).unwrap();
        assert_eq!(check, ExpansionCheck::Pass);
    }
    let check = check_unique_neighbour_expansion(&single, 1, Fraction::from_integer(4), 1000).unwrap();
    assert_eq!(check, ExpansionCheck::Fail(vec![0]));

    let twins = BipartiteIncidence::new(6, vec![[0, 1, 2], [3, 4, 5], [2, 1, 0]]).unwrap();
    let check = check_unique_neighbour_expansion(&twins, 2, Fraction::new(1, 100), 1000).unwrap();
    assert_eq!(check, ExpansionCheck::Fail(vec![0, 2]));
    assert_eq!(small_subsets_independent(&twins, 2, 1000).unwrap(), Some(vec![0, 2]));

    let a = random_incidence(20, 2, 1).unwrap();
    assert!(check_unique_neighbour_expansion(&a, 5, Fraction::from_integer(1), 100)
        .unwrap_err()
        .is_budget());
    assert!(BipartiteIncidence::new(3, vec![[0, 0, 1]]).is_err());
}

#[test]
fn subsystems_against_elimination() {
    for s in 0..30u64 {
        let a = random_incidence(8, 1, 60_000 + s).unwrap();
        let b = rhs_random(a.num_rows(), s);
        let bad = small_subsystems_satisfiable(&a, &b, 3, 1 << 20).unwrap();
        if let Some(t) = &bad {
            let rows: Vec<(u64, bool)> =
                t.iter().map(|&u| (a.rows()[u].iter().fold(0u64, |m, &c| m | 1 << c), b[u])).collect();
            assert!(!gauss_solvable(&rows));
        }
        // independent rows are satisfiable for every right-hand side
        if small_subsets_independent(&a, 3, 1 << 20).unwrap().is_none() {
            assert!(bad.is_none());
        }
    }
    let a = random_incidence(8, 1, 0).unwrap();
    assert!(small_subsystems_satisfiable(&a, &[true], 2, 1000).is_err());
}

#[test]
fn system_from_rows() {
    let a = BipartiteIncidence::new(5, vec![[0, 1, 2], [2, 3, 4], [0, 1, 2]]).unwrap();
    let sys = system_from_incidence(&a, &[true, false, true]).unwrap();
    assert_eq!(sys.len(), 2);
    assert_eq!(sys.total_weight(), 3);
    assert!(system_from_incidence(&a, &[true]).is_err());
}

#[test]
fn gap_pair_examples() {
    let gp = gap_pair(5, 1, Fraction::new(1, 10), 2, 9, 24, 4_000_000).unwrap();
    assert_eq!(gp.satisfiable.num_vars(), 10);
    assert_eq!(gp.hard.num_vars(), 10);
    assert_eq!(gp.opt.unwrap().0, Fraction::from_integer(1));
    assert!(gp.locally_satisfiable.is_some());
    assert!(gp.is_gap().is_some());
    let big = gap_pair(30, 1, Fraction::new(1, 10), 0, 9, 24, 4_000_000).unwrap();
    assert!(big.opt.is_none() && big.is_gap().is_none() && big.locally_satisfiable.is_none());
}

#[test]
fn regular_graph_examples() {
    assert_eq!(random_regular_graph(4, 3, 0, 1000).unwrap(), Graph::complete(4));
    let k33 = random_regular_bipartite(3, 3, 0, 1000).unwrap();
    assert_eq!(k33.num_edges(), 9);
    assert!((0..3).all(|u| (3..6).all(|v| k33.has_edge(u, v))));
    for seed in 0..10 {
        let g = random_regular_graph(16, 3, seed, 10_000).unwrap();
        assert!(g.is_regular(3));
        let h = random_regular_bipartite(8, 3, seed, 10_000).unwrap();
        assert!(h.is_regular(3));
        assert!(h.edges().all(|(u, v)| (u < 8) != (v < 8)));
    }
    assert!(random_regular_graph(5, 3, 0, 10).is_err());
    assert!(random_regular_bipartite(2, 3, 0, 10).is_err());
}
