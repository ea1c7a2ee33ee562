//! The doubling gadget `G(I)` and homogeneous companions.

use crate::structures::{Assignment, XorEquation, XorSystem};

/// Index map `(j, a) ↦ 2j + a` for the doubled variables `x_j^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetVarMap {
    original_vars: usize,
}

impl GadgetVarMap {
    pub fn new(original_vars: usize) -> Self {
        GadgetVarMap { original_vars }
    }

    pub fn index(&self, j: usize, a: bool) -> usize {
        debug_assert!(j < self.original_vars);
        2 * j + a as usize
    }

    /// Inverse of [`GadgetVarMap::index`].
    pub fn origin(&self, idx: usize) -> (usize, bool) {
        (idx / 2, idx % 2 == 1)
    }

    pub fn num_vars(&self) -> usize {
        2 * self.original_vars
    }
}

/// For each equation `x_j + x_k + x_l = b` of multiplicity `w`, the eight
/// equations `x_j^{a1} + x_k^{a2} + x_l^{a3} = b + a1 + a2 + a3`, each of
/// multiplicity `w`.
pub fn gadget(sys: &XorSystem) -> (XorSystem, GadgetVarMap) {
    let map = GadgetVarMap::new(sys.num_vars());
    let eqs = sys.equations().iter().flat_map(|e| {
        (0u8..8).map(move |bits| {
            let a = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
            XorEquation::new(
                [
                    map.index(e.vars[0], a[0]),
                    map.index(e.vars[1], a[1]),
                    map.index(e.vars[2], a[2]),
                ],
                e.rhs ^ a[0] ^ a[1] ^ a[2],
                e.mult,
            )
        })
    });
    let out = XorSystem::new(map.num_vars(), eqs).expect("gadget of a valid system is valid");
    (out, map)
}

/// The same left-hand sides with every right-hand side 0.
pub fn homogeneous(sys: &XorSystem) -> XorSystem {
    XorSystem::new(
        sys.num_vars(),
        sys.equations()
            .iter()
            .map(|e| XorEquation::new(e.vars, false, e.mult)),
    )
    .expect("same left-hand sides")
}

/// `x_j^a := a`, which satisfies `G(I^0)` for every `I`.
pub fn canonical_homogeneous_solution(map: &GadgetVarMap) -> Assignment {
    Assignment::new((0..map.num_vars()).map(|i| map.origin(i).1).collect())
}

/// Lifts an assignment `f` of `I` to `G(I)` by `x_j^a := f(x_j) + a`.
/// It satisfies the lifted copies of exactly the equations `f` satisfies.
pub fn lift_assignment(f: &Assignment, map: &GadgetVarMap) -> Assignment {
    Assignment::new(
        (0..map.num_vars())
            .map(|i| {
                let (j, a) = map.origin(i);
                f.get(j) ^ a
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_equations_with_twisted_rhs() {
        let sys = XorSystem::new(3, [XorEquation::new([0, 1, 2], true, 1)]).unwrap();
        let (g, map) = gadget(&sys);
        assert_eq!(g.num_vars(), 6);
        assert_eq!(g.len(), 8);
        assert_eq!(g.total_weight(), 8);
        let base = g
            .equations()
            .iter()
            .find(|e| e.vars == [0, 2, 4])
            .unwrap();
        assert!(base.rhs);
        assert_eq!(map.index(2, true), 5);
    }

    #[test]
    fn empty_and_homogeneous() {
        let (g, _) = gadget(&XorSystem::empty(3));
        assert!(g.is_empty());
        assert_eq!(g.num_vars(), 6);

        let sys = XorSystem::new(4, [XorEquation::new([0, 1, 3], true, 2)]).unwrap();
        let h = homogeneous(&sys);
        assert!(h.is_homogeneous());
        assert_eq!(h.equations()[0].mult, 2);
        assert_eq!(homogeneous(&h), h);

        let (g0, map) = gadget(&h);
        let f = canonical_homogeneous_solution(&map);
        assert_eq!(g0.sat_count(&f), (16, 16));
    }
}
