//! Constraint systems over F2 (3XOR and 3SAT), assignments, and the two
//! encodings of systems and constraint languages as relational structures.
//!
//! Variables are dense indices `0..n`. Systems are kept in a canonical
//! consolidated form: identical constraints are merged by summing their
//! multiplicities, and entries are sorted by their canonical key.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Integer constraint multiplicities and weights.
pub type Weight = u64;

/// A total map from variables to F2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Assignment(vec![true; n])
    }

    /// The assignment with rank `index` in lexicographic order on
    /// `(x_0, ..., x_{n-1})`, so `x_0` is the most significant bit.
    pub fn from_rank(n: usize, index: u64) -> Self {
        Assignment((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    /// Inverse of [`Assignment::from_rank`].
    pub fn rank(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

/// `x_i + x_j + x_k = rhs` with multiplicity `mult`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct XorEquation {
    pub vars: [usize; 3],
    pub rhs: bool,
    pub mult: Weight,
}

impl XorEquation {
    pub fn new(vars: [usize; 3], rhs: bool, mult: Weight) -> Self {
        XorEquation { vars, rhs, mult }
    }

    pub fn satisfied_by(&self, f: &Assignment) -> bool {
        (f.get(self.vars[0]) ^ f.get(self.vars[1]) ^ f.get(self.vars[2])) == self.rhs
    }

    fn key(&self) -> ([usize; 3], bool) {
        let mut v = self.vars;
        v.sort_unstable();
        (v, self.rhs)
    }
}

fn check_triple(vars: &[usize; 3], n: usize) -> Result<()> {
    if vars.iter().any(|&v| v >= n) {
        return Err(Error::InvalidInstance(format!(
            "variable out of range in {vars:?} (n = {n})"
        )));
    }
    if vars[0] == vars[1] || vars[1] == vars[2] || vars[0] == vars[2] {
        return Err(Error::InvalidInstance(format!(
            "repeated variable in constraint {vars:?}"
        )));
    }
    Ok(())
}

/// A multiset of 3-variable parity equations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XorSystem {
    num_vars: usize,
    equations: Vec<XorEquation>,
}

impl XorSystem {
    /// Validates and consolidates. Identical equations (same unordered
    /// triple and right-hand side) are merged; the first written variable
    /// order is kept.
    pub fn new(num_vars: usize, equations: impl IntoIterator<Item = XorEquation>) -> Result<Self> {
        let mut merged: BTreeMap<([usize; 3], bool), XorEquation> = BTreeMap::new();
        for eq in equations {
            check_triple(&eq.vars, num_vars)?;
            if eq.mult == 0 {
                return Err(Error::InvalidInstance("zero multiplicity".into()));
            }
            merged
                .entry(eq.key())
                .and_modify(|e| e.mult += eq.mult)
                .or_insert(eq);
        }
        Ok(XorSystem {
            num_vars,
            equations: merged.into_values().collect(),
        })
    }

    pub fn empty(num_vars: usize) -> Self {
        XorSystem {
            num_vars,
            equations: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn equations(&self) -> &[XorEquation] {
        &self.equations
    }

    /// Number of consolidated entries.
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Sum of multiplicities.
    pub fn total_weight(&self) -> Weight {
        self.equations.iter().map(|e| e.mult).sum()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.equations.iter().all(|e| !e.rhs)
    }

    /// (satisfied weight, total weight) under `f`.
    pub fn sat_count(&self, f: &Assignment) -> (Weight, Weight) {
        assert_eq!(f.len(), self.num_vars, "assignment must be total");
        let sat = self
            .equations
            .iter()
            .filter(|e| e.satisfied_by(f))
            .map(|e| e.mult)
            .sum();
        (sat, self.total_weight())
    }

    /// The same system with every right-hand side replaced by `rhs`.
    pub fn with_rhs(&self, rhs: &[bool]) -> Result<Self> {
        if rhs.len() != self.equations.len() {
            return Err(Error::LengthMismatch {
                expected: self.equations.len(),
                got: rhs.len(),
            });
        }
        XorSystem::new(
            self.num_vars,
            self.equations
                .iter()
                .zip(rhs)
                .map(|(e, &b)| XorEquation::new(e.vars, b, e.mult)),
        )
    }

    /// Multiset union over the same variable set.
    pub fn union(&self, other: &XorSystem) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        XorSystem::new(
            self.num_vars,
            self.equations.iter().chain(&other.equations).copied(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// The literal `z^(a)`: `z` when `a = 1`, `¬z` when `a = 0`.
    pub fn with_sign(var: usize, a: bool) -> Self {
        Literal { var, positive: a }
    }

    pub fn value(&self, f: &Assignment) -> bool {
        f.get(self.var) == self.positive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub lits: [Literal; 3],
    pub mult: Weight,
}

impl Clause {
    pub fn new(lits: [Literal; 3], mult: Weight) -> Self {
        Clause { lits, mult }
    }

    pub fn satisfied_by(&self, f: &Assignment) -> bool {
        self.lits.iter().any(|l| l.value(f))
    }

    fn key(&self) -> [Literal; 3] {
        let mut l = self.lits;
        l.sort_unstable();
        l
    }

    /// Index (0..8) of the polarity pattern in written order; bit 2 is the
    /// first literal, set when positive.
    pub fn pattern(&self) -> usize {
        self.lits
            .iter()
            .fold(0, |acc, l| (acc << 1) | l.positive as usize)
    }
}

/// A multiset of 3-literal clauses on distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfSystem {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfSystem {
    pub fn new(num_vars: usize, clauses: impl IntoIterator<Item = Clause>) -> Result<Self> {
        let mut merged: BTreeMap<[Literal; 3], Clause> = BTreeMap::new();
        for c in clauses {
            let vars = [c.lits[0].var, c.lits[1].var, c.lits[2].var];
            check_triple(&vars, num_vars)?;
            if c.mult == 0 {
                return Err(Error::InvalidInstance("zero multiplicity".into()));
            }
            merged
                .entry(c.key())
                .and_modify(|e| e.mult += c.mult)
                .or_insert(c);
        }
        Ok(CnfSystem {
            num_vars,
            clauses: merged.into_values().collect(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn total_weight(&self) -> Weight {
        self.clauses.iter().map(|c| c.mult).sum()
    }

    pub fn sat_count(&self, f: &Assignment) -> (Weight, Weight) {
        assert_eq!(f.len(), self.num_vars, "assignment must be total");
        let sat = self
            .clauses
            .iter()
            .filter(|c| c.satisfied_by(f))
            .map(|c| c.mult)
            .sum();
        (sat, self.total_weight())
    }

    pub fn union(&self, other: &CnfSystem) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        CnfSystem::new(
            self.num_vars,
            self.clauses.iter().chain(&other.clauses).copied(),
        )
    }
}

/// Translates each equation `x + y + z = d` into the four clauses
/// `{x^(a), y^(b), z^(c)}` with `a + b + c = d`. An assignment satisfies all
/// four iff it satisfies the equation, and otherwise falsifies exactly one.
pub fn xor_to_sat(sys: &XorSystem) -> CnfSystem {
    let clauses = sys.equations().iter().flat_map(|e| {
        (0u8..8).filter_map(move |bits| {
            let a = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
            if (a[0] ^ a[1] ^ a[2]) != e.rhs {
                return None;
            }
            Some(Clause::new(
                [
                    Literal::with_sign(e.vars[0], a[0]),
                    Literal::with_sign(e.vars[1], a[1]),
                    Literal::with_sign(e.vars[2], a[2]),
                ],
                e.mult,
            ))
        })
    });
    CnfSystem::new(sys.num_vars(), clauses).expect("translation of a valid system is valid")
}

// ---------------------------------------------------------------------------
// Relational structures
// ---------------------------------------------------------------------------

/// Relation symbols with arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    symbols: Vec<(String, usize)>,
}

impl Vocabulary {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (name, arity) in &symbols {
            if *arity == 0 {
                return Err(Error::InvalidParameter(format!("symbol {name} has arity 0")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate symbol {name}")));
            }
        }
        Ok(Vocabulary { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].0
    }

    pub fn arity(&self, i: usize) -> usize {
        self.symbols[i].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }
}

/// A finite relational structure with universe `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelStructure {
    vocab: Vocabulary,
    size: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl RelStructure {
    pub fn new(vocab: Vocabulary, size: usize, relations: Vec<BTreeSet<Vec<usize>>>) -> Result<Self> {
        if relations.len() != vocab.len() {
            return Err(Error::LengthMismatch {
                expected: vocab.len(),
                got: relations.len(),
            });
        }
        for (i, rel) in relations.iter().enumerate() {
            for t in rel {
                if t.len() != vocab.arity(i) {
                    return Err(Error::InvalidInstance(format!(
                        "tuple {t:?} has wrong arity for {}",
                        vocab.name(i)
                    )));
                }
                if t.iter().any(|&e| e >= size) {
                    return Err(Error::InvalidInstance(format!(
                        "tuple {t:?} leaves the universe of size {size}"
                    )));
                }
            }
        }
        Ok(RelStructure {
            vocab,
            size,
            relations,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, i: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[i]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.vocab.index_of(name).map(|i| &self.relations[i])
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// Image under an element renaming; used to compare structures up to
    /// isomorphism in tests.
    pub fn relabel(&self, perm: &[usize]) -> RelStructure {
        let relations = self
            .relations
            .iter()
            .map(|r| r.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        RelStructure {
            vocab: self.vocab.clone(),
            size: self.size,
            relations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Language {
    Xor3,
    Sat3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    First,
    Second,
}

impl Language {
    /// Relations of the constraint language, each a set of Boolean triples.
    /// 3XOR: `R0`, `R1` (coordinate sum). 3SAT: `R1..R8`, where `R{p+1}`
    /// holds the triples satisfying the clause with polarity pattern `p`.
    pub fn relations(&self) -> Vec<(String, BTreeSet<[bool; 3]>)> {
        let all: Vec<[bool; 3]> = (0u8..8)
            .map(|b| [b & 4 != 0, b & 2 != 0, b & 1 != 0])
            .collect();
        match self {
            Language::Xor3 => (0..2)
                .map(|b| {
                    let rel = all
                        .iter()
                        .filter(|t| (t[0] ^ t[1] ^ t[2]) == (b == 1))
                        .copied()
                        .collect();
                    (format!("R{b}"), rel)
                })
                .collect(),
            Language::Sat3 => (0..8usize)
                .map(|p| {
                    let signs = [p & 4 != 0, p & 2 != 0, p & 1 != 0];
                    let rel = all
                        .iter()
                        .filter(|t| (0..3).any(|i| t[i] == signs[i]))
                        .copied()
                        .collect();
                    (format!("R{}", p + 1), rel)
                })
                .collect(),
        }
    }

    fn relation_names(&self) -> Vec<String> {
        match self {
            Language::Xor3 => vec!["R0".into(), "R1".into()],
            Language::Sat3 => (1..=8).map(|i| format!("R{i}")).collect(),
        }
    }
}

/// Uniform view of both system kinds for the encodings.
pub trait ConstraintSystem {
    fn language(&self) -> Language;
    fn num_vars(&self) -> usize;
    /// (variables in written order, index of the language relation, multiplicity)
    fn constraints(&self) -> Vec<([usize; 3], usize, Weight)>;
}

impl ConstraintSystem for XorSystem {
    fn language(&self) -> Language {
        Language::Xor3
    }
    fn num_vars(&self) -> usize {
        self.num_vars
    }
    fn constraints(&self) -> Vec<([usize; 3], usize, Weight)> {
        self.equations
            .iter()
            .map(|e| (e.vars, e.rhs as usize, e.mult))
            .collect()
    }
}

impl ConstraintSystem for CnfSystem {
    fn language(&self) -> Language {
        Language::Sat3
    }
    fn num_vars(&self) -> usize {
        self.num_vars
    }
    fn constraints(&self) -> Vec<([usize; 3], usize, Weight)> {
        self.clauses
            .iter()
            .map(|c| ([c.lits[0].var, c.lits[1].var, c.lits[2].var], c.pattern(), c.mult))
            .collect()
    }
}

fn first_vocabulary(lang: Language) -> Vocabulary {
    let mut symbols: Vec<(String, usize)> = (1..=3).map(|i| (format!("E{i}"), 2)).collect();
    symbols.extend(lang.relation_names().into_iter().map(|n| (format!("Z_{n}"), 1)));
    Vocabulary::new(symbols).expect("static vocabulary")
}

fn second_vocabulary(lang: Language) -> Vocabulary {
    Vocabulary::new(lang.relation_names().into_iter().map(|n| (n, 3)).collect())
        .expect("static vocabulary")
}

/// Universe: variables `0..n`, then one element per constraint copy
/// (multiplicities expanded). `E_i(x, c)` when `x` is the i-th variable of
/// `c`; `Z_R(c)` when `c` is an R-constraint.
pub fn encode_first<S: ConstraintSystem + ?Sized>(sys: &S) -> RelStructure {
    let lang = sys.language();
    let vocab = first_vocabulary(lang);
    let n = sys.num_vars();
    let mut relations = vec![BTreeSet::new(); vocab.len()];
    let mut next = n;
    for (vars, rel, mult) in sys.constraints() {
        for _ in 0..mult {
            let c = next;
            next += 1;
            for (i, &x) in vars.iter().enumerate() {
                relations[i].insert(vec![x, c]);
            }
            relations[3 + rel].insert(vec![c]);
        }
    }
    RelStructure::new(vocab, next, relations).expect("encoding is well formed")
}

/// Universe: the variables. One ternary relation per language relation,
/// holding the written variable tuple of each constraint. Multiplicity is
/// dropped.
pub fn encode_second<S: ConstraintSystem + ?Sized>(sys: &S) -> RelStructure {
    let vocab = second_vocabulary(sys.language());
    let mut relations = vec![BTreeSet::new(); vocab.len()];
    for (vars, rel, _) in sys.constraints() {
        relations[rel].insert(vars.to_vec());
    }
    RelStructure::new(vocab, sys.num_vars(), relations).expect("encoding is well formed")
}

/// The constraint language as a structure.
///
/// Second encoding: universe `{0, 1}` with the relations themselves.
/// First encoding: universe `D ∪ D² ∪ D³` (2 + 4 + 8 elements, listed in
/// that order, each block lexicographically), `E_i(b, t)` iff `b = t_i`, and
/// `Z_R(t)` iff `t` is a triple in `R`.
pub fn encode_language(lang: Language, encoding: Encoding) -> RelStructure {
    let rels = lang.relations();
    match encoding {
        Encoding::Second => {
            let vocab = second_vocabulary(lang);
            let relations = rels
                .iter()
                .map(|(_, r)| {
                    r.iter()
                        .map(|t| t.iter().map(|&b| b as usize).collect())
                        .collect()
                })
                .collect();
            RelStructure::new(vocab, 2, relations).expect("static structure")
        }
        Encoding::First => {
            let vocab = first_vocabulary(lang);
            // element ids: 0,1 for D; then tuples of length 2 and 3
            let mut tuples: Vec<Vec<bool>> = Vec::new();
            for len in 2..=3usize {
                for bits in 0..(1usize << len) {
                    tuples.push((0..len).map(|i| (bits >> (len - 1 - i)) & 1 == 1).collect());
                }
            }
            let size = 2 + tuples.len();
            let mut relations = vec![BTreeSet::new(); vocab.len()];
            for (idx, t) in tuples.iter().enumerate() {
                let id = 2 + idx;
                for (i, &b) in t.iter().enumerate() {
                    relations[i].insert(vec![b as usize, id]);
                }
                if t.len() == 3 {
                    let triple = [t[0], t[1], t[2]];
                    for (r, (_, rel)) in rels.iter().enumerate() {
                        if rel.contains(&triple) {
                            relations[3 + r].insert(vec![id]);
                        }
                    }
                }
            }
            RelStructure::new(vocab, size, relations).expect("static structure")
        }
    }
}

/// Encodes a system in the requested encoding.
pub fn encode<S: ConstraintSystem + ?Sized>(sys: &S, encoding: Encoding) -> RelStructure {
    match encoding {
        Encoding::First => encode_first(sys),
        Encoding::Second => encode_second(sys),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(v: [usize; 3], b: bool, m: Weight) -> XorEquation {
        XorEquation::new(v, b, m)
    }

    #[test]
    fn first_encoding_single_equation() {
        let sys = XorSystem::new(3, [eq([0, 1, 2], true, 1)]).unwrap();
        let s = encode_first(&sys);
        assert_eq!(s.size(), 4);
        assert_eq!(s.relation_by_name("E1").unwrap(), &BTreeSet::from([vec![0, 3]]));
        assert_eq!(s.relation_by_name("E2").unwrap(), &BTreeSet::from([vec![1, 3]]));
        assert_eq!(s.relation_by_name("E3").unwrap(), &BTreeSet::from([vec![2, 3]]));
        assert_eq!(s.relation_by_name("Z_R1").unwrap(), &BTreeSet::from([vec![3]]));
        assert!(s.relation_by_name("Z_R0").unwrap().is_empty());
    }

    #[test]
    fn first_encoding_empty_and_multiplicity() {
        let s = encode_first(&XorSystem::empty(2));
        assert_eq!(s.size(), 2);
        assert!(s.relations().iter().all(|r| r.is_empty()));

        let sys = XorSystem::new(4, [eq([0, 1, 2], false, 2), eq([1, 2, 3], true, 3)]).unwrap();
        let s = encode_first(&sys);
        assert_eq!(s.size(), 4 + 5);
        assert_eq!(s.relation_by_name("E1").unwrap().len(), 5);
        // two copies of the first equation have identical incidences
        let e1 = s.relation_by_name("E1").unwrap();
        assert!(e1.contains(&vec![0, 4]) && e1.contains(&vec![0, 5]));
    }

    #[test]
    fn second_encoding_drops_multiplicity() {
        let a = XorSystem::new(3, [eq([0, 1, 2], false, 5)]).unwrap();
        let b = XorSystem::new(3, [eq([0, 1, 2], false, 1)]).unwrap();
        assert_eq!(encode_second(&a), encode_second(&b));
        assert_eq!(
            encode_second(&a).relation_by_name("R0").unwrap(),
            &BTreeSet::from([vec![0, 1, 2]])
        );

        let both = XorSystem::new(3, [eq([0, 1, 2], false, 1), eq([0, 1, 2], true, 1)]).unwrap();
        let s = encode_second(&both);
        assert!(s.holds(0, &[0, 1, 2]) && s.holds(1, &[0, 1, 2]));
    }

    #[test]
    fn language_structures() {
        let x2 = encode_language(Language::Xor3, Encoding::Second);
        let r0: BTreeSet<Vec<usize>> =
            BTreeSet::from([vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(x2.relation_by_name("R0").unwrap(), &r0);
        assert_eq!(x2.size(), 2);

        let x1 = encode_language(Language::Xor3, Encoding::First);
        assert_eq!(x1.size(), 14);
        assert_eq!(x1.relation_by_name("Z_R0").unwrap().len(), 4);
        assert_eq!(x1.relation_by_name("Z_R1").unwrap().len(), 4);

        let s2 = encode_language(Language::Sat3, Encoding::Second);
        assert_eq!(s2.vocabulary().len(), 8);
        assert!(s2.relations().iter().all(|r| r.len() == 7));
    }

    #[test]
    fn sat_counts() {
        let sys = XorSystem::new(3, [eq([0, 1, 2], true, 3)]).unwrap();
        assert_eq!(sys.sat_count(&Assignment::ones(3)), (3, 3));

        let pair = XorSystem::new(3, [eq([0, 1, 2], false, 2), eq([0, 1, 2], true, 2)]).unwrap();
        for r in 0..8 {
            assert_eq!(pair.sat_count(&Assignment::from_rank(3, r)), (2, 4));
        }

        let cnf = CnfSystem::new(
            3,
            [Clause::new(
                [Literal::new(0, true), Literal::new(1, false), Literal::new(2, true)],
                1,
            )],
        )
        .unwrap();
        assert_eq!(cnf.sat_count(&Assignment::new(vec![false, true, false])), (0, 1));
    }

    #[test]
    fn consolidation_and_validation() {
        let sys = XorSystem::new(4, [eq([0, 1, 2], true, 1), eq([2, 0, 1], true, 2)]).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.equations()[0].mult, 3);
        assert_eq!(sys.equations()[0].vars, [0, 1, 2]);
        assert!(XorSystem::new(3, [eq([0, 0, 1], true, 1)]).is_err());
        assert!(XorSystem::new(3, [eq([0, 1, 3], true, 1)]).is_err());
        assert!(XorSystem::new(3, [eq([0, 1, 2], true, 0)]).is_err());
    }

    #[test]
    fn xor_to_sat_four_clauses() {
        let sys = XorSystem::new(3, [eq([0, 1, 2], true, 1)]).unwrap();
        let cnf = xor_to_sat(&sys);
        assert_eq!(cnf.len(), 4);
        for r in 0..8 {
            let f = Assignment::from_rank(3, r);
            let (s, _) = cnf.sat_count(&f);
            let expect = if sys.sat_count(&f).0 == 1 { 4 } else { 3 };
            assert_eq!(s, expect);
        }
    }

    #[test]
    fn rank_round_trip() {
        let f = Assignment::from_rank(5, 0b10110);
        assert_eq!(f.values(), &[true, false, true, true, false]);
        assert_eq!(f.rank(), 0b10110);
    }
}
