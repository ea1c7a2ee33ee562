//! Long-code reductions from projection label cover to 3XOR and 3SAT, with
//! folding over true.
//!
//! Long-code tables of left vertices have `2^p` entries and of right
//! vertices `2^q`. Points `z ∈ F2^d` are bitmasks with bit `i` holding
//! coordinate `i`. Folding keeps one variable per antipodal pair
//! `{z, z + 1}`: `S(z) = z_{d-1}` and `F(z)` is the first `d - 1`
//! coordinates of `z + S(z)·1`.
//!
//! When both left queries of a test fold onto the same variable the
//! constraint degenerates: an equation becomes a unary equation on the
//! right variable, and a clause either loses a duplicate literal or
//! becomes a tautology. These degenerate constraints keep their weight and
//! are returned next to the strict 3-variable system.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::labelcover::LabelCover;
use crate::oracles::WeightedCsp;
use crate::structures::{Assignment, Clause, CnfSystem, Literal, Weight, XorEquation, XorSystem};

/// Default cap on generated constraints before consolidation.
pub const DEFAULT_CONSTRAINT_BUDGET: u64 = 1 << 26;

/// Largest supported label domain; tables have `2^p` entries.
pub const MAX_DOMAIN: usize = 24;

/// Folding of a point `z ∈ F2^d` given as a coordinate vector.
pub fn fold(z: &[bool]) -> Result<(Vec<bool>, bool)> {
    if z.len() < 2 {
        return Err(Error::InvalidParameter("folding needs length at least 2".into()));
    }
    let s = z[z.len() - 1];
    Ok((z[..z.len() - 1].iter().map(|&c| c ^ s).collect(), s))
}

/// Bitmask form of [`fold`].
#[inline]
pub fn fold_mask(z: u64, d: usize) -> (u64, bool) {
    let s = (z >> (d - 1)) & 1 == 1;
    let low = (1u64 << (d - 1)) - 1;
    let f = if s { !z & low } else { z & low };
    (f, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    U,
    V,
}

/// A folded long-code variable: `owner`'s table at the folded point `bits`
/// (length `p - 1` on the left, `q - 1` on the right).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FoldedIndex {
    pub side: Side,
    pub owner: usize,
    pub bits: u64,
}

/// Variable numbering: left tables first (`u · 2^{p-1} + bits`), then right
/// tables (`m · 2^{p-1} + v · 2^{q-1} + bits`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoldedLayout {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl FoldedLayout {
    pub fn num_vars(&self) -> usize {
        self.m * (1 << (self.p - 1)) + self.n * (1 << (self.q - 1))
    }

    pub fn index(&self, f: FoldedIndex) -> usize {
        match f.side {
            Side::U => f.owner * (1 << (self.p - 1)) + f.bits as usize,
            Side::V => self.m * (1 << (self.p - 1)) + f.owner * (1 << (self.q - 1)) + f.bits as usize,
        }
    }

    pub fn decode(&self, idx: usize) -> FoldedIndex {
        let left = self.m * (1 << (self.p - 1));
        if idx < left {
            FoldedIndex {
                side: Side::U,
                owner: idx >> (self.p - 1),
                bits: (idx & ((1 << (self.p - 1)) - 1)) as u64,
            }
        } else {
            let r = idx - left;
            FoldedIndex {
                side: Side::V,
                owner: r >> (self.q - 1),
                bits: (r & ((1 << (self.q - 1)) - 1)) as u64,
            }
        }
    }

    fn dim(&self, side: Side) -> usize {
        match side {
            Side::U => self.p,
            Side::V => self.q,
        }
    }

    /// Index of the variable read at full point `z` of `owner`'s table,
    /// and the sign `S(z)` added to it.
    pub fn query(&self, side: Side, owner: usize, z: u64) -> (usize, bool) {
        let (bits, s) = fold_mask(z, self.dim(side));
        (self.index(FoldedIndex { side, owner, bits }), s)
    }

    /// The full table `A'(z) = A(F(z)) + S(z)` decoded from an assignment
    /// to the folded variables.
    pub fn table(&self, f: &Assignment, side: Side, owner: usize) -> Vec<bool> {
        let d = self.dim(side);
        (0..1u64 << d)
            .map(|z| {
                let (var, s) = self.query(side, owner, z);
                f.get(var) ^ s
            })
            .collect()
    }

    /// Folded assignment whose tables are the dictators of the given
    /// labels (`A_u(y) = y_{f(u)}`, `A_v(x) = x_{g(v)}`), or their
    /// complements when `complemented`.
    pub fn dictator_assignment(&self, f: &[usize], g: &[usize], complemented: bool) -> Assignment {
        let values = (0..self.num_vars())
            .map(|idx| {
                let fi = self.decode(idx);
                let label = match fi.side {
                    Side::U => f[fi.owner],
                    Side::V => g[fi.owner],
                };
                // the folded variable is the table at (bits, S = 0)
                ((fi.bits >> label) & 1 == 1) ^ complemented
            })
            .collect();
        Assignment::new(values)
    }
}

/// `v(F(x)) = rhs`, left after both left queries fold together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnaryEquation {
    pub var: usize,
    pub rhs: bool,
    pub mult: Weight,
}

/// Two-literal clause left after a duplicate literal is merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryClause {
    pub lits: [Literal; 2],
    pub mult: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongCodeXor {
    pub system: XorSystem,
    /// Consolidated, sorted by `(var, rhs)`.
    pub unary: Vec<UnaryEquation>,
    pub layout: FoldedLayout,
}

impl LongCodeXor {
    pub fn total_weight(&self) -> Weight {
        self.system.total_weight() + self.unary.iter().map(|e| e.mult).sum::<Weight>()
    }

    pub fn sat_count(&self, f: &Assignment) -> (Weight, Weight) {
        let (s, _) = self.system.sat_count(f);
        let extra: Weight = self
            .unary
            .iter()
            .filter(|e| f.get(e.var) == e.rhs)
            .map(|e| e.mult)
            .sum();
        (s + extra, self.total_weight())
    }

    pub fn to_csp(&self) -> WeightedCsp {
        let mut csp = WeightedCsp::from(&self.system);
        for e in &self.unary {
            csp.add_parity(&[e.var], e.rhs, e.mult);
        }
        csp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongCodeSat {
    pub system: CnfSystem,
    /// Consolidated, sorted by literals.
    pub binary: Vec<BinaryClause>,
    /// Total weight of clauses containing a variable and its negation.
    pub tautologies: Weight,
    pub layout: FoldedLayout,
}

impl LongCodeSat {
    pub fn total_weight(&self) -> Weight {
        self.system.total_weight() + self.binary.iter().map(|c| c.mult).sum::<Weight>() + self.tautologies
    }

    pub fn sat_count(&self, f: &Assignment) -> (Weight, Weight) {
        let (s, _) = self.system.sat_count(f);
        let extra: Weight = self
            .binary
            .iter()
            .filter(|c| c.lits.iter().any(|l| l.value(f)))
            .map(|c| c.mult)
            .sum();
        (s + extra + self.tautologies, self.total_weight())
    }

    pub fn to_csp(&self) -> WeightedCsp {
        let mut csp = WeightedCsp::from(&self.system);
        for c in &self.binary {
            csp.add_clause(&c.lits, c.mult);
        }
        if self.tautologies > 0 {
            csp.add_constant(self.tautologies);
        }
        csp
    }
}

fn overflow(stage: &str) -> Error {
    Error::budget(stage, "multiplicity beyond 64 bits", "u64")
}

fn checked_pow(base: u64, e: usize, stage: &str) -> Result<u64> {
    base.checked_pow(e as u32).ok_or_else(|| overflow(stage))
}

/// `table[i] = base^i` for `i ≤ p`, or `None` past the first overflow.
fn power_table(base: u64, p: usize) -> Vec<Option<u64>> {
    let mut out = Vec::with_capacity(p + 1);
    let mut acc = Some(1u64);
    for _ in 0..=p {
        out.push(acc);
        acc = acc.and_then(|a| a.checked_mul(base));
    }
    out
}

fn check_input(lc: &LabelCover, budget: u64, stage: &str) -> Result<FoldedLayout> {
    if !lc.flags().projection {
        return Err(Error::NotProjection);
    }
    let (p, q) = (lc.left_domain(), lc.right_domain());
    if p < 2 || q < 2 {
        return Err(Error::InvalidParameter("label domains must have at least 2 labels".into()));
    }
    if p > MAX_DOMAIN || q > MAX_DOMAIN {
        return Err(Error::budget(stage, format!("domains {p}, {q}"), MAX_DOMAIN));
    }
    let layout = FoldedLayout {
        m: lc.num_left(),
        n: lc.num_right(),
        p,
        q,
    };
    let vars = ((layout.m as u128) << (p - 1)) + ((layout.n as u128) << (q - 1));
    let tests = (lc.edges().len() as u128) << (q + 2 * p);
    if vars > budget as u128 || tests > budget as u128 {
        return Err(Error::budget(
            stage,
            format!("{vars} variables, {tests} tests"),
            budget,
        ));
    }
    Ok(layout)
}

/// `x∘π` as a mask over `[p]`: bit `i` is `x_{π(i)}`.
fn compose(x: u64, pi: &[usize]) -> u64 {
    pi.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((x >> b) & 1) << i)
}

fn validate_epsilon(eps: Ratio<u64>, allow_one: bool) -> Result<(u64, u64)> {
    let (n, m) = (*eps.numer(), *eps.denom());
    let ok = n > 0 && (n < m || (allow_one && n == m));
    if !ok {
        return Err(Error::InvalidParameter(format!("epsilon {n}/{m} out of range")));
    }
    Ok((n, m))
}

/// Reduction to 3XOR. For every pair `(u, v)`, `x ∈ F2^q` and
/// `y, z ∈ F2^p`, the test `v(F(x)) + u(F(y)) + u(F(z)) = S(x) + S(y) +
/// S(z)` gets multiplicity `W(u,v) · N^D · (M-N)^{p-D}` where `ε = N/M`
/// and `D` counts `i ∈ [p]` with `z_i ≠ x_{π(i)} + y_i`. The multiplicities
/// of one pair sum to `W(u,v) · 2^{p+q} · M^p`.
pub fn longcode_xor(lc: &LabelCover, eps: Ratio<u64>, budget: u64) -> Result<LongCodeXor> {
    let stage = "longcode-xor";
    let layout = check_input(lc, budget, stage)?;
    let (nn, mm) = validate_epsilon(eps, false)?;
    let (p, q) = (layout.p, layout.q);
    let pw_n = power_table(nn, p);
    let pw_c = power_table(mm - nn, p);
    let full = (1u64 << p) - 1;

    type Block = (Vec<XorEquation>, Vec<UnaryEquation>);
    let blocks: Vec<Result<Block>> = lc
        .edges()
        .par_iter()
        .map(|e| {
            let pi = e.pi().ok_or(Error::NotProjection)?;
            let mut eqs = Vec::new();
            let mut unary = Vec::new();
            for x in 0..1u64 << q {
                let xp = compose(x, &pi);
                let (vx, sx) = layout.query(Side::V, e.v, x);
                for y in 0..1u64 << p {
                    let (uy, sy) = layout.query(Side::U, e.u, y);
                    for z in 0..1u64 << p {
                        let d = ((z ^ xp ^ y) & full).count_ones() as usize;
                        let mult = pw_n[d]
                            .zip(pw_c[p - d])
                            .and_then(|(a, b)| a.checked_mul(b))
                            .and_then(|t| t.checked_mul(e.w))
                            .ok_or_else(|| overflow(stage))?;
                        if mult == 0 {
                            continue;
                        }
                        let (uz, sz) = layout.query(Side::U, e.u, z);
                        let rhs = sx ^ sy ^ sz;
                        if uy == uz {
                            unary.push(UnaryEquation { var: vx, rhs, mult });
                        } else {
                            eqs.push(XorEquation::new([vx, uy, uz], rhs, mult));
                        }
                    }
                }
            }
            Ok((eqs, unary))
        })
        .collect();
    let mut eqs = Vec::new();
    let mut unary: BTreeMap<(usize, bool), Weight> = BTreeMap::new();
    for b in blocks {
        let (e, u) = b?;
        eqs.extend(e);
        for x in u {
            let slot = unary.entry((x.var, x.rhs)).or_insert(0);
            *slot = slot.checked_add(x.mult).ok_or_else(|| overflow(stage))?;
        }
    }
    check_sum(eqs.iter().map(|e| e.mult).chain(unary.values().copied()), stage)?;
    Ok(LongCodeXor {
        system: XorSystem::new(layout.num_vars(), eqs)?,
        unary: unary
            .into_iter()
            .map(|((var, rhs), mult)| UnaryEquation { var, rhs, mult })
            .collect(),
        layout,
    })
}

fn check_sum(mut it: impl Iterator<Item = Weight>, stage: &str) -> Result<Weight> {
    it.try_fold(0u64, |acc, w| acc.checked_add(w)).ok_or_else(|| overflow(stage))
}

/// Reduction to 3SAT at one noise rate `ε = N/M ∈ (0, 1]`. For every pair
/// `(u, v)`, `x ∈ F2^q` and `y, z ∈ F2^p` with `z_i ≠ y_i` wherever
/// `x_{π(i)} = 0`, the clause `{v(F(x))^(S(x)), u(F(y))^(S(y)),
/// u(F(z))^(S(z))}` gets multiplicity `W(u,v) · N^D · (M-N)^{E-D} ·
/// M^{p-E}`, where `E` counts `i` with `x_{π(i)} = 1` and `D` those among
/// them with `z_i ≠ y_i`. For fixed `(u, v, x)` these sum to
/// `W(u,v) · 2^p · M^p`.
pub fn longcode_sat_single(lc: &LabelCover, eps: Ratio<u64>, budget: u64) -> Result<LongCodeSat> {
    let stage = "longcode-sat";
    let layout = check_input(lc, budget, stage)?;
    let (nn, mm) = validate_epsilon(eps, true)?;
    let (p, q) = (layout.p, layout.q);
    let pw_n = power_table(nn, p);
    let pw_c = power_table(mm - nn, p);
    let pw_m = power_table(mm, p);
    let full = (1u64 << p) - 1;

    type Block = (Vec<Clause>, Vec<BinaryClause>, Weight);
    let blocks: Vec<Result<Block>> = lc
        .edges()
        .par_iter()
        .map(|e| {
            let pi = e.pi().ok_or(Error::NotProjection)?;
            let mut clauses = Vec::new();
            let mut binary = Vec::new();
            let mut taut: Weight = 0;
            for x in 0..1u64 << q {
                let xp = compose(x, &pi);
                let ecount = xp.count_ones() as usize;
                let (vx, sx) = layout.query(Side::V, e.v, x);
                let lv = Literal::with_sign(vx, sx);
                for y in 0..1u64 << p {
                    let (uy, sy) = layout.query(Side::U, e.u, y);
                    for z in 0..1u64 << p {
                        let diff = (z ^ y) & full;
                        // H: off the support of x∘π, z and y differ
                        if !xp & full & !diff != 0 {
                            continue;
                        }
                        let d = (diff & xp).count_ones() as usize;
                        let mult = pw_n[d]
                            .zip(pw_c[ecount - d])
                            .and_then(|(a, b)| a.checked_mul(b))
                            .zip(pw_m[p - ecount])
                            .and_then(|(a, b)| a.checked_mul(b))
                            .and_then(|t| t.checked_mul(e.w))
                            .ok_or_else(|| overflow(stage))?;
                        if mult == 0 {
                            continue;
                        }
                        let (uz, sz) = layout.query(Side::U, e.u, z);
                        let ly = Literal::with_sign(uy, sy);
                        let lz = Literal::with_sign(uz, sz);
                        if uy != uz {
                            clauses.push(Clause::new([lv, ly, lz], mult));
                        } else if sy == sz {
                            binary.push(BinaryClause { lits: [lv, ly], mult });
                        } else {
                            taut = taut.checked_add(mult).ok_or_else(|| overflow(stage))?;
                        }
                    }
                }
            }
            Ok((clauses, binary, taut))
        })
        .collect();
    let mut clauses = Vec::new();
    let mut binary = Vec::new();
    let mut tautologies: Weight = 0;
    for b in blocks {
        let (c, bin, t) = b?;
        clauses.extend(c);
        binary.extend(bin);
        tautologies = tautologies.checked_add(t).ok_or_else(|| overflow(stage))?;
    }
    check_sum(
        clauses
            .iter()
            .map(|c| c.mult)
            .chain(binary.iter().map(|c| c.mult))
            .chain(std::iter::once(tautologies)),
        stage,
    )?;
    Ok(LongCodeSat {
        system: CnfSystem::new(layout.num_vars(), clauses)?,
        binary: consolidate_binary(binary)?,
        tautologies,
        layout,
    })
}

fn consolidate_binary(items: Vec<BinaryClause>) -> Result<Vec<BinaryClause>> {
    let mut map: BTreeMap<[Literal; 2], Weight> = BTreeMap::new();
    for c in items {
        let mut key = c.lits;
        key.sort_unstable();
        let slot = map.entry(key).or_insert(0);
        *slot = slot.checked_add(c.mult).ok_or_else(|| overflow("longcode-sat"))?;
    }
    Ok(map
        .into_iter()
        .map(|(lits, mult)| BinaryClause { lits, mult })
        .collect())
}

/// Noise rates of the layered 3SAT reduction: `t = ⌈1/δ⌉`, `ε_1 = δ`,
/// `ε_{i+1} = δ^71 · 2^-35 · ε_i`, exactly. Refuses when `t` exceeds
/// `max_layers`.
pub fn longcode_sat_epsilons(delta: Ratio<u64>, max_layers: usize) -> Result<Vec<BigRational>> {
    let (dn, dd) = (*delta.numer(), *delta.denom());
    if dn == 0 || dn > dd {
        return Err(Error::InvalidParameter(format!("delta {dn}/{dd} out of range")));
    }
    let t = dd.div_ceil(dn) as usize;
    if t > max_layers {
        return Err(Error::budget("longcode-sat", format!("{t} layers"), max_layers));
    }
    let d = BigRational::new(BigInt::from(dn), BigInt::from(dd));
    let factor = num_traits::pow(d.clone(), 71) / BigRational::from_integer(BigInt::one() << 35usize);
    let mut out = Vec::with_capacity(t);
    let mut eps = d;
    for _ in 0..t {
        out.push(eps.clone());
        eps = &eps * &factor;
    }
    Ok(out)
}

/// Union of the single-rate reductions over [`longcode_sat_epsilons`].
/// Each rate must fit in 64-bit numerator and denominator, and every
/// multiplicity in 64 bits; otherwise the call refuses.
pub fn longcode_sat(lc: &LabelCover, delta: Ratio<u64>, budget: u64) -> Result<LongCodeSat> {
    let epsilons = longcode_sat_epsilons(delta, 64)?;
    let mut acc: Option<LongCodeSat> = None;
    for (i, eps) in epsilons.iter().enumerate() {
        let (n, m) = (eps.numer().to_u64(), eps.denom().to_u64());
        let (Some(n), Some(m)) = (n, m) else {
            return Err(Error::budget(
                "longcode-sat",
                format!("layer {} rate with {}-bit denominator", i + 1, eps.denom().bits()),
                "64 bits",
            ));
        };
        debug_assert!(!eps.is_zero());
        // validate the M^p normalizer before generating anything
        checked_pow(m, lc.left_domain(), "longcode-sat")?;
        let layer = longcode_sat_single(lc, Ratio::new(n, m), budget)?;
        acc = Some(match acc {
            None => layer,
            Some(prev) => {
                let mut binary = prev.binary;
                binary.extend(layer.binary);
                LongCodeSat {
                    system: prev.system.union(&layer.system)?,
                    binary: consolidate_binary(binary)?,
                    tautologies: prev
                        .tautologies
                        .checked_add(layer.tautologies)
                        .ok_or_else(|| overflow("longcode-sat"))?,
                    layout: prev.layout,
                }
            }
        });
    }
    acc.ok_or_else(|| Error::Internal("no layers".into()))
}
