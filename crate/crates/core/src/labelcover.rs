//! Label cover instances, their value, the reduction from 3XOR, and
//! parallel repetition.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structures::{Weight, XorSystem};
use crate::Fraction;

/// Largest right domain representable by the per-label bitmasks.
pub const MAX_RIGHT_DOMAIN: usize = 64;

/// Default cap on any materialized dimension of a repeated instance.
pub const DEFAULT_REPETITION_BUDGET: u64 = 1 << 24;

/// One pair `(u, v)` with positive weight and its predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LcEdge {
    pub u: usize,
    pub v: usize,
    pub w: Weight,
    /// `accept[a]` has bit `b` set iff `P(u, v, a, b)`.
    pub accept: Vec<u64>,
}

impl LcEdge {
    pub fn projection(u: usize, v: usize, w: Weight, pi: &[usize]) -> Self {
        LcEdge {
            u,
            v,
            w,
            accept: pi.iter().map(|&b| 1u64 << b).collect(),
        }
    }

    pub fn accepts(&self, a: usize, b: usize) -> bool {
        self.accept[a] >> b & 1 == 1
    }

    pub fn is_projection(&self) -> bool {
        self.accept.iter().all(|m| m.count_ones() == 1)
    }

    /// `π_{u,v}` when the predicate is a projection.
    pub fn pi(&self) -> Option<Vec<usize>> {
        self.is_projection()
            .then(|| self.accept.iter().map(|m| m.trailing_zeros() as usize).collect())
    }
}

/// Structural properties, always recomputed from the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flags {
    pub projection: bool,
    pub unique: bool,
    pub left_regular: bool,
    pub right_regular: bool,
    pub uniform_weights: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelCover {
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    edges: Vec<LcEdge>,
    flags: Flags,
}

fn all_equal<T: PartialEq>(mut it: impl Iterator<Item = T>) -> bool {
    match it.next() {
        None => true,
        Some(first) => it.all(|x| x == first),
    }
}

impl LabelCover {
    /// Validates the edges, sorts them by `(u, v)`, and computes the flags.
    /// Zero-weight pairs are dropped.
    pub fn new(m: usize, n: usize, p: usize, q: usize, edges: Vec<LcEdge>) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter("label domains must be nonempty".into()));
        }
        if q > MAX_RIGHT_DOMAIN {
            return Err(Error::InvalidParameter(format!(
                "right domain {q} exceeds {MAX_RIGHT_DOMAIN}"
            )));
        }
        let mut by_pair: BTreeMap<(usize, usize), LcEdge> = BTreeMap::new();
        for e in edges.into_iter().filter(|e| e.w > 0) {
            if e.u >= m || e.v >= n {
                return Err(Error::InvalidInstance(format!(
                    "pair ({}, {}) out of range",
                    e.u, e.v
                )));
            }
            if e.accept.len() != p {
                return Err(Error::LengthMismatch {
                    expected: p,
                    got: e.accept.len(),
                });
            }
            let bmask = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
            if e.accept.iter().any(|&a| a & !bmask != 0) {
                return Err(Error::InvalidInstance("accepted label out of range".into()));
            }
            if by_pair.insert((e.u, e.v), e).is_some() {
                return Err(Error::InvalidInstance("pair listed twice".into()));
            }
        }
        let edges: Vec<LcEdge> = by_pair.into_values().collect();
        let flags = Self::compute_flags(m, n, p, q, &edges);
        Ok(LabelCover {
            m,
            n,
            p,
            q,
            edges,
            flags,
        })
    }

    fn compute_flags(m: usize, n: usize, p: usize, q: usize, edges: &[LcEdge]) -> Flags {
        let projection = edges.iter().all(|e| e.is_projection());
        let unique = projection
            && p == q
            && edges.iter().all(|e| {
                let mut seen = 0u64;
                e.accept.iter().for_each(|&m| seen |= m);
                seen.count_ones() as usize == q
            });
        let mut left = vec![0usize; m];
        let mut right = vec![0usize; n];
        for e in edges {
            left[e.u] += 1;
            right[e.v] += 1;
        }
        Flags {
            projection,
            unique,
            left_regular: all_equal(left.into_iter()),
            right_regular: all_equal(right.into_iter()),
            uniform_weights: all_equal(edges.iter().map(|e| e.w)),
        }
    }

    pub fn num_left(&self) -> usize {
        self.m
    }

    pub fn num_right(&self) -> usize {
        self.n
    }

    pub fn left_domain(&self) -> usize {
        self.p
    }

    pub fn right_domain(&self) -> usize {
        self.q
    }

    /// Pairs with positive weight, sorted by `(u, v)`.
    pub fn edges(&self) -> &[LcEdge] {
        &self.edges
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn weight(&self, u: usize, v: usize) -> Weight {
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .map_or(0, |i| self.edges[i].w)
    }

    /// `W_0 = Σ W(u, v)`.
    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).sum()
    }

    fn check_labelling(&self, f: &[usize], g: &[usize]) -> Result<()> {
        if f.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: f.len() });
        }
        if g.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: g.len() });
        }
        if f.iter().any(|&a| a >= self.p) || g.iter().any(|&b| b >= self.q) {
            return Err(Error::InvalidParameter("label out of range".into()));
        }
        Ok(())
    }

    /// `Σ W(u,v) P(u, v, f(u), g(v))`.
    pub fn satisfied_weight(&self, f: &[usize], g: &[usize]) -> Result<Weight> {
        self.check_labelling(f, g)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| e.accepts(f[e.u], g[e.v]))
            .map(|e| e.w)
            .sum())
    }

    /// The satisfied weight divided by `W_0`.
    pub fn value(&self, f: &[usize], g: &[usize]) -> Result<Fraction> {
        let total = self.total_weight();
        if total == 0 {
            return Err(Error::InvalidInstance("total weight is zero".into()));
        }
        let sat = self.satisfied_weight(f, g)?;
        Ok(Fraction::new(sat as u128, total as u128))
    }
}

/// The left labels `(a1, a2, a3)` with `a1 + a2 + a3 = 0`, in lexicographic
/// order: 000, 011, 101, 110.
pub const EVEN_TRIPLES: [[bool; 3]; 4] = [
    [false, false, false],
    [false, true, true],
    [true, false, true],
    [true, true, false],
];

/// Reduction from 3XOR: one left vertex per (consolidated) equation, one
/// right vertex per variable, `W(u, v)` the multiplicity of `u` when `v`
/// occurs in it. For `u = (x_{v1} + x_{v2} + x_{v3} = b)` the left label
/// `a` stands for the local assignment `x_{vi} = a_i + b`, and
/// `π_{u, vi}(a) = a_i + b`.
pub fn bipartite_reduction(sys: &XorSystem) -> LabelCover {
    let mut edges = Vec::new();
    for (u, eq) in sys.equations().iter().enumerate() {
        for (i, &v) in eq.vars.iter().enumerate() {
            let pi: Vec<usize> = EVEN_TRIPLES
                .iter()
                .map(|a| (a[i] ^ eq.rhs) as usize)
                .collect();
            edges.push(LcEdge::projection(u, v, eq.mult, &pi));
        }
    }
    LabelCover::new(sys.len(), sys.num_vars(), 4, 2, edges).expect("reduction output is valid")
}

/// Left label of equation `u` induced by an assignment: the unique even
/// triple `a` with `a_i + b = f(v_i)`.
pub fn induced_left_label(sys: &XorSystem, u: usize, values: &[bool]) -> usize {
    let eq = &sys.equations()[u];
    let mut t = [
        values[eq.vars[0]] ^ eq.rhs,
        values[eq.vars[1]] ^ eq.rhs,
        values[eq.vars[2]] ^ eq.rhs,
    ];
    if t[0] ^ t[1] ^ t[2] {
        // violated equation: flip the last coordinate to get an even triple
        t[2] = !t[2];
    }
    EVEN_TRIPLES.iter().position(|e| *e == t).expect("even triple")
}

fn checked_pow(base: usize, t: u32, budget: u64, what: &str) -> Result<usize> {
    (base as u64)
        .checked_pow(t)
        .filter(|&x| x <= budget)
        .map(|x| x as usize)
        .ok_or_else(|| Error::budget("parallel-repetition", format!("{what} = {base}^{t}"), budget))
}

/// Mixed-radix encoding with the first coordinate most significant.
fn encode_tuple(coords: &[usize], base: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * base + c)
}

fn decode_tuple(mut x: usize, base: usize, t: usize) -> Vec<usize> {
    let mut out = vec![0; t];
    for slot in out.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
    out
}

/// `t`-fold parallel repetition. Left and right vertices and labels are
/// `t`-tuples, encoded in mixed radix with the first coordinate most
/// significant. Only products of positive-weight pairs are materialized.
pub fn parallel_repetition(lc: &LabelCover, t: usize, budget: u64) -> Result<LabelCover> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let tt = t as u32;
    let m = checked_pow(lc.m, tt, budget, "left size")?;
    let n = checked_pow(lc.n, tt, budget, "right size")?;
    let p = checked_pow(lc.p, tt, budget, "left domain")?;
    let q = checked_pow(lc.q, tt, budget, "right domain")?;
    let e = checked_pow(lc.edges.len(), tt, budget, "pair count")?;
    if q > MAX_RIGHT_DOMAIN {
        return Err(Error::budget(
            "parallel-repetition",
            format!("right domain {q}"),
            MAX_RIGHT_DOMAIN,
        ));
    }
    if (e as u64).saturating_mul(p as u64) > budget {
        return Err(Error::budget(
            "parallel-repetition",
            format!("{e} pairs x {p} labels"),
            budget,
        ));
    }
    let mut edges = Vec::with_capacity(e);
    for idx in 0..e {
        let parts: Vec<&LcEdge> = decode_tuple(idx, lc.edges.len(), t)
            .into_iter()
            .map(|i| &lc.edges[i])
            .collect();
        let u = encode_tuple(&parts.iter().map(|x| x.u).collect::<Vec<_>>(), lc.m);
        let v = encode_tuple(&parts.iter().map(|x| x.v).collect::<Vec<_>>(), lc.n);
        let w = parts
            .iter()
            .try_fold(1u64, |acc, x| acc.checked_mul(x.w))
            .ok_or_else(|| Error::budget("parallel-repetition", "weight product", "u64"))?;
        let accept = (0..p)
            .map(|a| {
                let coords = decode_tuple(a, lc.p, t);
                // product of the per-coordinate label sets
                let mut acc: Vec<usize> = vec![0];
                for (x, &ai) in parts.iter().zip(&coords) {
                    let mut next = Vec::new();
                    for &prefix in &acc {
                        let mut bits = x.accept[ai];
                        while bits != 0 {
                            let b = bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            next.push(prefix * lc.q + b);
                        }
                    }
                    acc = next;
                }
                acc.into_iter().fold(0u64, |mask, b| mask | 1 << b)
            })
            .collect();
        edges.push(LcEdge { u, v, w, accept });
    }
    LabelCover::new(m, n, p, q, edges)
}

/// Coordinatewise product of single-shot labellings.
pub fn product_labelling(lc: &LabelCover, t: usize, f: &[usize], g: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let lift = |size: usize, domain: usize, h: &[usize]| -> Vec<usize> {
        let count = size.pow(t as u32);
        (0..count)
            .map(|x| {
                let coords: Vec<usize> = decode_tuple(x, size, t).iter().map(|&c| h[c]).collect();
                encode_tuple(&coords, domain)
            })
            .collect()
    };
    (lift(lc.m, lc.p, f), lift(lc.n, lc.q, g))
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntryJson {
    u: usize,
    v: usize,
    w: Weight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accept: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct LabelCoverJson {
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    entries: Vec<EntryJson>,
    flags: Flags,
}

impl LabelCover {
    /// Serializes projections as `pi` (one label per left label) and other
    /// predicates as `accept` (accepted right labels per left label).
    pub fn to_json(&self) -> String {
        let entries = self
            .edges
            .iter()
            .map(|e| match e.pi() {
                Some(pi) => EntryJson { u: e.u, v: e.v, w: e.w, pi: Some(pi), accept: None },
                None => EntryJson {
                    u: e.u,
                    v: e.v,
                    w: e.w,
                    pi: None,
                    accept: Some(
                        e.accept
                            .iter()
                            .map(|&m| (0..self.q).filter(|&b| m >> b & 1 == 1).collect())
                            .collect(),
                    ),
                },
            })
            .collect();
        let doc = LabelCoverJson {
            m: self.m,
            n: self.n,
            p: self.p,
            q: self.q,
            entries,
            flags: self.flags,
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// Parses the JSON form. The stored flags must match the recomputed ones.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LabelCoverJson =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let mut edges = Vec::with_capacity(doc.entries.len());
        for e in doc.entries {
            let accept = match (e.pi, e.accept) {
                (Some(pi), None) => {
                    if pi.iter().any(|&b| b >= doc.q.min(MAX_RIGHT_DOMAIN)) {
                        return Err(Error::parse(0, "projection label out of range"));
                    }
                    pi.iter().map(|&b| 1u64 << b).collect()
                }
                (None, Some(sets)) => {
                    let mut out = Vec::with_capacity(sets.len());
                    for s in sets {
                        if s.iter().any(|&b| b >= doc.q.min(MAX_RIGHT_DOMAIN)) {
                            return Err(Error::parse(0, "accepted label out of range"));
                        }
                        out.push(s.iter().fold(0u64, |m, &b| m | 1 << b));
                    }
                    out
                }
                _ => return Err(Error::parse(0, "entry needs exactly one of pi, accept")),
            };
            edges.push(LcEdge { u: e.u, v: e.v, w: e.w, accept });
        }
        let lc = LabelCover::new(doc.m, doc.n, doc.p, doc.q, edges)?;
        if lc.flags != doc.flags {
            return Err(Error::parse(
                0,
                format!("stored flags {:?} differ from computed {:?}", doc.flags, lc.flags),
            ));
        }
        Ok(lc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::XorEquation;

    fn one_eq(b: bool) -> XorSystem {
        XorSystem::new(3, [XorEquation::new([0, 1, 2], b, 1)]).unwrap()
    }

    #[test]
    fn single_equation_reduction() {
        let lc = bipartite_reduction(&one_eq(true));
        assert_eq!((lc.num_left(), lc.num_right()), (1, 3));
        assert_eq!(lc.edges().len(), 3);
        assert!(lc.edges().iter().all(|e| e.w == 1));
        let f = lc.flags();
        assert!(f.projection && f.left_regular && f.uniform_weights && f.right_regular);
        assert!(!f.unique);
        // π_{u,v0}(011) = 0 + 1
        assert_eq!(lc.edges()[0].pi().unwrap(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn induced_labels_satisfy_all_three() {
        let sys = one_eq(true);
        let lc = bipartite_reduction(&sys);
        let values = [true, false, false];
        let f = vec![induced_left_label(&sys, 0, &values)];
        let g: Vec<usize> = values.iter().map(|&b| b as usize).collect();
        assert_eq!(lc.value(&f, &g).unwrap(), Fraction::from_integer(1));
    }

    #[test]
    fn value_errors_and_extremes() {
        let lc = LabelCover::new(1, 1, 2, 2, vec![LcEdge::projection(0, 0, 1, &[0, 1])]).unwrap();
        assert_eq!(lc.value(&[0], &[1]).unwrap(), Fraction::from_integer(0));
        let empty = LabelCover::new(1, 1, 2, 2, vec![]).unwrap();
        assert!(empty.value(&[0], &[0]).is_err());
        let all = LabelCover::new(1, 1, 2, 2, vec![LcEdge { u: 0, v: 0, w: 2, accept: vec![3, 3] }])
            .unwrap();
        assert_eq!(all.value(&[1], &[0]).unwrap(), Fraction::from_integer(1));
        assert!(!all.flags().projection);
    }

    #[test]
    fn repetition_t1_is_identity() {
        let lc = bipartite_reduction(&one_eq(false));
        assert_eq!(parallel_repetition(&lc, 1, 1 << 20).unwrap(), lc);
    }

    #[test]
    fn json_round_trip_and_flag_check() {
        let lc = bipartite_reduction(&one_eq(true));
        let text = lc.to_json();
        assert_eq!(LabelCover::from_json(&text).unwrap(), lc);
        let tampered = text.replace("\"unique\": false", "\"unique\": true");
        assert!(LabelCover::from_json(&tampered).is_err());
    }
}
