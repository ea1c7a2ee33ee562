//! Pebble games and refinement procedures.
//!
//! Both pebble games are solved as greatest fixpoints over an explicitly
//! enumerated position space: partial homomorphisms (existential game) or
//! partial isomorphisms (bijective game) with at most `k` pairs. Positions
//! are sets of pairs `(a, b)` sorted by `a`.

use std::collections::HashMap;
use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::structures::{encode, encode_language, ConstraintSystem, Encoding, RelStructure};

/// Default cap on the number of enumerated game positions.
pub const DEFAULT_POSITION_BUDGET: u64 = 4_000_000;

pub type Pair = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Winner {
    Spoiler,
    Duplicator,
}

/// Why a position was removed in the existential game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExistentialReason {
    /// Spoiler places a fresh pebble on this element and every answer leads
    /// to a removed position (or breaks the homomorphism).
    Unextendable(usize),
    /// Removing this pair gives an already removed position.
    RestrictionLost(Pair),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistentialKill {
    pub position: Vec<Pair>,
    pub reason: ExistentialReason,
}

/// Why a position was removed in the bijective game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BijectiveReason {
    /// The position without this pair is already removed.
    RestrictionDead(Pair),
    /// After lifting `lifted` (or no pebble, when `None`), no bijection
    /// avoids removed positions: every element of `set` only has answers in
    /// a strictly smaller set of free elements.
    HallViolation { lifted: Option<Pair>, set: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectiveKill {
    pub round: usize,
    pub position: Vec<Pair>,
    pub reason: BijectiveReason,
}

/// Replayable evidence for a Spoiler win.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The universes have different sizes.
    SizeMismatch,
    Existential(Vec<ExistentialKill>),
    Bijective(Vec<BijectiveKill>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameVerdict {
    pub winner: Winner,
    /// Number of enumerated positions.
    pub positions: usize,
    /// Positions that survive the fixpoint.
    pub surviving: usize,
    /// Present exactly when Spoiler wins.
    pub certificate: Option<Certificate>,
}

impl GameVerdict {
    pub fn duplicator_wins(&self) -> bool {
        self.winner == Winner::Duplicator
    }
}

fn check_vocab(a: &RelStructure, b: &RelStructure) -> Result<()> {
    if a.vocabulary() != b.vocabulary() {
        return Err(Error::VocabularyMismatch);
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Hom,
    Iso,
}

/// Tuples of each relation indexed by the elements they contain.
struct TupleIndex<'s> {
    by_elem: Vec<Vec<(usize, &'s [usize])>>,
}

impl<'s> TupleIndex<'s> {
    fn new(s: &'s RelStructure) -> Self {
        let mut by_elem: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); s.size()];
        for (r, rel) in s.relations().iter().enumerate() {
            for t in rel {
                let mut elems: Vec<usize> = t.clone();
                elems.sort_unstable();
                elems.dedup();
                for e in elems {
                    by_elem[e].push((r, t.as_slice()));
                }
            }
        }
        TupleIndex { by_elem }
    }
}

/// All partial homomorphisms or partial isomorphisms with at most `k`
/// pairs, plus the extension and restriction links between them.
struct PositionSpace {
    k: usize,
    nb: usize,
    positions: Vec<Vec<(u32, u32)>>,
    index: HashMap<Vec<(u32, u32)>, u32>,
    /// For positions with fewer than `k` pairs: `ext[p][a * |B| + b]` is
    /// the id of `p + (a, b)` or `NONE`.
    ext: Vec<Vec<u32>>,
    /// `parents[p][i]` is the id of `p` without its `i`-th pair.
    parents: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

fn lookup<F: Fn(usize) -> Option<usize>>(map: F, t: &[usize]) -> Option<Vec<usize>> {
    t.iter().map(|&x| map(x)).collect()
}

impl PositionSpace {
    fn build(a: &RelStructure, b: &RelStructure, k: usize, kind: Kind, budget: u64) -> Result<Self> {
        let (na, nb) = (a.size(), b.size());
        let mut estimate: u128 = 0;
        for j in 0..=k as u64 {
            let answers: u128 = match kind {
                Kind::Hom => (nb as u128).saturating_pow(j as u32),
                Kind::Iso => (0..j).fold(1u128, |acc, i| acc * (nb as u128).saturating_sub(i as u128)),
            };
            estimate = estimate.saturating_add(binomial(na as u64, j).saturating_mul(answers));
        }
        if estimate > budget as u128 {
            return Err(Error::budget("pebble-game", format!("{estimate} positions"), budget));
        }
        let ia = TupleIndex::new(a);
        let ib = TupleIndex::new(b);
        let mut positions: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
        let mut index: HashMap<Vec<(u32, u32)>, u32> = HashMap::new();
        index.insert(Vec::new(), 0);
        let mut level_start = 0;
        for _ in 0..k {
            let level_end = positions.len();
            for pid in level_start..level_end {
                let p = positions[pid].clone();
                let first_a = p.last().map_or(0, |&(x, _)| x as usize + 1);
                for ea in first_a..na {
                    for eb in 0..nb {
                        if kind == Kind::Iso && p.iter().any(|&(_, y)| y as usize == eb) {
                            continue;
                        }
                        if !Self::consistent(a, b, &ia, &ib, &p, ea, eb, kind) {
                            continue;
                        }
                        let mut c = p.clone();
                        c.push((ea as u32, eb as u32));
                        index.insert(c.clone(), positions.len() as u32);
                        positions.push(c);
                    }
                }
            }
            level_start = level_end;
        }
        let mut ext: Vec<Vec<u32>> = positions
            .iter()
            .map(|p| if p.len() < k { vec![NONE; na * nb] } else { Vec::new() })
            .collect();
        let mut parents = Vec::with_capacity(positions.len());
        for (cid, c) in positions.iter().enumerate() {
            let mut ps = Vec::with_capacity(c.len());
            for i in 0..c.len() {
                let mut q = c.clone();
                let (x, y) = q.remove(i);
                let qid = index[&q];
                ext[qid as usize][x as usize * nb + y as usize] = cid as u32;
                ps.push(qid);
            }
            parents.push(ps);
        }
        Ok(PositionSpace {
            k,
            nb,
            positions,
            index,
            ext,
            parents,
        })
    }

    /// Whether `p + (ea, eb)` is again a partial homomorphism (or partial
    /// isomorphism), checking only tuples that involve the new pair.
    #[allow(clippy::too_many_arguments)]
    fn consistent(
        a: &RelStructure,
        b: &RelStructure,
        ia: &TupleIndex,
        ib: &TupleIndex,
        p: &[(u32, u32)],
        ea: usize,
        eb: usize,
        kind: Kind,
    ) -> bool {
        let fwd = |x: usize| -> Option<usize> {
            if x == ea {
                return Some(eb);
            }
            p.iter().find(|&&(s, _)| s as usize == x).map(|&(_, t)| t as usize)
        };
        for &(r, t) in &ia.by_elem[ea] {
            if let Some(img) = lookup(fwd, t) {
                if !b.holds(r, &img) {
                    return false;
                }
            }
        }
        if kind == Kind::Iso {
            let back = |y: usize| -> Option<usize> {
                if y == eb {
                    return Some(ea);
                }
                p.iter().find(|&&(_, t)| t as usize == y).map(|&(s, _)| s as usize)
            };
            for &(r, t) in &ib.by_elem[eb] {
                if let Some(pre) = lookup(back, t) {
                    if !a.holds(r, &pre) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn pairs(&self, id: usize) -> Vec<Pair> {
        self.positions[id]
            .iter()
            .map(|&(x, y)| (x as usize, y as usize))
            .collect()
    }

    fn id_of(&self, pos: &[Pair]) -> Option<usize> {
        let mut key: Vec<(u32, u32)> = pos.iter().map(|&(x, y)| (x as u32, y as u32)).collect();
        key.sort_unstable();
        self.index.get(&key).map(|&i| i as usize)
    }
}

// ---------------------------------------------------------------------------
// Existential game
// ---------------------------------------------------------------------------

/// Existential `k`-pebble game from `a` to `b`. Duplicator wins iff the
/// largest family of partial homomorphisms with at most `k` pairs that is
/// closed under restriction and has the forth property is nonempty.
pub fn existential_game(a: &RelStructure, b: &RelStructure, k: usize, budget: u64) -> Result<GameVerdict> {
    check_vocab(a, b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let space = PositionSpace::build(a, b, k, Kind::Hom, budget)?;
    let (na, nb) = (a.size(), b.size());
    let n_pos = space.positions.len();
    let mut alive = vec![true; n_pos];
    // live extensions per (position, element), only for short positions
    let mut count: Vec<Vec<u32>> = Vec::with_capacity(n_pos);
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut kills: Vec<ExistentialKill> = Vec::new();

    for (pid, pos) in space.positions.iter().enumerate() {
        if pos.len() >= k {
            count.push(Vec::new());
            continue;
        }
        let ext = &space.ext[pid];
        let c: Vec<u32> = (0..na)
            .map(|x| (0..nb).filter(|&y| ext[x * nb + y] != NONE).count() as u32)
            .collect();
        count.push(c);
    }
    let in_dom = |pid: usize, x: usize| space.positions[pid].iter().any(|&(s, _)| s as usize == x);
    for pid in 0..n_pos {
        if space.positions[pid].len() >= k {
            continue;
        }
        if let Some(x) = (0..na).find(|&x| !in_dom(pid, x) && count[pid][x] == 0) {
            alive[pid] = false;
            kills.push(ExistentialKill {
                position: space.pairs(pid),
                reason: ExistentialReason::Unextendable(x),
            });
            queue.push_back(pid);
        }
    }

    while let Some(q) = queue.pop_front() {
        if !alive[0] {
            break;
        }
        let qpos = space.positions[q].clone();
        for (i, &(x, _)) in qpos.iter().enumerate() {
            let p = space.parents[q][i] as usize;
            if !alive[p] {
                continue;
            }
            count[p][x as usize] -= 1;
            if count[p][x as usize] == 0 {
                alive[p] = false;
                kills.push(ExistentialKill {
                    position: space.pairs(p),
                    reason: ExistentialReason::Unextendable(x as usize),
                });
                queue.push_back(p);
            }
        }
        if qpos.len() < k {
            for (slot, &c) in space.ext[q].iter().enumerate() {
                if c != NONE && alive[c as usize] {
                    alive[c as usize] = false;
                    kills.push(ExistentialKill {
                        position: space.pairs(c as usize),
                        reason: ExistentialReason::RestrictionLost((slot / nb, slot % nb)),
                    });
                    queue.push_back(c as usize);
                }
            }
        }
    }

    let surviving = alive.iter().filter(|&&x| x).count();
    Ok(if alive[0] {
        GameVerdict {
            winner: Winner::Duplicator,
            positions: n_pos,
            surviving,
            certificate: None,
        }
    } else {
        GameVerdict {
            winner: Winner::Spoiler,
            positions: n_pos,
            surviving,
            certificate: Some(Certificate::Existential(kills)),
        }
    })
}

/// Replays an existential-game certificate: every removal must be
/// justified by earlier removals, and the empty position must be removed.
pub fn verify_existential_certificate(
    a: &RelStructure,
    b: &RelStructure,
    k: usize,
    kills: &[ExistentialKill],
    budget: u64,
) -> Result<bool> {
    check_vocab(a, b)?;
    let space = PositionSpace::build(a, b, k, Kind::Hom, budget)?;
    let nb = b.size();
    let mut alive = vec![true; space.positions.len()];
    for kill in kills {
        let Some(pid) = space.id_of(&kill.position) else {
            return Ok(false);
        };
        let ok = match &kill.reason {
            ExistentialReason::Unextendable(x) => {
                space.positions[pid].len() < k
                    && *x < a.size()
                    && !kill.position.iter().any(|&(s, _)| s == *x)
                    && (0..nb).all(|y| {
                        let c = space.ext[pid][x * nb + y];
                        c == NONE || !alive[c as usize]
                    })
            }
            ExistentialReason::RestrictionLost(pair) => {
                let rest: Vec<Pair> = kill.position.iter().copied().filter(|p| p != pair).collect();
                rest.len() + 1 == kill.position.len()
                    && space.id_of(&rest).is_some_and(|r| !alive[r])
            }
        };
        if !ok {
            return Ok(false);
        }
        alive[pid] = false;
    }
    Ok(!alive[0])
}

// ---------------------------------------------------------------------------
// Bijective game
// ---------------------------------------------------------------------------

/// Kuhn's augmenting-path matching. `edges[a]` lists admissible right
/// partners of left vertex `a`. Returns a Hall-violating left set if no
/// perfect matching exists.
fn perfect_matching(edges: &[Vec<usize>], right: usize) -> std::result::Result<(), Vec<usize>> {
    let left = edges.len();
    let mut match_r: Vec<usize> = vec![usize::MAX; right];
    fn augment(a: usize, edges: &[Vec<usize>], match_r: &mut [usize], seen: &mut [bool]) -> bool {
        for &b in &edges[a] {
            if !seen[b] {
                seen[b] = true;
                if match_r[b] == usize::MAX || augment(match_r[b], edges, match_r, seen) {
                    match_r[b] = a;
                    return true;
                }
            }
        }
        false
    }
    for a in 0..left {
        let mut seen = vec![false; right];
        if !augment(a, edges, &mut match_r, &mut seen) {
            // alternating reachability from `a`: reached lefts form the violator
            let mut set = vec![a];
            let mut reached_r = vec![false; right];
            let mut stack = vec![a];
            while let Some(x) = stack.pop() {
                for &b in &edges[x] {
                    if !reached_r[b] {
                        reached_r[b] = true;
                        let m = match_r[b];
                        debug_assert!(m != usize::MAX);
                        if m != usize::MAX && !set.contains(&m) {
                            set.push(m);
                            stack.push(m);
                        }
                    }
                }
            }
            set.sort_unstable();
            return Err(set);
        }
    }
    Ok(())
}

/// Checks whether Duplicator can answer from `q` (a live or candidate
/// position with fewer than `k` pairs): a bijection between the free
/// elements all of whose pairs extend `q` to live positions.
fn bijection_exists(
    space: &PositionSpace,
    alive: &[bool],
    q: usize,
    na: usize,
) -> std::result::Result<(), Vec<usize>> {
    let nb = space.nb;
    let pos = &space.positions[q];
    let free_a: Vec<usize> = (0..na).filter(|&x| !pos.iter().any(|&(s, _)| s as usize == x)).collect();
    let free_b: Vec<usize> = (0..nb).filter(|&y| !pos.iter().any(|&(_, t)| t as usize == y)).collect();
    let edges: Vec<Vec<usize>> = free_a
        .iter()
        .map(|&x| {
            free_b
                .iter()
                .enumerate()
                .filter(|&(_, &y)| {
                    let c = space.ext[q][x * nb + y];
                    c != NONE && alive[c as usize]
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    perfect_matching(&edges, free_b.len()).map_err(|s| s.into_iter().map(|i| free_a[i]).collect())
}

fn bijective_reason(space: &PositionSpace, alive: &[bool], pid: usize, na: usize) -> Option<BijectiveReason> {
    let pos = &space.positions[pid];
    for (i, &(x, y)) in pos.iter().enumerate() {
        if !alive[space.parents[pid][i] as usize] {
            return Some(BijectiveReason::RestrictionDead((x as usize, y as usize)));
        }
    }
    if pos.len() < space.k {
        if let Err(set) = bijection_exists(space, alive, pid, na) {
            return Some(BijectiveReason::HallViolation { lifted: None, set });
        }
    }
    for (i, &(x, y)) in pos.iter().enumerate() {
        let q = space.parents[pid][i] as usize;
        if let Err(set) = bijection_exists(space, alive, q, na) {
            return Some(BijectiveReason::HallViolation {
                lifted: Some((x as usize, y as usize)),
                set,
            });
        }
    }
    None
}

/// Bijective `k`-pebble game. Duplicator wins iff `a ≡_{C^k} b`.
///
/// A position survives iff its restrictions survive and, for the option of
/// placing a fresh pebble (when fewer than `k` are down) and for every
/// pebble Spoiler may lift, there is a bijection of the remaining elements
/// whose every pair extends to a surviving position. Rounds are evaluated
/// in parallel against the previous round's survivors.
pub fn bijective_game(a: &RelStructure, b: &RelStructure, k: usize, budget: u64) -> Result<GameVerdict> {
    check_vocab(a, b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if a.size() != b.size() {
        return Ok(GameVerdict {
            winner: Winner::Spoiler,
            positions: 0,
            surviving: 0,
            certificate: Some(Certificate::SizeMismatch),
        });
    }
    let space = PositionSpace::build(a, b, k, Kind::Iso, budget)?;
    let na = a.size();
    let mut alive = vec![true; space.positions.len()];
    let mut kills = Vec::new();
    let mut round = 0;
    loop {
        let killed: Vec<(usize, BijectiveReason)> = (0..space.positions.len())
            .into_par_iter()
            .filter(|&pid| alive[pid])
            .filter_map(|pid| bijective_reason(&space, &alive, pid, na).map(|r| (pid, r)))
            .collect();
        if killed.is_empty() {
            break;
        }
        for (pid, reason) in killed {
            alive[pid] = false;
            kills.push(BijectiveKill {
                round,
                position: space.pairs(pid),
                reason,
            });
        }
        round += 1;
        if !alive[0] {
            break;
        }
    }
    let surviving = alive.iter().filter(|&&x| x).count();
    Ok(GameVerdict {
        winner: if alive[0] { Winner::Duplicator } else { Winner::Spoiler },
        positions: space.positions.len(),
        surviving,
        certificate: (!alive[0]).then_some(Certificate::Bijective(kills)),
    })
}

/// Replays a bijective-game certificate round by round.
pub fn verify_bijective_certificate(
    a: &RelStructure,
    b: &RelStructure,
    k: usize,
    cert: &Certificate,
    budget: u64,
) -> Result<bool> {
    check_vocab(a, b)?;
    let kills = match cert {
        Certificate::SizeMismatch => return Ok(a.size() != b.size()),
        Certificate::Bijective(kills) => kills,
        Certificate::Existential(_) => return Ok(false),
    };
    let space = PositionSpace::build(a, b, k, Kind::Iso, budget)?;
    let na = a.size();
    let nb = space.nb;
    let mut alive = vec![true; space.positions.len()];
    let mut i = 0;
    while i < kills.len() {
        let round = kills[i].round;
        let mut j = i;
        let mut pending = Vec::new();
        while j < kills.len() && kills[j].round == round {
            let kill = &kills[j];
            let Some(pid) = space.id_of(&kill.position) else {
                return Ok(false);
            };
            let ok = match &kill.reason {
                BijectiveReason::RestrictionDead(pair) => {
                    let rest: Vec<Pair> = kill.position.iter().copied().filter(|p| p != pair).collect();
                    rest.len() + 1 == kill.position.len()
                        && space.id_of(&rest).is_some_and(|r| !alive[r])
                }
                BijectiveReason::HallViolation { lifted, set } => {
                    let q = match lifted {
                        None => (kill.position.len() < k).then_some(pid),
                        Some(pair) => {
                            let rest: Vec<Pair> =
                                kill.position.iter().copied().filter(|p| p != pair).collect();
                            space.id_of(&rest)
                        }
                    };
                    match q {
                        None => false,
                        Some(q) => {
                            let qpos = &space.positions[q];
                            let free = |x: usize| !qpos.iter().any(|&(s, _)| s as usize == x);
                            let mut nbhd = vec![false; nb];
                            for &x in set {
                                if x >= na || !free(x) {
                                    return Ok(false);
                                }
                                for (y, slot) in nbhd.iter_mut().enumerate() {
                                    let c = space.ext[q][x * nb + y];
                                    if c != NONE && alive[c as usize] {
                                        *slot = true;
                                    }
                                }
                            }
                            nbhd.iter().filter(|&&s| s).count() < set.len()
                        }
                    }
                }
            };
            if !ok {
                return Ok(false);
            }
            pending.push(pid);
            j += 1;
        }
        for pid in pending {
            alive[pid] = false;
        }
        i = j;
    }
    Ok(!alive[0])
}

// ---------------------------------------------------------------------------
// Colour refinement and k-WL
// ---------------------------------------------------------------------------

/// Coarsest equitable partition of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementResult {
    /// Class index of each vertex.
    pub colors: Vec<usize>,
    /// Vertices of each class, ascending.
    pub classes: Vec<Vec<usize>>,
    /// `delta[i][j]`: neighbours in class `j` of any vertex of class `i`.
    pub delta: Vec<Vec<usize>>,
    pub rounds: usize,
}

impl RefinementResult {
    /// `δ_ij |C_i| = δ_ji |C_j|` for all `i, j`.
    pub fn is_balanced(&self) -> bool {
        let m = self.classes.len();
        (0..m).all(|i| {
            (0..m).all(|j| self.delta[i][j] * self.classes[i].len() == self.delta[j][i] * self.classes[j].len())
        })
    }

    /// Every vertex of every class has the stated neighbour counts.
    pub fn is_stable(&self, g: &Graph) -> bool {
        let m = self.classes.len();
        (0..g.num_vertices()).all(|v| {
            let mut counts = vec![0usize; m];
            for &u in g.neighbors(v) {
                counts[self.colors[u as usize]] += 1;
            }
            counts == self.delta[self.colors[v]]
        })
    }
}

/// One refinement step; new colours are ranks of sorted signatures, so
/// colours depend only on the isomorphism type of the input.
fn refine_step(g: &Graph, colors: &[usize]) -> Vec<usize> {
    let sigs: Vec<(usize, Vec<usize>)> = (0..g.num_vertices())
        .map(|v| {
            let mut nc: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u as usize]).collect();
            nc.sort_unstable();
            (colors[v], nc)
        })
        .collect();
    let mut palette: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
    palette.sort();
    palette.dedup();
    sigs.iter()
        .map(|s| palette.binary_search(&s).expect("present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Colour refinement starting from the given colouring.
pub fn color_refinement_from(g: &Graph, initial: &[usize]) -> RefinementResult {
    assert_eq!(initial.len(), g.num_vertices());
    let mut colors = {
        let mut palette = initial.to_vec();
        palette.sort_unstable();
        palette.dedup();
        initial
            .iter()
            .map(|c| palette.binary_search(c).expect("present"))
            .collect::<Vec<_>>()
    };
    let mut rounds = 0;
    loop {
        let next = refine_step(g, &colors);
        rounds += 1;
        let stable = distinct(&next) == distinct(&colors);
        colors = next;
        if stable {
            break;
        }
    }
    let m = distinct(&colors);
    let mut classes = vec![Vec::new(); m];
    for (v, &c) in colors.iter().enumerate() {
        classes[c].push(v);
    }
    let delta = classes
        .iter()
        .map(|cls| {
            let mut row = vec![0; m];
            if let Some(&v) = cls.first() {
                for &u in g.neighbors(v) {
                    row[colors[u as usize]] += 1;
                }
            }
            row
        })
        .collect();
    RefinementResult {
        colors,
        classes,
        delta,
        rounds,
    }
}

pub fn color_refinement(g: &Graph) -> RefinementResult {
    color_refinement_from(g, &vec![0; g.num_vertices()])
}

/// `G ≡_{C^2} H`: refine the disjoint union and compare, class by class,
/// how many vertices come from each side.
pub fn c2_equivalent(g: &Graph, h: &Graph) -> bool {
    if g.num_vertices() != h.num_vertices() {
        return false;
    }
    let n = g.num_vertices();
    let r = color_refinement(&g.disjoint_union(h));
    let m = r.classes.len();
    let mut counts = vec![(0usize, 0usize); m];
    for (v, &c) in r.colors.iter().enumerate() {
        if v < n {
            counts[c].0 += 1;
        } else {
            counts[c].1 += 1;
        }
    }
    counts.iter().all(|&(x, y)| x == y)
}

/// Atomic types of tuples over one structure, interned into a shared table.
struct TypeTable {
    ids: HashMap<Vec<u64>, usize>,
}

impl TypeTable {
    fn atomic_type(&mut self, s: &RelStructure, t: &[usize]) -> usize {
        let len = t.len();
        let mut bits: Vec<bool> = Vec::new();
        for i in 0..len {
            for j in i + 1..len {
                bits.push(t[i] == t[j]);
            }
        }
        for (r, (_, arity)) in s.vocabulary().symbols().iter().enumerate() {
            let total = len.pow(*arity as u32);
            let mut idx = vec![0usize; *arity];
            for code in 0..total {
                let mut c = code;
                for slot in idx.iter_mut().rev() {
                    *slot = t[c % len];
                    c /= len;
                }
                bits.push(s.holds(r, &idx));
            }
        }
        let mut key = vec![0u64; bits.len().div_ceil(64) + 1];
        key[0] = bits.len() as u64;
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                key[1 + i / 64] |= 1 << (i % 64);
            }
        }
        let next = self.ids.len();
        *self.ids.entry(key).or_insert(next)
    }
}

/// Per-structure state of k-WL.
struct WlSide {
    size: usize,
    /// `atp[t * size + w]`: atomic type of `t · w`.
    atp: Vec<usize>,
    colors: Vec<usize>,
}

fn decode(mut x: usize, base: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
    out
}

/// k-dimensional Weisfeiler–Leman equivalence (k ≥ 1). Both structures are
/// refined side by side with one shared palette; colours of `k`-tuples are
/// updated by the multiset over `w` of the atomic type of `t·w` together
/// with the colours of the `k` tuples obtained by replacing one entry of
/// `t` with `w`. For `k = 1` this is colour refinement.
pub fn wl_equivalent(a: &RelStructure, b: &RelStructure, k: usize, budget: u64) -> Result<bool> {
    check_vocab(a, b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if a.size() != b.size() {
        return Ok(false);
    }
    let n = a.size();
    let tuples = (n as u64)
        .checked_pow(k as u32 + 1)
        .filter(|&x| x <= budget)
        .ok_or_else(|| Error::budget("wl", format!("{n}^{}", k + 1), budget))? as usize
        / n.max(1);
    if n == 0 {
        return Ok(true);
    }
    let mut table = TypeTable { ids: HashMap::new() };
    let mut init_table = TypeTable { ids: HashMap::new() };
    let mut make_side = |s: &RelStructure| -> WlSide {
        let mut atp = Vec::with_capacity(tuples * n);
        let mut colors = Vec::with_capacity(tuples);
        for t in 0..tuples {
            let mut tup = decode(t, n, k);
            colors.push(init_table.atomic_type(s, &tup));
            tup.push(0);
            for w in 0..n {
                tup[k] = w;
                atp.push(table.atomic_type(s, &tup));
            }
        }
        WlSide { size: n, atp, colors }
    };
    let mut sa = make_side(a);
    let mut sb = make_side(b);
    let histogram = |c: &[usize]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    let pow: Vec<usize> = (0..k).map(|i| n.pow((k - 1 - i) as u32)).collect();
    let signature = |side: &WlSide, t: usize| -> (usize, Vec<Vec<usize>>) {
        let tup = decode(t, side.size, k);
        let mut ms: Vec<Vec<usize>> = (0..side.size)
            .map(|w| {
                let mut entry = Vec::with_capacity(k + 1);
                entry.push(side.atp[t * side.size + w]);
                for i in 0..k {
                    let swapped = t - tup[i] * pow[i] + w * pow[i];
                    entry.push(side.colors[swapped]);
                }
                entry
            })
            .collect();
        ms.sort_unstable();
        (side.colors[t], ms)
    };
    loop {
        if histogram(&sa.colors) != histogram(&sb.colors) {
            return Ok(false);
        }
        let before = distinct(&[sa.colors.clone(), sb.colors.clone()].concat());
        let siga: Vec<_> = (0..tuples).into_par_iter().map(|t| signature(&sa, t)).collect();
        let sigb: Vec<_> = (0..tuples).into_par_iter().map(|t| signature(&sb, t)).collect();
        let mut palette: Vec<&(usize, Vec<Vec<usize>>)> = siga.iter().chain(sigb.iter()).collect();
        palette.sort();
        palette.dedup();
        sa.colors = siga.iter().map(|s| palette.binary_search(&s).expect("present")).collect();
        sb.colors = sigb.iter().map(|s| palette.binary_search(&s).expect("present")).collect();
        let after = distinct(&[sa.colors.clone(), sb.colors.clone()].concat());
        if after == before {
            return Ok(histogram(&sa.colors) == histogram(&sb.colors));
        }
    }
}

/// `sys ⊑_k Γ`: Duplicator wins the existential `k`-pebble game from the
/// encoded system to the encoded constraint language.
pub fn k_locally_satisfiable<S: ConstraintSystem + ?Sized>(
    sys: &S,
    k: usize,
    encoding: Encoding,
    budget: u64,
) -> Result<bool> {
    let a = encode(sys, encoding);
    let b = encode_language(sys.language(), encoding);
    Ok(existential_game(&a, &b, k, budget)?.duplicator_wins())
}
