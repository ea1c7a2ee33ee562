//! Text formats: the `p xor` constraint format, DIMACS CNF, DIMACS-style
//! edge lists with optional weights, a generic relational-structure format,
//! and sidecars for long-code layouts and FGLSS vertex labels.
//!
//! XOR and structure files use 0-based indices; the DIMACS formats are
//! 1-based as usual.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedGraph};
use crate::graphreductions::FglssVertex;
use crate::longcode::{BinaryClause, FoldedLayout, Side, UnaryEquation};
use crate::structures::{Clause, CnfSystem, Literal, RelStructure, Vocabulary, Weight, XorEquation, XorSystem};

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('c') && (l.len() == 1 || l.as_bytes()[1].is_ascii_whitespace()) || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a number, got `{tok}`")))
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    kind: &str,
) -> Result<(usize, usize)> {
    match lines.next() {
        Some((ln, toks)) if toks.len() == 4 && toks[0] == "p" && toks[1] == kind => {
            Ok((num(ln, toks[2])?, num(ln, toks[3])?))
        }
        Some((ln, _)) => Err(Error::parse(ln, format!("expected `p {kind} <n> <m>`"))),
        None => Err(Error::parse(0, "empty input")),
    }
}

fn check_count(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::parse(0, format!("header announces {expected} {what}, found {got}")));
    }
    Ok(())
}

fn lift(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

pub fn parse_xor(text: &str) -> Result<XorSystem> {
    let mut lines = content_lines(text);
    let (n, m) = header(&mut lines, "xor")?;
    let mut eqs = Vec::new();
    for (ln, toks) in lines {
        if toks.len() != 5 {
            return Err(Error::parse(ln, "expected `i j k b mult`"));
        }
        let vars = [num(ln, toks[0])?, num(ln, toks[1])?, num(ln, toks[2])?];
        let rhs = match toks[3] {
            "0" => false,
            "1" => true,
            t => return Err(Error::parse(ln, format!("right-hand side must be 0 or 1, got `{t}`"))),
        };
        let mult: Weight = num(ln, toks[4])?;
        if vars[0] == vars[1] || vars[0] == vars[2] || vars[1] == vars[2] {
            return Err(Error::parse(ln, "repeated variable"));
        }
        if vars.iter().any(|&v| v >= n) {
            return Err(Error::parse(ln, "variable out of range"));
        }
        if mult == 0 {
            return Err(Error::parse(ln, "multiplicity must be positive"));
        }
        eqs.push(XorEquation::new(vars, rhs, mult));
    }
    check_count(m, eqs.len(), "constraints")?;
    XorSystem::new(n, eqs).map_err(lift(0))
}

pub fn write_xor(sys: &XorSystem) -> String {
    let mut s = format!("p xor {} {}\n", sys.num_vars(), sys.len());
    for e in sys.equations() {
        let _ = writeln!(s, "{} {} {} {} {}", e.vars[0], e.vars[1], e.vars[2], e.rhs as u8, e.mult);
    }
    s
}

pub fn parse_dimacs(text: &str) -> Result<CnfSystem> {
    let mut lines = content_lines(text);
    let (n, m) = header(&mut lines, "cnf")?;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last = 0;
    for (ln, toks) in lines {
        last = ln;
        for tok in toks {
            let x: i64 = num(ln, tok)?;
            if x == 0 {
                if pending.len() != 3 {
                    return Err(Error::parse(ln, format!("clause of arity {}", pending.len())));
                }
                let lits = [pending[0], pending[1], pending[2]];
                if lits[0].var == lits[1].var || lits[0].var == lits[2].var || lits[1].var == lits[2].var {
                    return Err(Error::parse(ln, "repeated variable"));
                }
                clauses.push(Clause::new(lits, 1));
                pending.clear();
                continue;
            }
            let var = x.unsigned_abs() as usize;
            if var > n {
                return Err(Error::parse(ln, "variable out of range"));
            }
            pending.push(Literal::new(var - 1, x > 0));
        }
    }
    if !pending.is_empty() {
        return Err(Error::parse(last, "clause not terminated by 0"));
    }
    check_count(m, clauses.len(), "clauses")?;
    CnfSystem::new(n, clauses).map_err(lift(0))
}

/// DIMACS output; a clause of multiplicity `w` is written `w` times.
pub fn write_dimacs(sys: &CnfSystem) -> String {
    let mut s = format!("p cnf {} {}\n", sys.num_vars(), sys.total_weight());
    for c in sys.clauses() {
        let line = c
            .lits
            .iter()
            .map(|l| {
                let v = l.var as i64 + 1;
                if l.positive { v } else { -v }.to_string()
            })
            .collect::<Vec<_>>()
            .join(" ");
        for _ in 0..c.mult {
            let _ = writeln!(s, "{line} 0");
        }
    }
    s
}

/// Parses `p edge n m`, `e u v` and optional `w v weight` lines. Vertices
/// without a `w` line have weight 1.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (n, m) = header(&mut lines, "edge")?;
    let mut edges = Vec::new();
    let mut weights = vec![1; n];
    let vertex = |ln: usize, tok: &str| -> Result<usize> {
        let v: usize = num(ln, tok)?;
        if v == 0 || v > n {
            return Err(Error::parse(ln, format!("vertex {v} out of range 1..={n}")));
        }
        Ok(v - 1)
    };
    for (ln, toks) in lines {
        match (toks[0], toks.len()) {
            ("e", 3) => {
                let (u, v) = (vertex(ln, toks[1])?, vertex(ln, toks[2])?);
                if u == v {
                    return Err(Error::parse(ln, "self-loop"));
                }
                edges.push((u, v));
            }
            ("w", 3) => {
                let v = vertex(ln, toks[1])?;
                weights[v] = num(ln, toks[2])?;
            }
            _ => return Err(Error::parse(ln, "expected `e u v` or `w v weight`")),
        }
    }
    check_count(m, edges.len(), "edges")?;
    let g = Graph::new(n, edges).map_err(lift(0))?;
    WeightedGraph::new(g, weights).map_err(lift(0))
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.num_vertices(), g.num_edges());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    s
}

/// Edge list followed by a `w` line for every vertex whose weight is not 1.
pub fn write_weighted_graph(wg: &WeightedGraph) -> String {
    let mut s = write_graph(wg.graph());
    for (v, &w) in wg.weights().iter().enumerate() {
        if w != 1 {
            let _ = writeln!(s, "w {} {}", v + 1, w);
        }
    }
    s
}

/// `universe n`, then `rel <name> <arity>` declarations and
/// `t <name> <a_1> ... <a_r>` tuples, 0-based.
pub fn parse_structure(text: &str) -> Result<RelStructure> {
    let mut lines = content_lines(text);
    let n: usize = match lines.next() {
        Some((ln, toks)) if toks.len() == 2 && toks[0] == "universe" => num(ln, toks[1])?,
        Some((ln, _)) => return Err(Error::parse(ln, "expected `universe <n>`")),
        None => return Err(Error::parse(0, "empty input")),
    };
    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut tuples: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    for (ln, toks) in lines {
        match toks[0] {
            "rel" if toks.len() == 3 => {
                let name = toks[1].to_string();
                if symbols.iter().any(|(s, _)| *s == name) {
                    return Err(Error::parse(ln, format!("relation `{name}` declared twice")));
                }
                symbols.push((name, num(ln, toks[2])?));
                tuples.push(BTreeSet::new());
            }
            "t" if toks.len() >= 2 => {
                let r = symbols
                    .iter()
                    .position(|(s, _)| s == toks[1])
                    .ok_or_else(|| Error::parse(ln, format!("undeclared relation `{}`", toks[1])))?;
                let t: Vec<usize> = toks[2..].iter().map(|x| num(ln, x)).collect::<Result<_>>()?;
                if t.len() != symbols[r].1 {
                    return Err(Error::parse(ln, format!("`{}` has arity {}", toks[1], symbols[r].1)));
                }
                if t.iter().any(|&a| a >= n) {
                    return Err(Error::parse(ln, "element out of range"));
                }
                tuples[r].insert(t);
            }
            _ => return Err(Error::parse(ln, "expected `rel <name> <arity>` or `t <name> ...`")),
        }
    }
    let vocab = Vocabulary::new(symbols).map_err(lift(0))?;
    RelStructure::new(vocab, n, tuples).map_err(lift(0))
}

pub fn write_structure(a: &RelStructure) -> String {
    let mut s = format!("universe {}\n", a.size());
    let vocab = a.vocabulary();
    for i in 0..vocab.len() {
        let _ = writeln!(s, "rel {} {}", vocab.name(i), vocab.arity(i));
    }
    for i in 0..vocab.len() {
        for t in a.relation(i) {
            let body: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "t {} {}", vocab.name(i), body.join(" "));
        }
    }
    s
}

/// Reads a graph, or a structure when the text starts with `universe`.
pub fn parse_structure_or_graph(text: &str) -> Result<RelStructure> {
    let first = content_lines(text).next().map(|(_, t)| t[0].to_string());
    if first.as_deref() == Some("universe") {
        parse_structure(text)
    } else {
        Ok(parse_graph(text)?.graph().to_structure())
    }
}

/// Header `layout m n p q`, then one line per long-code variable:
/// `<index> <U|V> <owner> <bits>`, with `bits` the free coordinates of the
/// folded point, coordinate 0 first.
pub fn write_layout(layout: &FoldedLayout) -> String {
    let mut s = format!("layout {} {} {} {}\n", layout.m, layout.n, layout.p, layout.q);
    for idx in 0..layout.num_vars() {
        let f = layout.decode(idx);
        let (side, width) = match f.side {
            Side::U => ("U", layout.p - 1),
            Side::V => ("V", layout.q - 1),
        };
        let bits: String = (0..width).map(|i| if f.bits >> i & 1 == 1 { '1' } else { '0' }).collect();
        let _ = writeln!(s, "{idx} {side} {} {bits}", f.owner);
    }
    s
}

/// Reads a layout sidecar, checking every line against the header.
pub fn parse_layout(text: &str) -> Result<FoldedLayout> {
    let mut lines = content_lines(text);
    let layout = match lines.next() {
        Some((ln, toks)) if toks.len() == 5 && toks[0] == "layout" => FoldedLayout {
            m: num(ln, toks[1])?,
            n: num(ln, toks[2])?,
            p: num(ln, toks[3])?,
            q: num(ln, toks[4])?,
        },
        Some((ln, _)) => return Err(Error::parse(ln, "expected `layout m n p q`")),
        None => return Err(Error::parse(0, "empty input")),
    };
    if layout.p == 0 || layout.q == 0 || layout.p > 30 || layout.q > 30 {
        return Err(Error::parse(1, "domain sizes must be in 1..=30"));
    }
    let written = write_layout(&layout);
    let mut count = 0;
    for ((ln, toks), want) in lines.zip(written.lines().skip(1)) {
        if toks.join(" ") != want.trim_end() {
            return Err(Error::parse(ln, format!("expected `{want}`")));
        }
        count += 1;
    }
    check_count(layout.num_vars(), count, "variables")?;
    Ok(layout)
}

/// Collapsed long-code queries of a 3XOR image: `u <var> <rhs> <mult>`, 0-based.
pub fn write_unary(eqs: &[UnaryEquation]) -> String {
    let mut s = String::new();
    for e in eqs {
        let _ = writeln!(s, "u {} {} {}", e.var, e.rhs as u8, e.mult);
    }
    s
}

pub fn parse_unary(text: &str) -> Result<Vec<UnaryEquation>> {
    content_lines(text)
        .map(|(ln, toks)| {
            if toks.len() != 4 || toks[0] != "u" {
                return Err(Error::parse(ln, "expected `u var rhs mult`"));
            }
            let rhs = match toks[2] {
                "0" => false,
                "1" => true,
                t => return Err(Error::parse(ln, format!("right-hand side must be 0 or 1, got `{t}`"))),
            };
            Ok(UnaryEquation { var: num(ln, toks[1])?, rhs, mult: num(ln, toks[3])? })
        })
        .collect()
}

/// Collapsed long-code queries of a 3SAT image: `b <lit> <lit> <mult>` with
/// signed 1-based literals, and `t <weight>` for always-true clauses.
pub fn write_binary(clauses: &[BinaryClause], tautologies: Weight) -> String {
    let lit = |l: &Literal| {
        let v = l.var as i64 + 1;
        if l.positive { v } else { -v }
    };
    let mut s = String::new();
    for c in clauses {
        let _ = writeln!(s, "b {} {} {}", lit(&c.lits[0]), lit(&c.lits[1]), c.mult);
    }
    if tautologies > 0 {
        let _ = writeln!(s, "t {tautologies}");
    }
    s
}

pub fn parse_binary(text: &str) -> Result<(Vec<BinaryClause>, Weight)> {
    let mut clauses = Vec::new();
    let mut tautologies = 0;
    for (ln, toks) in content_lines(text) {
        match (toks[0], toks.len()) {
            ("b", 4) => {
                let mut lits = [Literal::new(0, true); 2];
                for (slot, tok) in lits.iter_mut().zip(&toks[1..3]) {
                    let x: i64 = num(ln, tok)?;
                    if x == 0 {
                        return Err(Error::parse(ln, "literal 0"));
                    }
                    *slot = Literal::new(x.unsigned_abs() as usize - 1, x > 0);
                }
                clauses.push(BinaryClause { lits, mult: num(ln, toks[3])? });
            }
            ("t", 2) => tautologies += num::<Weight>(ln, toks[1])?,
            _ => return Err(Error::parse(ln, "expected `b lit lit mult` or `t weight`")),
        }
    }
    Ok((clauses, tautologies))
}

/// One line per FGLSS vertex: `<vertex> <equation> <copy> <abc>`.
pub fn write_fglss_labels(vertices: &[FglssVertex]) -> String {
    let mut s = String::new();
    for (i, v) in vertices.iter().enumerate() {
        let a: String = v.assignment.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let _ = writeln!(s, "{i} {} {} {a}", v.equation, v.copy);
    }
    s
}

pub fn parse_fglss_labels(text: &str) -> Result<Vec<FglssVertex>> {
    content_lines(text)
        .enumerate()
        .map(|(i, (ln, toks))| {
            if toks.len() != 4 || num::<usize>(ln, toks[0])? != i {
                return Err(Error::parse(ln, format!("expected `{i} equation copy abc`")));
            }
            let bits: Vec<char> = toks[3].chars().collect();
            if bits.len() != 3 || bits.iter().any(|c| !matches!(c, '0' | '1')) {
                return Err(Error::parse(ln, "assignment must be three bits"));
            }
            Ok(FglssVertex {
                equation: num(ln, toks[1])?,
                copy: num(ln, toks[2])?,
                assignment: [bits[0] == '1', bits[1] == '1', bits[2] == '1'],
            })
        })
        .collect()
}
