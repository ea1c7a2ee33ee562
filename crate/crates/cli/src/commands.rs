use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gapwidth::formats::*;
use gapwidth::gadgets::{gadget, homogeneous};
use gapwidth::games::{
    bijective_game, c2_equivalent, color_refinement, existential_game, BijectiveReason, Certificate,
    ExistentialReason, GameVerdict, DEFAULT_POSITION_BUDGET,
};
use gapwidth::generators::{
    expander_incidence, gap_pair, random_incidence, random_regular_bipartite, random_regular_graph,
    random_xor_system, rhs_random, system_from_incidence, DEFAULT_RETRIES, DEFAULT_SUBSET_BUDGET,
};
use gapwidth::graphreductions::{
    dinur_safra, fglss, labelcover_to_graph, pipeline_sat, pipeline_vc, pipeline_xor, unweight, PipelineBudget,
    DEFAULT_GRAPH_BUDGET,
};
use gapwidth::labelcover::{bipartite_reduction, parallel_repetition, LabelCover, DEFAULT_REPETITION_BUDGET};
use gapwidth::longcode::{longcode_sat, longcode_xor, LongCodeSat, LongCodeXor, DEFAULT_CONSTRAINT_BUDGET};
use gapwidth::oracles::{
    labelcover_opt, max_cnf, max_hclique_free, max_is, max_xor, min_vc, OptResult, DEFAULT_ASSIGNMENT_CAP,
    DEFAULT_LC_CAP, DEFAULT_VC_CAP,
};
use gapwidth::structures::xor_to_sat;
use gapwidth::vcwidth::v_invariant;
use gapwidth::{fraction, Assignment, CoPartiteGraph, Graph, WeightedGraph};
use serde_json::{json, Value};

use crate::report::Report;
use crate::{Cli, Command, DsArgs, GameKind, GenCommand, Global, LongCodeSidecars, OracleKind, ReduceCommand};

pub fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to the file when given, to stdout otherwise.
fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_with<T>(path: &Path, parse: impl Fn(&str) -> gapwidth::Result<T>) -> Result<T> {
    let text = read_input(path)?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn bits(a: &Assignment) -> String {
    a.values().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn list(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl Global {
    pub fn budget_or(&self, default: u64) -> u64 {
        self.budget.unwrap_or(default)
    }

    pub fn cap_or(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }

    fn pipeline_budget(&self) -> PipelineBudget {
        match self.budget {
            Some(b) => PipelineBudget { repetition: b, longcode: b, graph: b },
            None => PipelineBudget::default(),
        }
    }
}

/// Runs one command; `Ok(false)` when a reported check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    let report = match &cli.command {
        Command::Gen(cmd) => {
            gen(g, cmd)?;
            return Ok(true);
        }
        Command::Gadget { input, homogeneous: hom, output } => {
            let sys = parse_with(input, parse_xor)?;
            let src = if *hom { homogeneous(&sys) } else { sys };
            let (out, map) = gadget(&src);
            emit(&write_xor(&out), output.as_deref())?;
            let mut r = Report::new();
            r.put("vars", map.num_vars()).put("equations", out.len()).put("weight", out.total_weight());
            info(g, &r);
            return Ok(true);
        }
        Command::Reduce(cmd) => {
            reduce(g, cmd)?;
            return Ok(true);
        }
        Command::Game { kind, k, a, b, certificate } => game(g, *kind, *k, a, b, certificate.as_deref())?,
        Command::Refine { graph } => {
            let gr = parse_with(graph, parse_graph)?;
            let r = color_refinement(gr.graph());
            let mut rep = Report::new();
            rep.put("classes", r.classes.len()).put("rounds", r.rounds);
            for (i, c) in r.classes.iter().enumerate() {
                rep.put(format!("class.{i}"), list(c));
            }
            for (i, row) in r.delta.iter().enumerate() {
                rep.put(format!("delta.{i}"), list(row));
            }
            print!("{}", rep.render(g.format, false));
            return Ok(true);
        }
        Command::C2eq { g: a, h: b } => {
            let (a, b) = (parse_with(a, parse_graph)?, parse_with(b, parse_graph)?);
            let mut rep = Report::new();
            rep.put("equivalent", c2_equivalent(a.graph(), b.graph()));
            rep
        }
        Command::Oracle { kind, input, h } => oracle(g, *kind, input, *h)?,
        Command::Vcapprox { graph } => vcapprox(g, graph)?,
        Command::Verify(args) => return crate::recipes::verify(g, args),
    };
    print!("{}", report.render(g.format, true));
    Ok(report.passed())
}

/// Side information for commands whose stdout carries an instance.
fn info(g: &Global, r: &Report) {
    eprint!("{}", r.render(g.format, true));
}

fn gen(g: &Global, cmd: &GenCommand) -> Result<()> {
    let mut r = Report::new();
    r.put("seed", g.seed);
    match cmd {
        GenCommand::Xor { n, m, output } => {
            let sys = random_xor_system(*n, *m, g.seed)?;
            emit(&write_xor(&sys), output.as_deref())?;
            r.put("equations", sys.len()).put("weight", sys.total_weight());
        }
        GenCommand::Incidence { n, r: rows, s_max, beta, retries, output } => {
            let a = match s_max {
                Some(s) => {
                    let budget = g.budget_or(DEFAULT_SUBSET_BUDGET);
                    let (a, attempt) = expander_incidence(*n, *rows, *s, *beta, g.seed, *retries, budget)?;
                    r.put("attempt", attempt).put("beta", beta.to_string()).put("s_max", *s);
                    a
                }
                None => random_incidence(*n, *rows, g.seed)?,
            };
            let sys = system_from_incidence(&a, &rhs_random(a.num_rows(), g.seed))?;
            emit(&write_xor(&sys), output.as_deref())?;
            r.put("rows", a.num_rows()).put("equations", sys.len());
        }
        GenCommand::GapPair { n, r: rows, epsilon, k_check, out } => {
            let cap = g.cap_or(DEFAULT_ASSIGNMENT_CAP);
            let gp = gap_pair(*n, *rows, *epsilon, *k_check, g.seed, cap, g.budget_or(DEFAULT_POSITION_BUDGET))?;
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            write_file(&out.join("seed.xor"), &write_xor(&gp.seed_system))?;
            write_file(&out.join("satisfiable.xor"), &write_xor(&gp.satisfiable))?;
            write_file(&out.join("hard.xor"), &write_xor(&gp.hard))?;
            r.put("n", *n).put("r", *rows).put("epsilon", epsilon.to_string());
            if let Some(l) = gp.locally_satisfiable {
                r.put("k_check", *k_check).put("locally_satisfiable", l);
            }
            match gp.opt {
                Some((o0, o1)) => {
                    r.put("opt_satisfiable", o0.to_string()).put("opt_hard", o1.to_string());
                    r.put("gap", gp.is_gap().unwrap_or(false));
                }
                None => {
                    r.put("opt", "skipped");
                }
            }
            print!("{}", r.render(g.format, false));
            return Ok(());
        }
        GenCommand::Regular { n, d, output } => {
            let gr = random_regular_graph(*n, *d, g.seed, DEFAULT_RETRIES)?;
            emit(&write_graph(&gr), output.as_deref())?;
            r.put("vertices", *n).put("edges", gr.num_edges());
        }
        GenCommand::Bipartite { m, d, output } => {
            let gr = random_regular_bipartite(*m, *d, g.seed, DEFAULT_RETRIES)?;
            emit(&write_graph(&gr), output.as_deref())?;
            r.put("vertices", 2 * m).put("edges", gr.num_edges());
        }
    }
    info(g, &r);
    Ok(())
}

fn write_xor_image(x: &LongCodeXor, out: Option<&Path>, side: &LongCodeSidecars) -> Result<Report> {
    emit(&write_xor(&x.system), out)?;
    if let Some(p) = &side.layout {
        write_file(p, &write_layout(&x.layout))?;
    }
    if let Some(p) = &side.collapsed {
        write_file(p, &write_unary(&x.unary))?;
    }
    let mut r = Report::new();
    r.put("vars", x.layout.num_vars())
        .put("equations", x.system.len())
        .put("unary", x.unary.len())
        .put("weight", x.total_weight());
    Ok(r)
}

fn write_sat_image(s: &LongCodeSat, out: Option<&Path>, side: &LongCodeSidecars) -> Result<Report> {
    emit(&write_dimacs(&s.system), out)?;
    if let Some(p) = &side.layout {
        write_file(p, &write_layout(&s.layout))?;
    }
    if let Some(p) = &side.collapsed {
        write_file(p, &write_binary(&s.binary, s.tautologies))?;
    }
    let mut r = Report::new();
    r.put("vars", s.layout.num_vars())
        .put("clauses", s.system.len())
        .put("binary", s.binary.len())
        .put("tautologies", s.tautologies)
        .put("weight", s.total_weight());
    Ok(r)
}

fn consecutive_parts(wg: &WeightedGraph, r: usize) -> Result<CoPartiteGraph> {
    let n = wg.graph().num_vertices();
    if r == 0 || !n.is_multiple_of(r) {
        bail!("{n} vertices do not split into parts of size {r}");
    }
    let parts = (0..n / r).map(|i| (i * r..(i + 1) * r).collect()).collect();
    Ok(CoPartiteGraph::new(wg.graph().clone(), parts)?)
}

fn reduce(g: &Global, cmd: &ReduceCommand) -> Result<()> {
    let r = match cmd {
        ReduceCommand::Xor2sat(io) => {
            let cnf = xor_to_sat(&parse_with(&io.input, parse_xor)?);
            emit(&write_dimacs(&cnf), io.output.as_deref())?;
            let mut r = Report::new();
            r.put("clauses", cnf.len()).put("weight", cnf.total_weight());
            r
        }
        ReduceCommand::Bipartite(io) => {
            let lc = bipartite_reduction(&parse_with(&io.input, parse_xor)?);
            emit(&(lc.to_json() + "\n"), io.output.as_deref())?;
            lc_summary(&lc)
        }
        ReduceCommand::Repeat { io, t } => {
            let lc = parse_with(&io.input, LabelCover::from_json)?;
            let rep = parallel_repetition(&lc, *t, g.budget_or(DEFAULT_REPETITION_BUDGET))?;
            emit(&(rep.to_json() + "\n"), io.output.as_deref())?;
            lc_summary(&rep)
        }
        ReduceCommand::LcXor { io, epsilon, side } => {
            let lc = parse_with(&io.input, LabelCover::from_json)?;
            let x = longcode_xor(&lc, *epsilon, g.budget_or(DEFAULT_CONSTRAINT_BUDGET))?;
            write_xor_image(&x, io.output.as_deref(), side)?
        }
        ReduceCommand::LcSat { io, delta, side } => {
            let lc = parse_with(&io.input, LabelCover::from_json)?;
            let s = longcode_sat(&lc, *delta, g.budget_or(DEFAULT_CONSTRAINT_BUDGET))?;
            write_sat_image(&s, io.output.as_deref(), side)?
        }
        ReduceCommand::Fglss { io, labels } => {
            let f = fglss(&parse_with(&io.input, parse_xor)?);
            emit(&write_graph(&f.graph), io.output.as_deref())?;
            if let Some(p) = labels {
                write_file(p, &write_fglss_labels(&f.vertices))?;
            }
            graph_summary(&f.graph)
        }
        ReduceCommand::LcGraph(io) => {
            let cg = labelcover_to_graph(&parse_with(&io.input, LabelCover::from_json)?)?;
            emit(&write_graph(cg.graph()), io.output.as_deref())?;
            let mut r = graph_summary(cg.graph());
            r.put("parts", cg.num_parts()).put("part_size", cg.part_size());
            r
        }
        ReduceCommand::DinurSafra { io, ds } => {
            let cg = consecutive_parts(&parse_with(&io.input, parse_graph)?, ds.r)?;
            let DsArgs { r, p, l1 } = ds;
            let out = dinur_safra(&cg, *p, *l1, *r, g.budget_or(DEFAULT_GRAPH_BUDGET))?;
            emit(&write_weighted_graph(&out.graph), io.output.as_deref())?;
            let mut rep = graph_summary(out.graph.graph());
            rep.put("blocks", out.layout.blocks.len()).put("family", out.layout.q());
            rep
        }
        ReduceCommand::Unweight(io) => {
            let wg = parse_with(&io.input, parse_graph)?;
            let (gr, _) = unweight(&wg, g.budget_or(DEFAULT_GRAPH_BUDGET))?;
            emit(&write_graph(&gr), io.output.as_deref())?;
            graph_summary(&gr)
        }
        ReduceCommand::PipelineXor { io, t, epsilon, side } => {
            let x = pipeline_xor(&parse_with(&io.input, parse_xor)?, *t, *epsilon, &g.pipeline_budget())?;
            write_xor_image(&x, io.output.as_deref(), side)?
        }
        ReduceCommand::PipelineSat { io, t, delta, side } => {
            let s = pipeline_sat(&parse_with(&io.input, parse_xor)?, *t, *delta, &g.pipeline_budget())?;
            write_sat_image(&s, io.output.as_deref(), side)?
        }
        ReduceCommand::PipelineVc { io, t, ds } => {
            let sys = parse_with(&io.input, parse_xor)?;
            let gr = pipeline_vc(&sys, *t, ds.p, ds.l1, ds.r, &g.pipeline_budget())?;
            emit(&write_graph(&gr), io.output.as_deref())?;
            graph_summary(&gr)
        }
    };
    info(g, &r);
    Ok(())
}

fn lc_summary(lc: &LabelCover) -> Report {
    let mut r = Report::new();
    r.put("left", lc.num_left())
        .put("right", lc.num_right())
        .put("left_domain", lc.left_domain())
        .put("right_domain", lc.right_domain())
        .put("edges", lc.edges().len())
        .put("weight", lc.total_weight());
    r
}

fn graph_summary(gr: &Graph) -> Report {
    let mut r = Report::new();
    r.put("vertices", gr.num_vertices()).put("edges", gr.num_edges());
    r
}

fn pairs(position: &[(usize, usize)]) -> Value {
    Value::Array(position.iter().map(|&(a, b)| json!([a, b])).collect())
}

pub fn certificate_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::SizeMismatch => json!({"kind": "size-mismatch"}),
        Certificate::Existential(kills) => {
            let kills: Vec<Value> = kills
                .iter()
                .map(|k| {
                    let reason = match &k.reason {
                        ExistentialReason::Unextendable(x) => json!({"unextendable": x}),
                        ExistentialReason::RestrictionLost((a, b)) => json!({"restriction-lost": [a, b]}),
                    };
                    json!({"position": pairs(&k.position), "reason": reason})
                })
                .collect();
            json!({"kind": "existential", "kills": kills})
        }
        Certificate::Bijective(kills) => {
            let kills: Vec<Value> = kills
                .iter()
                .map(|k| {
                    let reason = match &k.reason {
                        BijectiveReason::RestrictionDead((a, b)) => json!({"restriction-dead": [a, b]}),
                        BijectiveReason::HallViolation { lifted, set } => {
                            json!({"hall-violation": {"lifted": lifted.map(|(a, b)| json!([a, b])), "set": set}})
                        }
                    };
                    json!({"round": k.round, "position": pairs(&k.position), "reason": reason})
                })
                .collect();
            json!({"kind": "bijective", "kills": kills})
        }
    }
}

fn game(g: &Global, kind: GameKind, k: usize, a: &Path, b: &Path, cert: Option<&Path>) -> Result<Report> {
    let (sa, sb) = (parse_with(a, parse_structure_or_graph)?, parse_with(b, parse_structure_or_graph)?);
    let budget = g.budget_or(DEFAULT_POSITION_BUDGET);
    let v: GameVerdict = match kind {
        GameKind::Exist => existential_game(&sa, &sb, k, budget)?,
        GameKind::Bij => bijective_game(&sa, &sb, k, budget)?,
    };
    let mut r = Report::new();
    r.put("game", if kind == GameKind::Exist { "exist" } else { "bij" })
        .put("k", k)
        .put("winner", if v.duplicator_wins() { "duplicator" } else { "spoiler" })
        .put("positions", v.positions)
        .put("surviving", v.surviving);
    if let (Some(path), Some(c)) = (cert, &v.certificate) {
        let text = serde_json::to_string_pretty(&certificate_json(c))?;
        write_file(path, &(text + "\n"))?;
        r.put("certificate", path.display().to_string());
    }
    Ok(r)
}

fn put_opt<W>(r: &mut Report, o: &OptResult<W>, witness: String) {
    r.put("value", o.value)
        .put("total", o.total)
        .put("fraction", o.fraction.to_string())
        .put("explored", o.explored)
        .put("witness", witness);
}

fn oracle(g: &Global, kind: OracleKind, input: &Path, h: usize) -> Result<Report> {
    let mut r = Report::new();
    match kind {
        OracleKind::Maxxor => {
            let o = max_xor(&parse_with(input, parse_xor)?, g.cap_or(DEFAULT_ASSIGNMENT_CAP))?;
            let w = bits(&o.witness);
            put_opt(&mut r, &o, w);
        }
        OracleKind::Maxcnf => {
            let o = max_cnf(&parse_with(input, parse_dimacs)?, g.cap_or(DEFAULT_ASSIGNMENT_CAP))?;
            let w = bits(&o.witness);
            put_opt(&mut r, &o, w);
        }
        OracleKind::Lcopt => {
            let lc = parse_with(input, LabelCover::from_json)?;
            let cap = g.cap.map_or(DEFAULT_LC_CAP, |c| c as u64);
            let o = labelcover_opt(&lc, cap)?;
            let w = format!("{};{}", list(&o.witness.0), list(&o.witness.1));
            put_opt(&mut r, &o, w);
        }
        OracleKind::Vc | OracleKind::Is | OracleKind::Hisfree => {
            let wg = parse_with(input, parse_graph)?;
            let gr = wg.graph();
            let o = match kind {
                OracleKind::Vc => min_vc(gr, g.cap_or(DEFAULT_VC_CAP))?,
                OracleKind::Is => max_is(gr, g.cap_or(DEFAULT_VC_CAP))?,
                _ => max_hclique_free(gr, h, g.cap_or(DEFAULT_ASSIGNMENT_CAP))?,
            };
            let w = list(&o.witness);
            put_opt(&mut r, &o, w);
        }
    }
    Ok(r)
}

fn vcapprox(g: &Global, graph: &Path) -> Result<Report> {
    let wg = parse_with(graph, parse_graph)?;
    let gr = wg.graph();
    let v = v_invariant(gr)?;
    let mut r = Report::new();
    r.put("v", v.v).put("p", v.p).put("q", v.q);
    let sizes = |ix: &[usize]| -> String {
        ix.iter()
            .map(|&i| format!("{}:{}", i, v.refinement.classes[i].len()))
            .collect::<Vec<_>>()
            .join(",")
    };
    r.put("x", sizes(&v.x)).put("y", sizes(&v.y)).put("cover", list(&v.cover));
    let cap = g.cap_or(DEFAULT_VC_CAP);
    if gr.num_vertices() <= cap {
        let vc = min_vc(gr, cap)?.value;
        r.put("vc", vc).put("ratio", fraction(v.v, vc).to_string());
    }
    Ok(r)
}
