use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gapwidth::formats::*;
use gapwidth::games::DEFAULT_POSITION_BUDGET;
use gapwidth::generators::{derive_seed, gap_pair, random_xor_system};
use gapwidth::graphreductions::fglss;
use gapwidth::labelcover::{bipartite_reduction, induced_left_label};
use gapwidth::longcode::{longcode_sat, longcode_xor, DEFAULT_CONSTRAINT_BUDGET};
use gapwidth::oracles::{max_csp, max_xor, min_vc, xor_solution, DEFAULT_ASSIGNMENT_CAP};
use gapwidth::vcwidth::c2_gap_witness;
use gapwidth::games::c2_equivalent;
use gapwidth::{fraction, Error, Fraction, XorEquation, XorSystem};
use num_rational::Ratio;
use rayon::prelude::*;

use crate::commands::{read_input, write_file};
use crate::report::Report;
use crate::{Global, Recipe, VerifyArgs};

/// Where a recipe drops its instances, when asked to.
struct Sink(Option<PathBuf>);

impl Sink {
    fn new(out: Option<&Path>) -> Result<Self> {
        if let Some(dir) = out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Sink(out.map(Path::to_path_buf)))
    }

    fn put(&self, name: &str, text: &str) -> Result<()> {
        match &self.0 {
            Some(dir) => write_file(&dir.join(name), text),
            None => Ok(()),
        }
    }
}

fn refused(stage: &str, needed: impl ToString, budget: impl ToString) -> anyhow::Error {
    Error::BudgetExceeded {
        stage: stage.into(),
        needed: needed.to_string(),
        budget: budget.to_string(),
    }
    .into()
}

pub fn verify(g: &Global, args: &VerifyArgs) -> Result<bool> {
    let sink = Sink::new(args.out.as_deref())?;
    let mut r = Report::new();
    r.put("seed", g.seed);
    match args.recipe {
        Recipe::FglssIdentity => fglss_identity(g, args, &sink, &mut r)?,
        Recipe::GadgetGap => gadget_gap(g, args, &sink, &mut r)?,
        Recipe::C2Witness => c2_witness(g, args, &sink, &mut r)?,
        Recipe::LongcodeCompleteness => longcode_completeness(g, args, &sink, &mut r)?,
    }
    let text = r.render(g.format, false);
    sink.put("report.txt", &text)?;
    print!("{text}");
    Ok(r.passed())
}

fn fglss_identity(g: &Global, args: &VerifyArgs, sink: &Sink, r: &mut Report) -> Result<()> {
    let m = args.m.unwrap_or(4);
    r.put("recipe", "fglss-identity").put("count", args.count).put("n", args.n).put("m", m);
    r.put("expect", "vc = 4m - m*").put("tolerance", 0);
    let cap = g.cap_or(64);
    let rows: Vec<Result<(XorSystem, u64, u64)>> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            let sys = random_xor_system(args.n, m, derive_seed(g.seed, i as u64))?;
            let best = max_xor(&sys, g.cap_or(DEFAULT_ASSIGNMENT_CAP))?.value;
            let vc = min_vc(&fglss(&sys).graph, cap)?.value;
            Ok((sys, best, vc))
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        let (sys, best, vc) = row?;
        let total = sys.total_weight();
        let f = fglss(&sys);
        sink.put(&format!("instance-{i}.xor"), &write_xor(&sys))?;
        sink.put(&format!("instance-{i}.graph"), &write_graph(&f.graph))?;
        sink.put(&format!("instance-{i}.labels"), &write_fglss_labels(&f.vertices))?;
        let want = 4 * total - best;
        r.check(format!("instance.{i}.vc"), want, vc, vc == want);
    }
    Ok(())
}

fn gadget_gap(g: &Global, args: &VerifyArgs, sink: &Sink, r: &mut Report) -> Result<()> {
    let eps = Fraction::new(*args.epsilon.numer() as u128, *args.epsilon.denom() as u128);
    r.put("recipe", "gadget-gap").put("count", args.count).put("n", args.n).put("r", args.r);
    r.put("epsilon", eps.to_string()).put("k_check", args.k_check);
    r.put("expect", "opt(S) <= opt(G(S)) <= 1/2 + opt(S)/2, opt(G(S^0)) = 1").put("tolerance", 0);
    let cap = g.cap_or(DEFAULT_ASSIGNMENT_CAP);
    if 2 * args.n > cap {
        return Err(refused("gadget-gap", format!("{} variables", 2 * args.n), cap));
    }
    let budget = g.budget_or(DEFAULT_POSITION_BUDGET);
    let half = Fraction::new(1, 2);
    for i in 0..args.count {
        let seed = derive_seed(g.seed, i as u64);
        let gp = gap_pair(args.n, args.r, eps, args.k_check, seed, cap, budget)?;
        let (o0, o1) = gp.opt.expect("within cap");
        let base = max_xor(&gp.seed_system, cap)?.fraction;
        sink.put(&format!("instance-{i}.seed.xor"), &write_xor(&gp.seed_system))?;
        sink.put(&format!("instance-{i}.satisfiable.xor"), &write_xor(&gp.satisfiable))?;
        sink.put(&format!("instance-{i}.hard.xor"), &write_xor(&gp.hard))?;
        r.put(format!("instance.{i}.opt_seed"), base.to_string());
        if let Some(l) = gp.locally_satisfiable {
            r.put(format!("instance.{i}.locally_satisfiable"), l);
        }
        r.put(format!("instance.{i}.gap"), gp.is_gap().unwrap_or(false));
        r.check(format!("instance.{i}.lift-lower"), format!(">= {base}"), o1, base <= o1);
        let upper = half + base * half;
        r.check(format!("instance.{i}.lift-upper"), format!("<= {upper}"), o1, o1 <= upper);
        r.check(format!("instance.{i}.homogeneous"), 1, o0, o0 == Fraction::from_integer(1));
    }
    Ok(())
}

fn c2_witness(g: &Global, args: &VerifyArgs, sink: &Sink, r: &mut Report) -> Result<()> {
    let m = args.m.unwrap_or(8);
    r.put("recipe", "c2-witness").put("m", m).put("retries", args.retries);
    r.put("expect", "G and H C2-equivalent, vc(H) = m < vc(G), v_G = v_H, vc <= v <= 2vc").put("tolerance", 0);
    let w = c2_gap_witness(m, g.seed, args.retries)?;
    sink.put("g.graph", &write_graph(&w.g))?;
    sink.put("h.graph", &write_graph(&w.h))?;
    r.put("attempts", w.attempts).put("vc_g", w.vc_g).put("vc_h", w.vc_h);
    r.put("v_g", w.report_g.v).put("v_h", w.report_h.v);
    let eq = c2_equivalent(&w.g, &w.h);
    r.check("c2-equivalent", true, eq, eq);
    r.check("vc-h", m, w.vc_h, w.vc_h == m as u64);
    r.check("vc-g", format!("> {m}"), w.vc_g, w.vc_g > m as u64);
    r.check("invariant", w.report_h.v, w.report_g.v, w.report_g.v == w.report_h.v);
    for (name, vc, v) in [("sandwich-g", w.vc_g, w.report_g.v), ("sandwich-h", w.vc_h, w.report_h.v)] {
        r.check(name, format!("[{vc}, {}]", 2 * vc), v, vc <= v && v <= 2 * vc);
    }
    Ok(())
}

fn longcode_completeness(g: &Global, args: &VerifyArgs, sink: &Sink, r: &mut Report) -> Result<()> {
    let sys = match &args.input {
        Some(p) => parse_xor(&read_input(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => XorSystem::new(3, [XorEquation::new([0, 1, 2], true, 1)])?,
    };
    let eps = args.epsilon;
    r.put("recipe", "longcode-completeness").put("epsilon", eps.to_string());
    r.put("expect", "dictators pass the 3XOR test with rate >= 1 - epsilon and satisfy the 3SAT image")
        .put("tolerance", 0);
    let Some(solution) = xor_solution(&sys) else {
        r.check("input-satisfiable", true, false, false);
        return Ok(());
    };
    let lc = bipartite_reduction(&sys);
    let values = solution.values().to_vec();
    let lf: Vec<usize> = (0..lc.num_left()).map(|u| induced_left_label(&sys, u, &values)).collect();
    let lg: Vec<usize> = values.iter().map(|&b| b as usize).collect();
    let budget = g.budget_or(DEFAULT_CONSTRAINT_BUDGET);
    let floor = Fraction::new((eps.denom() - eps.numer()) as u128, *eps.denom() as u128);

    let x = longcode_xor(&lc, eps, budget)?;
    sink.put("image.xor", &write_xor(&x.system))?;
    sink.put("image.xor.layout", &write_layout(&x.layout))?;
    sink.put("image.xor.collapsed", &write_unary(&x.unary))?;
    r.put("xor_vars", x.layout.num_vars()).put("xor_weight", x.total_weight());
    let (s, t) = x.sat_count(&x.layout.dictator_assignment(&lf, &lg, false));
    let rate = fraction(s, t);
    r.check("xor-dictator", format!(">= {floor}"), rate, rate >= floor);
    let cap = g.cap_or(DEFAULT_ASSIGNMENT_CAP);
    if x.layout.num_vars() <= cap {
        let best = max_csp(&x.to_csp(), cap)?.fraction;
        r.check("xor-opt", format!(">= {floor}"), best, best >= floor);
    } else {
        r.put("xor_opt", "skipped");
    }

    let one = Ratio::new(1, 1);
    let sat = longcode_sat(&lc, one, budget)?;
    sink.put("image.cnf", &write_dimacs(&sat.system))?;
    sink.put("image.cnf.layout", &write_layout(&sat.layout))?;
    sink.put("image.cnf.collapsed", &write_binary(&sat.binary, sat.tautologies))?;
    r.put("delta", one.to_string()).put("sat_vars", sat.layout.num_vars()).put("sat_weight", sat.total_weight());
    let (s, t) = sat.sat_count(&sat.layout.dictator_assignment(&lf, &lg, false));
    r.check("sat-dictator", t, s, s == t);
    Ok(())
}
