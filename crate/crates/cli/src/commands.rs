//! One function per subcommand. Each turns a document into a [`RunReport`];
//! only unreadable input, parse failures and bad arguments become errors.

use std::collections::BTreeSet;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kolchin::constructions::{adjoin_sigma_preimage, diffperfect_truncated, ConstructionError};
use kolchin::dd::{
    dd_check, dd_classify, dd_hypothesis_check, dd_prolong_delta, dd_realize, delinearize, describe_commutation,
    difference_leader_classify, linearize, DDError, DDKernel, DDLeaderEntry, DDLeaderReport, DDVerifyReport, RealizeLog,
};
use kolchin::dsl::ast::{Document, Item};
use kolchin::dsl::build::{emit_ddkernel, emit_kernel, eval};
use kolchin::dsl::{parse_expr, print_document, BuildError, Model};
use kolchin::kernel::{
    classify_leaders, finiteness_probe, kernel_prolong, kernel_violations, KernelError, LeaderEntry, LeaderTag, Presentation,
};
use kolchin::ops::{commutation_check, r_map, CommutationReport, Derivation, Violation};
use kolchin::tower::Tower;

use crate::report::RunReport;
use crate::suite;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Parser, Debug)]
#[command(name = "kolchin", version, about = "Differential and difference-differential kernels over presented towers")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include the elapsed time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// A document and an optional block name. `suite:NAME` reads a bundled
/// document and `-` reads standard input.
#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Document path, `suite:NAME` or `-`.
    pub file: String,
    /// Block to use when the document has several.
    #[arg(long)]
    pub block: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check that a differential kernel's row shift is a derivation.
    VerifyKernel(Target),
    /// Check a dd-kernel: base commutation, δ-shift, a-side split and σ-shift.
    VerifyDd(Target),
    /// Leader classification of a kernel or dd-kernel.
    Classify {
        #[command(flatten)]
        target: Target,
        /// Prolong a differential kernel to this length and probe its columns.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Leader classification of a difference kernel and the L_n bound.
    ClassifyDiff(Target),
    /// Prolong a differential kernel.
    Prolong {
        #[command(flatten)]
        target: Target,
        /// Rows to add.
        #[arg(long)]
        steps: usize,
        /// Print the prolonged kernel as a document.
        #[arg(long)]
        emit: bool,
    },
    /// δ-prolong a dd-kernel.
    DdProlong {
        #[command(flatten)]
        target: Target,
        /// Rows to add.
        #[arg(long)]
        steps: usize,
        /// Depth bound M on leaders.
        #[arg(long = "M", default_value_t = 0)]
        m: usize,
        #[arg(long)]
        emit: bool,
    },
    /// Rewrite a dd-kernel with s > 1 as one with s = 1.
    Linearize(Target),
    /// Evaluate a hypotheses block against its dd-kernel.
    CheckHypotheses(Target),
    /// Realize a dd-kernel up to L_(R,S); `--block` names the hypotheses.
    Realize {
        #[command(flatten)]
        target: Target,
        /// `R,S`
        #[arg(long, value_parser = parse_pair)]
        to: (usize, usize),
        #[arg(long)]
        emit: bool,
    },
    /// Generator-level commutation of a derivation and an endomorphism.
    CommuteCheck {
        file: String,
        /// Derivation name; defaults to the first declared.
        #[arg(long)]
        delta: Option<String>,
        /// Endomorphism name; defaults to the first declared.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Adjoin a σ-preimage with its derivatives.
    AdjoinPreimage(Target),
    /// Adjoin p-th roots of constants with a truncated tower of derivatives.
    PerfectExtend(Target),
    /// Evaluate the p-th root map on an element.
    RMap {
        file: String,
        /// Element expression over the document's tower.
        #[arg(long)]
        elem: String,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Run the bundled example suite.
    Examples,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected R,S")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Parses arguments, runs the command and renders the report.
pub fn run_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (e.render().to_string(), code);
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    match execute(&cli.command, &echo.join(" ")) {
        Ok(mut rep) => {
            rep.elapsed_ms = start.elapsed().as_millis();
            let out = if cli.json { rep.render_json(cli.timing) } else { rep.render_text(cli.timing) };
            (out, rep.exit_code())
        }
        Err(e) => (format!("error: {e}\n"), 2),
    }
}

pub fn load(file: &str) -> Result<String, CliError> {
    if let Some(name) = file.strip_prefix("suite:") {
        return suite::document(name)
            .map(str::to_string)
            .ok_or_else(|| CliError::Usage(format!("no bundled document `{name}`")));
    }
    let read = if file == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(file)
    };
    read.map_err(|e| CliError::Io { path: file.into(), reason: e.to_string() })
}

fn model(file: &str) -> Result<Model, CliError> {
    Ok(Model::parse(&load(file)?)?)
}

pub fn execute(cmd: &Command, echo: &str) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new(echo);
    match cmd {
        Command::VerifyKernel(t) => verify_kernel(&mut rep, t)?,
        Command::VerifyDd(t) => verify_dd(&mut rep, t)?,
        Command::Classify { target, depth } => classify(&mut rep, target, *depth)?,
        Command::ClassifyDiff(t) => classify_diff(&mut rep, t)?,
        Command::Prolong { target, steps, emit } => prolong(&mut rep, target, *steps, *emit)?,
        Command::DdProlong { target, steps, m, emit } => dd_prolong(&mut rep, target, *steps, *m, *emit)?,
        Command::Linearize(t) => linearize_cmd(&mut rep, t)?,
        Command::CheckHypotheses(t) => check_hypotheses(&mut rep, t)?,
        Command::Realize { target, to, emit } => realize(&mut rep, target, *to, *emit)?,
        Command::CommuteCheck { file, delta, sigma } => commute(&mut rep, file, delta.as_deref(), sigma.as_deref())?,
        Command::AdjoinPreimage(t) => adjoin_preimage(&mut rep, t)?,
        Command::PerfectExtend(t) => perfect_extend(&mut rep, t)?,
        Command::RMap { file, elem, delta } => rmap(&mut rep, file, elem, delta.as_deref())?,
        Command::Examples => suite::run_examples(&mut rep),
    }
    Ok(rep)
}

fn slot_line(p: &Presentation, k: usize) -> String {
    format!("{} {}", p.name(k), p.describe(k))
}

/// Each new slot with its value and the rule that produced it.
fn log_lines(k: &DDKernel, log: &RealizeLog) -> Vec<String> {
    let p = k.presentation();
    log.entries
        .iter()
        .map(|(n, c)| match p.names().iter().position(|x| x == n) {
            Some(j) => format!("{} ({c})", slot_line(p, j)),
            None => format!("{n} ({c})"),
        })
        .collect()
}

fn tag_name(t: LeaderTag) -> &'static str {
    match t {
        LeaderTag::NonLeader => "non-leader",
        LeaderTag::Separable => "separable",
        LeaderTag::Inseparable => "inseparable",
    }
}

fn leader_line(e: &LeaderEntry) -> String {
    format!("{}: {}{}", e.name, tag_name(e.tag), if e.minimal { ", minimal" } else { "" })
}

fn dd_leader_line(e: &DDLeaderEntry) -> String {
    format!("{}: {}{}", e.name, tag_name(e.tag), if e.minimal { ", minimal" } else { "" })
}

fn add_violations(rep: &mut RunReport, vs: &[Violation], t: &Tower) {
    for v in vs {
        let (left, right) = match (&v.image, &v.expected) {
            (Some(i), Some(e)) => (t.display(i), t.display(e)),
            _ => (t.display(&v.residual), "0".into()),
        };
        rep.witness(&v.generator, &format!("{} relation", v.operator), left, right);
    }
}

fn add_commutation(rep: &mut RunReport, c: &CommutationReport, t: &Tower) {
    for v in &c.violations {
        rep.witness(&v.symbol, "delta(sigma) vs sigma(delta)", t.display(&v.delta_sigma), t.display(&v.sigma_delta));
    }
}

fn count(n: usize, what: &str) -> String {
    match n {
        0 => format!("no {what}s"),
        1 => format!("1 {what}"),
        _ => format!("{n} {what}s"),
    }
}

fn verify_kernel(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let b = m.kernel_block(t.block.as_deref())?;
    let (d, pres) = m.kernel_parts(b)?;
    let base = d.violations().map_err(BuildError::from)?;
    rep.verdict("base derivation is well defined", base.is_empty(), count(base.len(), "violation"));
    let bad = kernel_violations(&d, &pres).map_err(BuildError::from)?;
    rep.verdict(format!("{} is a differential kernel", b.name), bad.is_empty(), count(bad.len(), "violation"));
    add_violations(rep, &base, d.codomain());
    add_violations(rep, &bad, pres.tower());
    rep.section("slots", (0..pres.len()).map(|k| slot_line(&pres, k)).collect());
    Ok(())
}

fn report_dd_check(rep: &mut RunReport, r: &DDVerifyReport, t: &Tower) {
    let c = &r.base_commutation;
    rep.verdict("base operators commute", c.ok(), count(c.violations.len(), "violation"));
    rep.verdict("delta-shift is a derivation", r.delta.is_empty(), count(r.delta.len(), "violation"));
    rep.verdict("a-side is presented over itself", r.unsplit.is_empty(), r.unsplit.join(", "));
    rep.verdict("sigma-shift is a homomorphism", r.sigma.is_empty(), count(r.sigma.len(), "violation"));
    add_commutation(rep, c, t);
    add_violations(rep, &r.delta, t);
    add_violations(rep, &r.sigma, t);
}

fn verify_dd(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let p = m.ddkernel_parts(m.ddkernel_block(t.block.as_deref())?)?;
    let r = dd_check(&p.delta, &p.sigma, p.n, p.s, &p.pres).map_err(BuildError::from)?;
    report_dd_check(rep, &r, p.pres.tower());
    rep.section("slots", (0..p.pres.len()).map(|k| slot_line(&p.pres, k)).collect());
    Ok(())
}

/// The dd-kernel of a block, or a failing verdict when it does not verify.
fn dd_or_verdict(rep: &mut RunReport, m: &Model, block: Option<&str>) -> Result<Option<DDKernel>, CliError> {
    match m.ddkernel(block) {
        Ok(k) => Ok(Some(k)),
        Err(BuildError::DD(DDError::Invalid(v))) => {
            rep.verdict("dd-kernel verifies", false, v.join("; "));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn dd_sections(rep: &mut RunReport, r: &DDLeaderReport) {
    rep.section("leaders", r.plain.iter().map(dd_leader_line).collect());
    rep.section("a-leaders", r.a_side.iter().map(dd_leader_line).collect());
    rep.section("b-leaders", r.b_side.iter().map(dd_leader_line).collect());
}

fn classify(rep: &mut RunReport, t: &Target, depth: Option<usize>) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let is_kernel = match t.block.as_deref() {
        Some(name) => m.kernel_block(Some(name)).is_ok(),
        None => m.kernel_block(None).is_ok(),
    };
    if !is_kernel {
        if depth.is_some() {
            return Err(CliError::Usage("--depth applies to differential kernels".into()));
        }
        let Some(k) = dd_or_verdict(rep, &m, t.block.as_deref())? else { return Ok(()) };
        rep.verdict("dd-kernel verifies", true, "");
        dd_sections(rep, &dd_classify(&k));
        return Ok(());
    }
    let k = match m.kernel(t.block.as_deref()) {
        Ok(k) => k,
        Err(BuildError::Kernel(KernelError::Invalid(v))) => {
            rep.verdict("kernel verifies", false, v.join("; "));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    rep.verdict("kernel verifies", true, "");
    let r = classify_leaders(&k);
    rep.section("leaders", r.entries.iter().map(leader_line).collect());
    if let Some(depth) = depth {
        match finiteness_probe(&k, depth) {
            Ok((_, probe)) => {
                let lines = probe
                    .columns
                    .iter()
                    .map(|c| match c.first_separable {
                        Some(f) => format!(
                            "column {}: first separable leader at row {f}, {} elements above, {}",
                            c.i,
                            c.elements_above,
                            if c.stable { "stable" } else { "not stable" }
                        ),
                        None => format!("column {}: no separable leader up to row {}", c.i, probe.depth),
                    })
                    .collect();
                rep.section(format!("probe to row {}", probe.depth), lines);
                let ins: Vec<String> = probe.inseparable_by_row.iter().map(|n| n.to_string()).collect();
                rep.section("inseparable leaders in L_0, L_1, ...", vec![ins.join(", ")]);
                rep.verdict("columns stable under prolongation", probe.columns.iter().all(|c| c.stable), "");
            }
            Err(e) => rep.verdict("prolongation", false, e.to_string()),
        }
    }
    Ok(())
}

fn depths(entries: &[LeaderEntry], keep: impl Fn(&LeaderEntry) -> bool) -> String {
    let set: BTreeSet<usize> = entries.iter().filter(|e| keep(e)).map(|e| e.xi).collect();
    if set.is_empty() {
        return "none".into();
    }
    set.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
}

fn classify_diff(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let d = m.difference(t.block.as_deref())?;
    let r = difference_leader_classify(&d).map_err(BuildError::from)?;
    rep.section("leaders", r.entries.iter().map(leader_line).collect());
    let mut facts = vec![
        format!("inseparable leader depths: {}", depths(&r.entries, |e| e.tag == LeaderTag::Inseparable)),
        format!("minimal separable leader depths: {}", depths(&r.entries, |e| e.minimal)),
        format!(
            "max minimal separable depth: {}",
            r.max_minimal_depth.map_or("none".into(), |d| d.to_string())
        ),
        format!("transcendental slots: {}", r.transcendental),
        format!("sigma(a) algebraic over K(a): {}", if r.algebraic_step { "yes" } else { "no" }),
    ];
    match &r.inseparability_witness {
        Some(w) => facts.push(format!("L/K is inseparable: {w}")),
        None => facts.push("no inseparability witness".into()),
    }
    rep.section("summary", facts);
    rep.verdict("sigma-shift is a homomorphism", r.sigma_violations.is_empty(), r.sigma_violations.join("; "));
    let bound = format!(
        "n = {}, max minimal separable depth = {}{}",
        r.n,
        r.max_minimal_depth.map_or("none".into(), |d| d.to_string()),
        if r.bound_tight { ", met with equality" } else { "" }
    );
    rep.verdict("L_n bound on minimal separable leaders", r.bound_ok, bound);
    if r.asserted_separable == Some(true) {
        rep.verdict("separability claim is consistent", !r.contradiction(), "");
    }
    Ok(())
}

/// Replaces the block named `name` in `doc` by `item`.
fn replace_block(doc: &Document, name: &str, item: Item) -> Document {
    let mut out = doc.clone();
    for it in &mut out.items {
        let hit = match it {
            Item::Kernel(b) => b.name == name,
            Item::DDKernel(b) => b.name == name,
            _ => false,
        };
        if hit {
            *it = item.clone();
        }
    }
    out
}

fn prolong(rep: &mut RunReport, t: &Target, steps: usize, emit: bool) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let b = m.kernel_block(t.block.as_deref())?;
    let k = match m.kernel(Some(&b.name)) {
        Ok(k) => k,
        Err(BuildError::Kernel(KernelError::Invalid(v))) => {
            rep.verdict("kernel verifies", false, v.join("; "));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let big = match kernel_prolong(&k, steps) {
        Ok(big) => big,
        Err(e) => {
            rep.verdict("prolongation", false, e.to_string());
            return Ok(());
        }
    };
    let p = big.presentation();
    rep.section("new slots", (k.presentation().len()..p.len()).map(|j| slot_line(p, j)).collect());
    rep.verdict("prolonged kernel verifies", true, format!("r = {}", big.r()));
    let (a, z) = (classify_leaders(&k), classify_leaders(&big));
    let same = a.minimal_separable() == z.minimal_separable() && a.inseparable() == z.inseparable();
    rep.verdict("leader sets stable", same, "");
    if emit {
        let doc = replace_block(&m.doc, &b.name, Item::Kernel(emit_kernel(&big, &b.name, &b.delta)));
        rep.emitted = Some(print_document(&doc));
    }
    Ok(())
}

fn leader_sets(k: &DDKernel) -> Vec<BTreeSet<(usize, usize, usize)>> {
    let r = dd_classify(k);
    vec![
        r.minimal_separable(),
        r.inseparable(),
        r.a_minimal_separable(),
        r.a_inseparable(),
        r.b_minimal_separable(),
        r.b_inseparable(),
    ]
}

fn recheck(rep: &mut RunReport, k: &DDKernel) -> Result<(), CliError> {
    let r = dd_check(k.base_delta(), k.base_sigma(), k.n(), k.s(), k.presentation()).map_err(BuildError::from)?;
    rep.verdict("result re-verifies", r.ok(), r.describe(k.tower()).join("; "));
    let c = k.commutation().map_err(BuildError::from)?;
    rep.verdict("generator-level commutation", c.ok(), count(c.violations.len(), "violation"));
    add_commutation(rep, &c, k.tower());
    Ok(())
}

fn emit_dd(m: &Model, name: &str, k: &DDKernel) -> Result<String, CliError> {
    let b = m.ddkernel_block(Some(name))?;
    let doc = replace_block(&m.doc, name, Item::DDKernel(emit_ddkernel(k, name, &b.delta, &b.sigma)));
    Ok(print_document(&doc))
}

fn dd_prolong(rep: &mut RunReport, t: &Target, steps: usize, m_level: usize, emit: bool) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let name = m.ddkernel_block(t.block.as_deref())?.name.clone();
    let Some(k) = dd_or_verdict(rep, &m, Some(&name))? else { return Ok(()) };
    match dd_prolong_delta(&k, steps, m_level) {
        Ok((big, log)) => {
            rep.section("new slots", log_lines(&big, &log));
            recheck(rep, &big)?;
            rep.verdict("leader sets invariant", leader_sets(&k) == leader_sets(&big), "");
            if emit {
                rep.emitted = Some(emit_dd(&m, &name, &big)?);
            }
        }
        Err(e) => rep.verdict("delta-prolongation", false, e.to_string()),
    }
    Ok(())
}

fn linearize_cmd(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let Some(k) = dd_or_verdict(rep, &m, t.block.as_deref())? else { return Ok(()) };
    match linearize(&k) {
        Ok(lin) => {
            let lp = lin.kernel.presentation();
            let lines = (0..k.presentation().len())
                .map(|j| format!("{} -> {}", k.presentation().name(j), lp.name(lin.relabel[j])))
                .collect();
            rep.section(format!("relabeling onto n = {}, s = 1", lin.kernel.n()), lines);
            rep.verdict("linearized kernel verifies", true, "");
            match delinearize(&lin.kernel, lin.n, lin.s) {
                Ok(back) => rep.verdict(
                    "relabeling round trip",
                    back.presentation().names() == k.presentation().names(),
                    "",
                ),
                Err(e) => rep.verdict("relabeling round trip", false, e.to_string()),
            }
        }
        Err(e) => rep.verdict("linearization", false, e.to_string()),
    }
    Ok(())
}

fn check_hypotheses(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let hb = m.hypotheses_block(t.block.as_deref())?;
    let Some(k) = dd_or_verdict(rep, &m, Some(&hb.kernel))? else { return Ok(()) };
    let h = m.hypotheses(hb, &k)?;
    let r = dd_hypothesis_check(&k, &h).map_err(BuildError::from)?;
    for v in &r.verdicts {
        rep.verdict(&v.name, v.pass, &v.detail);
    }
    Ok(())
}

fn realize(rep: &mut RunReport, t: &Target, (r, s): (usize, usize), emit: bool) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let hb = m.hypotheses_block(t.block.as_deref())?;
    let Some(k) = dd_or_verdict(rep, &m, Some(&hb.kernel))? else { return Ok(()) };
    let h = m.hypotheses(hb, &k)?;
    let choices = m.choices(&hb.kernel);
    match dd_realize(&k, &h, r, s, &choices) {
        Ok((big, log)) => {
            rep.section("new slots", log_lines(&big, &log));
            recheck(rep, &big)?;
            if emit {
                rep.emitted = Some(emit_dd(&m, &hb.kernel, &big)?);
            }
        }
        Err(DDError::ChoiceRequired { slot, reason }) => rep.verdict(format!("choice at {slot}"), false, reason),
        Err(e) => rep.verdict("realization", false, e.to_string()),
    }
    Ok(())
}

fn first_of(doc: &Document, derivation: bool) -> Option<&str> {
    doc.items.iter().find_map(|i| match i {
        Item::Derivation { name, .. } if derivation => Some(name.as_str()),
        Item::Endomorphism { name, .. } if !derivation => Some(name.as_str()),
        _ => None,
    })
}

fn pick_derivation<'a>(m: &'a Model, name: Option<&str>) -> Result<&'a Derivation, CliError> {
    let name = name.or_else(|| first_of(&m.doc, true)).ok_or_else(|| CliError::Usage("no derivation declared".into()))?;
    Ok(m.derivation(name)?)
}

fn commute(rep: &mut RunReport, file: &str, delta: Option<&str>, sigma: Option<&str>) -> Result<(), CliError> {
    let m = model(file)?;
    let d = pick_derivation(&m, delta)?;
    let sname = sigma.or_else(|| first_of(&m.doc, false)).ok_or_else(|| CliError::Usage("no endomorphism declared".into()))?;
    let s = m.endomorphism(sname)?;
    let dv = d.violations().map_err(BuildError::from)?;
    let sv = s.violations().map_err(BuildError::from)?;
    rep.verdict("derivation is well defined", dv.is_empty(), count(dv.len(), "violation"));
    rep.verdict("endomorphism is well defined", sv.is_empty(), count(sv.len(), "violation"));
    add_violations(rep, &dv, &m.tower);
    add_violations(rep, &sv, &m.tower);
    let c = commutation_check(d, s).map_err(BuildError::from)?;
    let lines = c.violations.iter().map(|v| describe_commutation(v, &m.tower)).collect();
    rep.section("commutation", lines);
    rep.verdict("delta and sigma commute on generators", c.ok(), format!("checked {}", c.checked.join(", ")));
    add_commutation(rep, &c, &m.tower);
    Ok(())
}

fn construction_failed(rep: &mut RunReport, e: ConstructionError) {
    let name = match &e {
        ConstructionError::PlanInconsistent { .. } => "plan is consistent",
        ConstructionError::NotAConstant { .. } => "plan constants are constants",
        ConstructionError::PRootMissing { .. } => "p-th roots exist",
        ConstructionError::NotCommuting(_) => "input operators commute",
        _ => "construction",
    };
    rep.verdict(name, false, e.to_string());
}

fn extension_sections(rep: &mut RunReport, ext: &kolchin::constructions::Extension) {
    let t = &ext.tower;
    let lines = ext
        .generators
        .iter()
        .map(|g| {
            let v = t.index_of(g).expect("generators are tower variables");
            let rel = t.display_minpoly(v).map_or("transcendental".into(), |f| format!("root of {f}"));
            let d = if v < ext.delta.domain().nvars() { t.display(ext.delta.image(v)) } else { "(open)".into() };
            format!("{g}: {rel}; delta({g}) = {d}; sigma({g}) = {}", t.display(ext.sigma.image(v)))
        })
        .collect();
    rep.section("generators", lines);
}

fn adjoin_preimage(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let b = m.preimage_block(t.block.as_deref())?;
    let (d, s, plan) = m.preimage(b)?;
    match adjoin_sigma_preimage(&d, &s, &plan) {
        Ok(ext) => {
            rep.verdict("plan is consistent", true, if ext.degenerate { "the witness already lies in K" } else { "" });
            extension_sections(rep, &ext);
            let et = &ext.tower;
            let mut target = et.normal_form(&plan.b);
            let mut bad = Vec::new();
            for (n, g) in ext.generators.iter().enumerate() {
                let v = et.index_of(g).expect("generator");
                if ext.sigma.image(v) != &target {
                    bad.push(format!("sigma({g}) = {}, expected {}", et.display(ext.sigma.image(v)), et.display(&target)));
                }
                if n + 1 < ext.generators.len() {
                    target = ext.delta.apply(&target).map_err(BuildError::from)?;
                }
            }
            rep.verdict("sigma(c[n]) = delta^n(b)", bad.is_empty(), bad.join("; "));
            rep.verdict("generator-level commutation", ext.commutation.ok(), format!("skipped {}", ext.commutation.skipped.join(", ")));
            add_commutation(rep, &ext.commutation, et);
        }
        Err(e) => construction_failed(rep, e),
    }
    Ok(())
}

fn perfect_extend(rep: &mut RunReport, t: &Target) -> Result<(), CliError> {
    let m = model(&t.file)?;
    let b = m.perfect_block(t.block.as_deref())?;
    let (d, s, cs) = m.perfect(b)?;
    match diffperfect_truncated(&d, &s, &cs, b.depth) {
        Ok(ext) => {
            extension_sections(rep, &ext);
            let et = &ext.tower;
            let p = et.characteristic();
            for c in &cs {
                let c = et.normal_form(c);
                match r_map(&ext.delta, &c) {
                    Ok(root) => {
                        let ok = et.pow(&root, p) == c;
                        rep.verdict(format!("r-map at {}", et.display(&c)), ok, format!("root {}", et.display(&root)));
                    }
                    Err(e) => rep.verdict(format!("r-map at {}", et.display(&c)), false, e.to_string()),
                }
            }
            rep.verdict("generator-level commutation", ext.commutation.ok(), format!("skipped {}", ext.commutation.skipped.join(", ")));
            add_commutation(rep, &ext.commutation, et);
        }
        Err(e) => construction_failed(rep, e),
    }
    Ok(())
}

fn rmap(rep: &mut RunReport, file: &str, elem: &str, delta: Option<&str>) -> Result<(), CliError> {
    let m = model(file)?;
    let d = pick_derivation(&m, delta)?;
    let e = parse_expr(elem).map_err(BuildError::from)?;
    let e = eval(&m.tower, &e)?;
    match r_map(d, &e) {
        Ok(root) => {
            rep.section("r-map", vec![format!("r({}) = {}", m.tower.display(&e), m.tower.display(&root))]);
            rep.verdict("r-map defined", true, "");
        }
        Err(err) => rep.verdict("r-map defined", false, err.to_string()),
    }
    Ok(())
}
