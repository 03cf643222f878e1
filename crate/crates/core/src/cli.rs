//! Command dispatch for the `pstnet` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use crate::bus::{
    compatibility_check, design_subset_bus, occupation_bound, verify_schedule, Design,
    DesignMethod, DEFAULT_BRANCH_BOUND, DEFAULT_SEARCH_BOUND,
};
use crate::config::{parse_config, NetworkConfig};
use crate::permutation::validate_logical_set;
use crate::spectral::{
    build_hamiltonian, group_eigenvalues, uniform_grid, EvolutionTrace, PstHamiltonian,
};
use crate::spin::to_xy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Cycle structure, eigenvalue classes and logical-set check.
    Decompose,
    /// Integer spectrum for the configured schedule.
    Design,
    /// Occupation probabilities from the source over a time grid, as CSV.
    Simulate,
    /// Fidelity at every scheduled stop and the permutation at tau.
    Verify,
    /// Cross-cycle leakage bounds, with sampled maxima when x is complete.
    Bound,
    /// Whether U(tau/2) and U(tau) share a generating Hamiltonian.
    Compat,
    /// XY coupling table.
    ExportSpin,
}

#[derive(Debug, Parser)]
#[command(
    name = "pstnet",
    version,
    about = "Perfect state transfer on bus networks"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
    pub search_bound: i64,
    #[arg(long, default_value_t = DEFAULT_BRANCH_BOUND)]
    pub branch_bound: i64,
}

/// Flags other than the command and config.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub search_bound: Option<i64>,
    pub branch_bound: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailed => 1,
        }
    }
}

/// Exit status for configuration and usage errors.
pub const USAGE_ERROR: i32 = 2;

pub fn format_trace_csv(trace: &EvolutionTrace) -> String {
    let d = trace.d();
    let mut s = String::from("t");
    for m in 0..d {
        write!(s, ",P_{m}").unwrap();
    }
    s.push('\n');
    for (t, row) in trace.times.iter().zip(&trace.probabilities) {
        write!(s, "{t:.9}").unwrap();
        for p in row {
            write!(s, ",{:.9}", p.clamp(0.0, 1.0)).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn write_trace_csv(trace: &EvolutionTrace, path: &Path) -> io::Result<()> {
    fs::write(path, format_trace_csv(trace))
}

fn hamiltonian(cfg: &NetworkConfig) -> Result<PstHamiltonian> {
    build_hamiltonian(&cfg.permutation, &cfg.spec()).context("building the Hamiltonian")
}

fn emit(text: &str, dest: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing output"),
    }
}

pub fn run(
    cmd: Command,
    cfg: &NetworkConfig,
    opts: &Options,
    stdout: &mut dyn Write,
) -> Result<Outcome> {
    match cmd {
        Command::Decompose => decompose(cfg, stdout),
        Command::Design => design(cfg, opts, stdout),
        Command::Simulate => simulate(cfg, opts, stdout),
        Command::Verify => verify(cfg, stdout),
        Command::Bound => bound(cfg, opts, stdout),
        Command::Compat => compat(cfg, opts, stdout),
        Command::ExportSpin => {
            let model = to_xy(&hamiltonian(cfg)?);
            emit(&model.to_string(), opts.out.as_deref(), stdout)?;
            Ok(Outcome::Success)
        }
    }
}

fn decompose(cfg: &NetworkConfig, out: &mut dyn Write) -> Result<Outcome> {
    let p = &cfg.permutation;
    writeln!(out, "permutation: {}", p.cycle_notation())?;
    for (i, c) in p.cycles().iter().enumerate() {
        writeln!(out, "cycle {}: {} size {}", i + 1, c, c.len())?;
    }
    writeln!(out, "eigenvalue classes:")?;
    for class in group_eigenvalues(p.cycles()) {
        writeln!(
            out,
            "  phase {}: multiplicity {}",
            class.phase,
            class.multiplicity()
        )?;
    }
    if cfg.logical.is_empty() {
        return Ok(Outcome::Success);
    }
    match validate_logical_set(p, &cfg.logical) {
        Ok(()) => {
            writeln!(out, "logical set: ok")?;
            Ok(Outcome::Success)
        }
        Err(e) => {
            writeln!(out, "logical set: {e}")?;
            Ok(Outcome::VerificationFailed)
        }
    }
}

fn design(cfg: &NetworkConfig, opts: &Options, out: &mut dyn Write) -> Result<Outcome> {
    let Some(schedule) = cfg.transfer_schedule() else {
        bail!("design needs at least two logical nodes");
    };
    let bound = opts.search_bound.unwrap_or(DEFAULT_SEARCH_BOUND);
    match design_subset_bus(&cfg.permutation, &schedule, bound)? {
        Design::Feasible { spec, method } => {
            let mut designed = cfg.clone();
            designed.set_spec(&spec);
            let label = match method {
                DesignMethod::CycleBus => "cycle bus",
                DesignMethod::BoxSearch => "box search",
            };
            let text = format!("# designed by {label}\n{designed}");
            emit(&text, opts.out.as_deref(), out)?;
            if opts.out.is_some() {
                writeln!(out, "design found by {label}")?;
            }
            Ok(Outcome::Success)
        }
        Design::Infeasible(report) => {
            writeln!(out, "infeasible: {report}")?;
            Ok(Outcome::VerificationFailed)
        }
    }
}

fn simulate(cfg: &NetworkConfig, opts: &Options, out: &mut dyn Write) -> Result<Outcome> {
    let h = hamiltonian(cfg)?;
    let grid = opts.grid.unwrap_or(cfg.grid);
    if grid == 0 {
        bail!("grid must be at least 1");
    }
    let trace = h.occupation_probabilities(cfg.source(), &uniform_grid(cfg.tau, grid))?;
    let dest = opts
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    emit(&format_trace_csv(&trace), dest.as_deref(), out)?;
    Ok(Outcome::Success)
}

fn verify(cfg: &NetworkConfig, out: &mut dyn Write) -> Result<Outcome> {
    let h = hamiltonian(cfg)?;
    let mut ok = true;
    if let Some(schedule) = cfg.transfer_schedule() {
        for (j, r) in verify_schedule(&h, &schedule)?.iter().enumerate() {
            let exact = match r.exact {
                Some(true) => "exact: aligned",
                Some(false) => "exact: not aligned",
                None => "exact: n/a",
            };
            let status = if r.passed() { "ok" } else { "FAILED" };
            writeln!(
                out,
                "stop {}: {}: fidelity {:.9} ({exact}) {status}",
                j + 1,
                r.stop,
                r.magnitude
            )?;
            if !r.passed() {
                ok = false;
            }
        }
    }
    let perm = h.verify_permutation(&cfg.permutation)?;
    writeln!(
        out,
        "U(tau) realises {}: {}",
        cfg.permutation.cycle_notation(),
        if perm { "ok" } else { "FAILED" }
    )?;
    ok &= perm;
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

fn bound(cfg: &NetworkConfig, opts: &Options, out: &mut dyn Write) -> Result<Outcome> {
    let p = &cfg.permutation;
    let source = cfg.source();
    let home = p.cycle_containing(source);
    let h = build_hamiltonian(p, &cfg.spec()).ok();
    let trace = match &h {
        Some(h) => Some(h.occupation_probabilities(
            source,
            &uniform_grid(cfg.tau, opts.grid.unwrap_or(cfg.grid)),
        )?),
        None => None,
    };
    let mut ok = true;
    for c in p.cycles().iter().filter(|c| !c.contains(source)) {
        let b = occupation_bound(home.len(), c.len());
        write!(out, "{home} -> {c}: bound {} ({:.9})", b.exact, b.bound())?;
        if let Some(trace) = &trace {
            let worst = c
                .members()
                .iter()
                .map(|&m| trace.max_at(m))
                .fold(0.0, f64::max);
            let held = worst <= b.bound() + 1e-9;
            ok &= held;
            write!(
                out,
                ", sampled max {worst:.9} {}",
                if held { "ok" } else { "EXCEEDED" }
            )?;
        }
        writeln!(out)?;
    }
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

fn compat(cfg: &NetworkConfig, opts: &Options, out: &mut dyn Write) -> Result<Outcome> {
    let h = hamiltonian(cfg)?;
    let (t1, t2) = (cfg.tau / 2.0, cfg.tau);
    let verdict = compatibility_check(
        &h.evolution_operator(t1),
        t1,
        &h.evolution_operator(t2),
        t2,
        opts.branch_bound.unwrap_or(DEFAULT_BRANCH_BOUND),
    )?;
    match (&verdict.common, &verdict.reason) {
        (Some(common), _) => {
            writeln!(
                out,
                "compatible: U(tau/2) and U(tau) share a generating Hamiltonian"
            )?;
            let mut energies = common.energies.clone();
            energies.sort_by(f64::total_cmp);
            let list: Vec<String> = energies.iter().map(|e| format!("{e:.9}")).collect();
            writeln!(out, "energies: {}", list.join(" "))?;
            Ok(Outcome::Success)
        }
        (None, reason) => {
            let reason = reason.as_ref().map(ToString::to_string).unwrap_or_default();
            writeln!(out, "incompatible: {reason}")?;
            Ok(Outcome::VerificationFailed)
        }
    }
}

/// Full binary behaviour; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE_ERROR } else { 0 };
        }
    };
    let cfg = match fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))
        .and_then(|text| parse_config(&text).map_err(anyhow::Error::from))
    {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return USAGE_ERROR;
        }
    };
    let opts = Options {
        out: args.out,
        grid: args.grid,
        search_bound: Some(args.search_bound),
        branch_bound: Some(args.branch_bound),
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(args.command, &cfg, &opts, &mut lock) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            USAGE_ERROR
        }
    }
}
