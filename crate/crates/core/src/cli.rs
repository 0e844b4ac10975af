//! Command implementations behind the `steerkit` binary.
//!
//! Each `cmd_*` function takes parsed arguments and returns the bytes it
//! would print, plus whether anything was left indeterminate; [`run`] turns
//! that into output and an exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::expsim::{
    analyze_counts, run_experiment, CountsSidecar, CountsTable, DetectorConfig,
    ExperimentOptions, ImbalanceModel, LpSettingsSpec, SamplerConfig, TomographyResult,
    DEFAULT_ALPHA, DEFAULT_FRAMES, DEFAULT_VARIATIONS,
};
use crate::qmat::read_density_json;
use crate::states::{bowles_one_way_predicate, family_state, FamilyParams, ThetaFamilyParams};
use crate::steering::{
    classify_with, critical_radius_bracket_with, fibonacci_mesh, region_scan_with, unit_grid,
    write_region_csv, Direction, DirectionMesh, DirectionVerdict, HierarchyLabel, LpSettings,
    RadiusBracket, Verdict, DEFAULT_BISECTION_STEPS,
};
use crate::{DensityMatrix, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub const THREADS_ENV: &str = "STEERKIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "steerkit", version, about = "Certified one-way EPR steering for two-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Two-sided critical radius bracket for one steering direction.
    Radius(RadiusArgs),
    /// Steering-hierarchy verdict with certificates.
    Classify(ClassifyArgs),
    /// Verdicts over a (p, r) grid of the biased family, as CSV.
    Region(RegionArgs),
    /// Animation sampling, counts, tomography and certification.
    Simulate(SimulateArgs),
    /// Reconstruct and classify a counts table.
    #[command(visible_alias = "certify-file")]
    Tomo(TomoArgs),
    /// One-way predicate of the θ-family on a grid, as CSV.
    Bowles(BowlesArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Number of Alice measurement axes (3 to 16).
    #[arg(long, default_value_t = 12)]
    pub mesh: usize,
    /// LP feasibility tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_BISECTION_STEPS)]
    pub bisection_steps: usize,
    /// Pivot cap per LP solve.
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, 0 for one per core. STEERKIT_THREADS takes precedence.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write the primary output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit with code 3 if anything is left indeterminate.
    #[arg(long)]
    pub strict: bool,
    /// Skip density-matrix validation of input files.
    #[arg(long)]
    pub no_validate: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(3..=16).contains(&self.mesh) {
            return Err(Error::ParamOutOfRange(format!("mesh {} not in [3, 16]", self.mesh)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("tol {} must be positive", self.tol)));
        }
        Ok(())
    }

    fn mesh(&self) -> Result<DirectionMesh> {
        fibonacci_mesh(self.mesh)
    }

    fn lp_spec(&self) -> LpSettingsSpec {
        LpSettingsSpec {
            feasibility_tol: self.tol,
            max_iterations: self.max_iterations,
        }
    }

    fn lp(&self) -> LpSettings {
        self.lp_spec().settings()
    }
}

#[derive(Args, Debug)]
pub struct RadiusArgs {
    /// Density-matrix JSON (`dim`, `re`, `im`).
    pub state_file: Option<PathBuf>,
    #[arg(long, default_value = "atob")]
    pub direction: Direction,
    /// Use the biased family member `p,r` instead of a file.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<FamilyParams>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    pub state_file: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<FamilyParams>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 21)]
    pub p_steps: usize,
    #[arg(long, default_value_t = 21)]
    pub r_steps: usize,
    /// Suppress progress on stderr.
    #[arg(long)]
    pub quiet: bool,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Imbalance {
    Calibrated,
    EntangledRate,
}

impl From<Imbalance> for ImbalanceModel {
    fn from(v: Imbalance) -> Self {
        match v {
            Imbalance::Calibrated => ImbalanceModel::Calibrated,
            Imbalance::EntangledRate => ImbalanceModel::EntangledRate,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.36875)]
    pub p_ipt: f64,
    #[arg(long, default_value_t = 0.95)]
    pub r_ipt: f64,
    /// Entangled-to-product photon-rate ratio.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_FRAMES)]
    pub frames: usize,
    /// Per-frame exposure in seconds.
    #[arg(long, default_value_t = 0.02)]
    pub exposure: f64,
    /// Accumulation time per measurement setting, in seconds.
    #[arg(long, default_value_t = 20.0)]
    pub accumulation: f64,
    /// Pair rate before losses, in Hz.
    #[arg(long, default_value_t = 1.0e4)]
    pub rate: f64,
    #[arg(long, default_value_t = 0.172)]
    pub efficiency: f64,
    #[arg(long, default_value_t = DEFAULT_VARIATIONS)]
    pub variations: usize,
    #[arg(long, value_enum, default_value_t = Imbalance::Calibrated)]
    pub imbalance: Imbalance,
    /// Bracket both directions for every bootstrap resample too.
    #[arg(long)]
    pub resample_brackets: bool,
    /// Also write the simulated counts CSV (and its JSON sidecar) here.
    #[arg(long)]
    pub dump_counts: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Args, Debug)]
pub struct TomoArgs {
    /// `outcome_a,outcome_b,counts` CSV with all 36 pairs.
    pub counts_csv: PathBuf,
    /// Sidecar JSON; defaults to the CSV path with a `.json` extension.
    pub sidecar_json: Option<PathBuf>,
    /// Reference family member `p,r` for the fidelity; defaults to the
    /// retrieved parameters.
    #[arg(long, value_parser = parse_family)]
    pub target: Option<FamilyParams>,
    #[arg(long, default_value_t = DEFAULT_VARIATIONS)]
    pub variations: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Args, Debug)]
pub struct BowlesArgs {
    #[arg(long, default_value_t = 21)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = 21)]
    pub p_steps: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

/// Parses `p,r`.
pub fn parse_family(s: &str) -> std::result::Result<FamilyParams, String> {
    let (p, r) = s.split_once(',').ok_or("expected p,r")?;
    let p: f64 = p.trim().parse().map_err(|e| format!("p: {e}"))?;
    let r: f64 = r.trim().parse().map_err(|e| format!("r: {e}"))?;
    FamilyParams::new(p, r).map_err(|e| e.to_string())
}

/// Primary output of a command.
pub struct Output {
    pub bytes: Vec<u8>,
    pub indeterminate: bool,
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn load_state(file: Option<&Path>, family: Option<FamilyParams>, validate: bool) -> Result<DensityMatrix> {
    match (file, family) {
        (Some(_), Some(_)) => Err(Error::Parse("give either a state file or --family, not both".into())),
        (Some(f), None) => read_density_json(f, validate),
        (None, Some(fp)) => Ok(family_state(fp)),
        (None, None) => Err(Error::Parse("missing state file (or --family p,r)".into())),
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

fn opt_str(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

pub fn cmd_radius(args: &RadiusArgs) -> Result<Output> {
    let run = &args.run;
    run.validate()?;
    let rho = load_state(args.state_file.as_deref(), args.family, !run.no_validate)?;
    let mesh = run.mesh()?;
    let bracket: RadiusBracket =
        critical_radius_bracket_with(rho.matrix(), args.direction, &mesh, run.bisection_steps, &run.lp())?;
    let indeterminate = bracket.indeterminate_probes > 0;
    let bytes = match run.format.unwrap_or(Format::Json) {
        Format::Json => {
            // full evidence plus the flat summary fields
            let s = bracket.summary();
            let mut v = serde_json::to_value(&bracket)?;
            v["lhs_residual"] = serde_json::json!(s.lhs_residual);
            v["certificate_margin"] = serde_json::json!(s.certificate_margin);
            json(&v)?
        }
        Format::Csv => {
            let s = bracket.summary();
            csv_bytes(
                &["direction", "lo", "hi", "eta", "mesh_size"],
                vec![vec![
                    s.direction.to_string(),
                    s.lo.to_string(),
                    opt_str(s.hi),
                    s.eta.to_string(),
                    s.mesh_size.to_string(),
                ]],
            )?
        }
    };
    Ok(Output { bytes, indeterminate })
}

fn verdict_indeterminate(v: &Verdict) -> bool {
    v.label == HierarchyLabel::Indeterminate
        || v.steerable_ab == DirectionVerdict::Indeterminate
        || v.steerable_ba == DirectionVerdict::Indeterminate
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Output> {
    let run = &args.run;
    run.validate()?;
    let rho = load_state(args.state_file.as_deref(), args.family, !run.no_validate)?;
    let verdict = classify_with(&rho, &run.mesh()?, &run.lp())?;
    let bytes = match run.format.unwrap_or(Format::Json) {
        Format::Json => json(&verdict)?,
        Format::Csv => csv_bytes(
            &["verdict_ab", "verdict_ba", "label"],
            vec![vec![
                verdict.steerable_ab.csv_token().into(),
                verdict.steerable_ba.csv_token().into(),
                verdict.label.name().into(),
            ]],
        )?,
    };
    Ok(Output {
        indeterminate: verdict_indeterminate(&verdict),
        bytes,
    })
}

pub fn cmd_region(args: &RegionArgs) -> Result<Output> {
    let run = &args.run;
    run.validate()?;
    let total = args.p_steps * args.r_steps;
    let quiet = args.quiet;
    let cells = region_scan_with(
        &unit_grid(args.p_steps),
        &unit_grid(args.r_steps),
        &run.mesh()?,
        &run.lp(),
        |done| {
            if !quiet {
                eprint!("\r{done}/{total} cells");
                if done == total {
                    eprintln!();
                }
            }
        },
    )?;
    let indeterminate = cells.iter().any(|c| {
        c.label == HierarchyLabel::Indeterminate
            || c.verdict_ab == DirectionVerdict::Indeterminate
            || c.verdict_ba == DirectionVerdict::Indeterminate
    });
    let bytes = match run.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_region_csv(&cells, &mut buf)?;
            buf
        }
        Format::Json => json(&cells)?,
    };
    Ok(Output { bytes, indeterminate })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Output> {
    let run = &args.run;
    run.validate()?;
    let cfg = SamplerConfig {
        p_ipt: args.p_ipt,
        r_ipt: args.r_ipt,
        alpha: args.alpha,
        frames: args.frames,
        exposure_s: args.exposure,
        accumulation_s: args.accumulation,
        seed: run.seed,
    };
    let opts = ExperimentOptions {
        detector: DetectorConfig {
            rate_hz: args.rate,
            efficiency: args.efficiency,
            crosstalk: None,
        },
        imbalance: args.imbalance.into(),
        variations: args.variations,
        bisection_steps: run.bisection_steps,
        resample_brackets: args.resample_brackets,
        lp: run.lp_spec(),
    };
    let report = run_experiment(&cfg, &run.mesh()?, &opts)?;
    if let Some(path) = &args.dump_counts {
        report.counts.save(path, cfg.alpha, cfg.seed)?;
    }
    Ok(Output {
        indeterminate: verdict_indeterminate(&report.verdict),
        bytes: json(&report)?,
    })
}

#[derive(Serialize)]
pub struct TomoReport {
    #[serde(flatten)]
    pub tomography: TomographyResult,
    pub sidecar: Option<CountsSidecar>,
    pub verdict: Verdict,
}

pub fn cmd_tomo(args: &TomoArgs) -> Result<Output> {
    let run = &args.run;
    run.validate()?;
    let (counts, sidecar) = match &args.sidecar_json {
        Some(sc) => {
            let sidecar: CountsSidecar = serde_json::from_str(&std::fs::read_to_string(sc)?)?;
            let t = CountsTable::read_csv(std::fs::File::open(&args.counts_csv)?, sidecar.duration_s)?;
            (t, Some(sidecar))
        }
        None => CountsTable::load(&args.counts_csv)?,
    };
    let (rho, tomography) = analyze_counts(&counts, args.target, args.variations, run.seed)?;
    let verdict = classify_with(&rho, &run.mesh()?, &run.lp())?;
    Ok(Output {
        indeterminate: verdict_indeterminate(&verdict),
        bytes: json(&TomoReport {
            tomography,
            sidecar,
            verdict,
        })?,
    })
}

/// `(θ, p, predicted)` with θ on `[0, π/4]` outermost and p on `[0, 1]`.
pub fn bowles_grid(theta_steps: usize, p_steps: usize) -> Result<Vec<(f64, f64, bool)>> {
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut out = Vec::with_capacity(theta_steps * p_steps);
    for t in unit_grid(theta_steps) {
        for p in unit_grid(p_steps) {
            let theta = t * quarter;
            out.push((theta, p, bowles_one_way_predicate(ThetaFamilyParams::new(theta, p)?)));
        }
    }
    Ok(out)
}

pub fn cmd_bowles(args: &BowlesArgs) -> Result<Output> {
    let grid = bowles_grid(args.theta_steps, args.p_steps)?;
    let bytes = match args.run.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_bytes(
            &["theta", "p", "predicted"],
            grid.iter()
                .map(|(t, p, b)| vec![t.to_string(), p.to_string(), b.to_string()])
                .collect(),
        )?,
        Format::Json => {
            #[derive(Serialize)]
            struct Cell {
                theta: f64,
                p: f64,
                predicted: bool,
            }
            let cells: Vec<Cell> = grid
                .into_iter()
                .map(|(theta, p, predicted)| Cell { theta, p, predicted })
                .collect();
            json(&cells)?
        }
    };
    Ok(Output {
        bytes,
        indeterminate: false,
    })
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::IterationLimit(_) | Error::NotFound => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn run_config(cmd: &Command) -> &RunConfig {
    match cmd {
        Command::Radius(a) => &a.run,
        Command::Classify(a) => &a.run,
        Command::Region(a) => &a.run,
        Command::Simulate(a) => &a.run,
        Command::Tomo(a) => &a.run,
        Command::Bowles(a) => &a.run,
    }
}

fn thread_count(flag: usize) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(flag),
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Radius(a) => cmd_radius(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Region(a) => cmd_region(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::Bowles(a) => cmd_bowles(a),
    }
}

fn run_inner(cli: &Cli) -> Result<i32> {
    let run = run_config(&cli.command);
    let threads = thread_count(run.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parse(e.to_string()))?;
    let out = pool.install(|| execute(cli))?;
    match &run.output {
        Some(path) => std::fs::write(path, &out.bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&out.bytes)?;
            stdout.flush()?;
        }
    }
    Ok(if run.strict && out.indeterminate {
        EXIT_INDETERMINATE
    } else {
        EXIT_OK
    })
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run_inner(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
