//! Command-line driver for reproducible experiments: transforms, decay
//! classification, the mode-by-mode solver, gauge conjugation checks, and
//! the exact small-divisor reports, all steered by one declarative JSON
//! config plus flag overrides.
//!
//! Every run is deterministic given (config, seed): repeated invocations
//! write byte-identical files.  Exit codes: 0 success; 2 the right-hand
//! side fails a compatibility condition (no periodic solution exists);
//! 3 a precision target or exact certification could not be met; 1 any
//! other failure (I/O, malformed config or input).

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use partial_fourier::classify::{
    classify_full, classify_partial_smooth, DecayReport, SmoothnessReport,
};
use partial_fourier::conjugation::{gauge_growth_check, psi, verify_intertwine, GaugeSign};
use partial_fourier::diophantine::{
    demo_nonsolvable, divisor_floor, divisor_values, witnesses, write_demo_csv, write_witnesses,
    A0Class, DivisorFloor,
};
use partial_fourier::repr::HalfInt;
use partial_fourier::solver::{
    project_into_compatible, solve, CoefficientA, ObstructionPolicy, SolverConfig,
};
use partial_fourier::su2::{haar_quadrature, WignerTable};
use partial_fourier::transform::{
    analyze_full, analyze_partial, l2_norm, random_full_coeff, random_partial_field,
    read_coefficients, synthesize, synthesize_partial, write_coefficients, write_decay_csv,
    CoeffBlock, FullCoeff, PartialCoeffField, TimeGrid,
};
use partial_fourier::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pfourier",
    version,
    about = "Partial Fourier analysis on the circle-sphere product",
    after_help = "Exit codes: 0 success, 2 incompatible right-hand side, \
                  3 precision or certification failure, 1 other errors."
)]
struct Cli {
    /// JSON run configuration; defaults apply for every omitted field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the configured time grid size.
    #[arg(long, global = true)]
    n_t: Option<usize>,

    /// Override the configured doubled spin cutoff.
    #[arg(long, global = true)]
    two_ell_max: Option<u64>,

    /// Override the configured time frequency band.
    #[arg(long, global = true)]
    tau_max: Option<i64>,

    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyze/synthesize round trip and emit coefficient files.
    Transform {
        /// Coefficient JSON to transform; a seeded random field otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Classify coefficient decay (smooth-type vs distribution-type).
    Classify {
        /// Coefficient JSON to classify; a seeded random field otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Solve the evolution equation mode by mode.
    Solve {
        /// Right-hand side as coefficient JSON; a seeded random field otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Project the data onto the solvable set before solving.
        #[arg(long)]
        project: bool,
    },
    /// Check the gauge conjugation: intertwining, inversion, phase growth.
    Conjugate,
    /// Exact small-divisor certificates for the configured mean.
    Diophantine {
        /// Largest witness exponent to certify (Liouville means only).
        #[arg(long, default_value_t = 4)]
        max_exponent: u32,
    },
    /// Pair near-resonant data magnitudes against forced solution magnitudes.
    DemoNonsolvable {
        /// Largest witness exponent in the table.
        #[arg(long, default_value_t = 4)]
        max_exponent: u32,
    },
}

/// Precision targets, overridable per run.  Values are relative to the
/// natural scale of each check (data supremum, unit solution, ...).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Tolerances {
    /// Transform round trips, relative to the data supremum.
    round_trip: f64,
    /// Obstruction integral size accepted as compatible, relative to 1 + sup|f|.
    compat_rel: f64,
    /// Mode-equation residual accepted after solving, relative to 1 + sup|f|.
    residual_rel: f64,
    /// Intertwining defect, relative to 1 + sup|u|.
    intertwine: f64,
    /// Smallest coefficient block kept in output files, relative to the
    /// largest block.  Drops pure quadrature roundoff without touching any
    /// honestly resolved mode.
    retain_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            round_trip: 1e-8,
            compat_rel: 1e-9,
            residual_rel: 1e-6,
            intertwine: 1e-7,
            retain_rel: 1e-12,
        }
    }
}

/// The trigonometric coefficient of the evolution operator: exact mean
/// class plus cosine/sine amplitudes (index k is the frequency k+1).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffSpec {
    a0: A0Class,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl Default for CoeffSpec {
    fn default() -> Self {
        // a(t) = 1 + cos t: resonant at every integer row label, so the
        // compatibility machinery is exercised out of the box.
        CoeffSpec {
            a0: A0Class::integer(1),
            cos: vec![1.0],
            sin: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    /// Doubled spin cutoff: 2l_max.
    two_ell_max: u64,
    /// Uniform time grid size.
    n_t: usize,
    /// Time frequency band of generated or accepted data.
    tau_max: i64,
    /// Grid refinement factor used by the solver's working grid.
    upsample: usize,
    seed: u64,
    tolerances: Tolerances,
    a: CoeffSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            two_ell_max: 4,
            n_t: 17,
            tau_max: 3,
            upsample: 4,
            seed: 7,
            tolerances: Tolerances::default(),
            a: CoeffSpec::default(),
        }
    }
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<RunConfig> {
        let cfg = match path {
            Some(p) => serde_json::from_reader(BufReader::new(File::open(p)?))?,
            None => RunConfig::default(),
        };
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.tau_max < 0 {
            return Err(Error::BadData("tau_max must be nonnegative".into()));
        }
        if (self.n_t as i64) < 2 * self.tau_max + 1 {
            return Err(Error::BadData(format!(
                "n_t = {} cannot hold the band |tau| <= {}; need n_t >= {}",
                self.n_t,
                self.tau_max,
                2 * self.tau_max + 1
            )));
        }
        if self.upsample == 0 {
            return Err(Error::BadData("upsample must be at least 1".into()));
        }
        Ok(())
    }

    fn ell_max(&self) -> HalfInt {
        HalfInt::from_twice(self.two_ell_max)
    }

    fn coefficient(&self) -> Result<CoefficientA> {
        CoefficientA::new(self.a.a0.clone(), self.a.cos.clone(), self.a.sin.clone())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            // Exit 2 is reserved for incompatible data; argument mistakes are 1.
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::NoSolution { .. } => 2,
        Error::Certification(_) | Error::SpinCap { .. } | Error::QuadratureOrder(_) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n_t) = cli.n_t {
        cfg.n_t = n_t;
    }
    if let Some(two_ell) = cli.two_ell_max {
        cfg.two_ell_max = two_ell;
    }
    if let Some(tau) = cli.tau_max {
        cfg.tau_max = tau;
    }
    cfg.validate()?;
    fs::create_dir_all(&cli.out_dir)?;
    write_json(&cli.out_dir.join("config_used.json"), &cfg)?;

    match &cli.cmd {
        Command::Transform { input } => cmd_transform(&cfg, input.as_deref(), &cli.out_dir),
        Command::Classify { input } => cmd_classify(&cfg, input.as_deref(), &cli.out_dir),
        Command::Solve { input, project } => {
            cmd_solve(&cfg, input.as_deref(), *project, &cli.out_dir)
        }
        Command::Conjugate => cmd_conjugate(&cfg, &cli.out_dir),
        Command::Diophantine { max_exponent } => {
            cmd_diophantine(&cfg, *max_exponent, &cli.out_dir)
        }
        Command::DemoNonsolvable { max_exponent } => {
            cmd_demo(&cfg, *max_exponent, &cli.out_dir)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads a coefficient file and rejects content beyond the configured bands;
/// everything downstream assumes the grid resolves the data.
fn read_input_coefficients(path: &Path, cfg: &RunConfig) -> Result<FullCoeff> {
    let fc = read_coefficients(BufReader::new(File::open(path)?))?;
    for (key, _) in fc.iter() {
        let tau = key.tau_small().ok_or_else(|| {
            Error::BadData(format!("input mode tau = {} is out of dense range", key.tau))
        })?;
        let ell = key.ell_small().ok_or_else(|| {
            Error::BadData(format!("input mode 2l = {} is out of dense range", key.two_ell))
        })?;
        if tau.abs() > cfg.tau_max || ell.twice() > cfg.two_ell_max {
            return Err(Error::BadData(format!(
                "input mode (tau = {tau}, 2l = {}) exceeds the configured bands \
                 |tau| <= {}, 2l <= {}",
                ell.twice(),
                cfg.tau_max,
                cfg.two_ell_max
            )));
        }
    }
    Ok(fc)
}

/// Entrywise supremum distance between dense coefficient sets, over the
/// union of their modes.
fn coeff_sup_distance(a: &FullCoeff, b: &FullCoeff) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut seen: Vec<&partial_fourier::transform::ModeIndex> = Vec::new();
    for (key, block) in a.iter().chain(b.iter()) {
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let _ = block;
        let (tau, ell) = match (key.tau_small(), key.ell_small()) {
            (Some(t), Some(l)) => (t, l),
            _ => {
                return Err(Error::BadData(
                    "sparse counterexample modes have no dense distance".into(),
                ))
            }
        };
        let d = ell.dim();
        let lhs = a.get_dense(tau, ell);
        let rhs = b.get_dense(tau, ell);
        for i in 0..d {
            for j in 0..d {
                let x = lhs.map_or(Complex64::new(0.0, 0.0), |m| m[[i, j]]);
                let y = rhs.map_or(Complex64::new(0.0, 0.0), |m| m[[i, j]]);
                worst = worst.max((x - y).norm());
            }
        }
    }
    Ok(worst)
}

/// Copy of a coefficient set without blocks that are pure roundoff: keeps
/// every block whose norm is at least `rel` times the largest one.  A
/// constant field survives as its single constant mode.
fn prune_coefficients(fc: &FullCoeff, rel: f64) -> Result<FullCoeff> {
    let largest = fc.iter().map(|(_, b)| b.hs_norm()).fold(0.0, f64::max);
    let mut out = FullCoeff::new();
    for (key, block) in fc.iter() {
        if block.hs_norm() < rel * largest {
            continue;
        }
        match block {
            CoeffBlock::Dense(mat) => {
                let (Some(tau), Some(ell)) = (key.tau_small(), key.ell_small()) else {
                    return Err(Error::BadData("dense block at an oversized mode".into()));
                };
                out.insert_dense(tau, ell, mat.clone())?;
            }
            CoeffBlock::Single { two_m, two_n, value } => {
                out.insert_single(key.clone(), two_m.clone(), two_n.clone(), *value)?;
            }
        }
    }
    Ok(out)
}

fn coeff_sup(fc: &FullCoeff) -> f64 {
    fc.iter()
        .map(|(_, block)| match block {
            CoeffBlock::Dense(m) => m.iter().map(|z| z.norm()).fold(0.0, f64::max),
            CoeffBlock::Single { value, .. } => value.norm(),
        })
        .fold(0.0, f64::max)
}

fn field_sup_distance(a: &PartialCoeffField, b: &PartialCoeffField) -> f64 {
    let mut worst = 0.0f64;
    for ell in a.spins() {
        let (Some(x), Some(y)) = (a.block(ell), b.block(ell)) else { continue };
        for (p, q) in x.iter().zip(y.iter()) {
            worst = worst.max((p - q).norm());
        }
    }
    worst
}

/// Smooth deterministic magnitude profile for generated test data.
fn smooth_profile(tau: i64, ell: HalfInt) -> f64 {
    let l = ell.twice() as f64 / 2.0;
    (-(tau * tau) as f64 / 8.0 - l * (l + 1.0) / 4.0).exp()
}

#[derive(Serialize)]
struct TransformReport {
    n_t: usize,
    two_ell_max: u64,
    tau_max: i64,
    quadrature_nodes: usize,
    l2_norm: f64,
    plancherel_sum: f64,
    plancherel_rel_defect: f64,
    /// analyze(synthesize(coefficients)) against the input coefficients.
    coeff_round_trip_rel: f64,
    /// synthesize(analyze(samples)) against the input samples.
    field_round_trip_rel: f64,
    retained_modes: usize,
}

fn cmd_transform(cfg: &RunConfig, input: Option<&Path>, out_dir: &Path) -> Result<u8> {
    let grid = TimeGrid::new(cfg.n_t)?;
    let ell_max = cfg.ell_max();
    let fc0 = match input {
        Some(path) => read_input_coefficients(path, cfg)?,
        None => random_full_coeff(cfg.seed, ell_max, cfg.tau_max, smooth_profile),
    };
    let quad = haar_quadrature(ell_max);
    let table = WignerTable::build(&quad, ell_max)?;

    let pc0 = synthesize_partial(&fc0, grid)?;
    let sampled = synthesize(&pc0, &quad, &table)?;
    let pc1 = analyze_partial(&sampled, &quad, &table, ell_max)?;
    let fc1 = analyze_full(&pc1, cfg.tau_max)?;
    let resampled = synthesize(&pc1, &quad, &table)?;

    let scale = coeff_sup(&fc0).max(f64::MIN_POSITIVE);
    let coeff_rel = coeff_sup_distance(&fc0, &fc1)? / scale;
    let field_scale = sampled
        .values
        .iter()
        .map(|z| z.norm())
        .fold(f64::MIN_POSITIVE, f64::max);
    let field_rel = (&sampled.values - &resampled.values)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        / field_scale;

    let norm = l2_norm(&sampled, &quad);
    let plancherel = fc1.plancherel_sum();
    let plancherel_rel = (norm * norm - plancherel).abs() / (norm * norm).max(f64::MIN_POSITIVE);

    let retained = prune_coefficients(&fc1, cfg.tolerances.retain_rel)?;
    write_coefficients(
        BufWriter::new(File::create(out_dir.join("coefficients.json"))?),
        &retained,
    )?;
    write_decay_csv(BufWriter::new(File::create(out_dir.join("decay.csv"))?), &retained)?;
    let report = TransformReport {
        n_t: cfg.n_t,
        two_ell_max: cfg.two_ell_max,
        tau_max: cfg.tau_max,
        quadrature_nodes: quad.nodes.len(),
        l2_norm: norm,
        plancherel_sum: plancherel,
        plancherel_rel_defect: plancherel_rel,
        coeff_round_trip_rel: coeff_rel,
        field_round_trip_rel: field_rel,
        retained_modes: retained.len(),
    };
    write_json(&out_dir.join("transform_report.json"), &report)?;

    println!("retained modes: {}", report.retained_modes);
    println!("round trip (coefficients): {:.3e} relative", coeff_rel);
    println!("round trip (samples):      {:.3e} relative", field_rel);
    println!("plancherel defect:         {:.3e} relative", plancherel_rel);
    let tol = cfg.tolerances.round_trip;
    if coeff_rel > tol || field_rel > tol || plancherel_rel > tol {
        eprintln!("round trip exceeded the configured tolerance {tol:.1e}");
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct ClassifyReport {
    full: DecayReport,
    partial: SmoothnessReport,
}

fn cmd_classify(cfg: &RunConfig, input: Option<&Path>, out_dir: &Path) -> Result<u8> {
    let grid = TimeGrid::new(cfg.n_t)?;
    let fc = match input {
        Some(path) => read_input_coefficients(path, cfg)?,
        None => random_full_coeff(cfg.seed, cfg.ell_max(), cfg.tau_max, smooth_profile),
    };
    let full = classify_full(&fc, 4)?;
    let pc = synthesize_partial(&fc, grid)?;
    let partial = classify_partial_smooth(&pc, 2, 4)?;

    println!("doubly transformed verdict: {:?}", full.verdict);
    println!("sphere-side joint verdict:  {:?}", partial.verdict);
    let report = ClassifyReport { full, partial };
    write_json(&out_dir.join("classify_report.json"), &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct RowLabel {
    two_ell: u64,
    twice_m: i64,
}

#[derive(Serialize)]
struct SkipRecord {
    two_ell: u64,
    twice_m: i64,
    twice_n: i64,
    obstruction: f64,
}

#[derive(Serialize)]
struct SolveReport {
    projected: bool,
    adjusted_entries: usize,
    resonant_rows: Vec<RowLabel>,
    skipped: Vec<SkipRecord>,
    rhs_sup: f64,
    residual_sup: f64,
    residual_tolerance: f64,
    work_n_t: usize,
}

fn cmd_solve(cfg: &RunConfig, input: Option<&Path>, project: bool, out_dir: &Path) -> Result<u8> {
    let grid = TimeGrid::new(cfg.n_t)?;
    let ell_max = cfg.ell_max();
    let a = cfg.coefficient()?;
    let f = match input {
        Some(path) => synthesize_partial(&read_input_coefficients(path, cfg)?, grid)?,
        None => random_partial_field(cfg.seed, cfg.n_t, ell_max, cfg.tau_max)?,
    };

    let (rhs, adjusted, work_upsample) = if project {
        let (projected, adjusted) = project_into_compatible(&a, &f, cfg.upsample)?;
        (projected, adjusted, 1)
    } else {
        (f, 0, cfg.upsample)
    };
    let solver_cfg = SolverConfig {
        upsample: work_upsample,
        compat_rel_tol: cfg.tolerances.compat_rel,
        on_obstruction: ObstructionPolicy::Error,
    };
    // An incompatible right-hand side surfaces here as exit code 2.
    let outcome = solve(&a, &rhs, &solver_cfg)?;

    let work_n_t = outcome.solution.grid().n_t();
    let out_band = (work_n_t as i64 - 1) / 2;
    let solution_fc = analyze_full(&outcome.solution, out_band)?;
    write_coefficients(
        BufWriter::new(File::create(out_dir.join("solution_coefficients.json"))?),
        &solution_fc,
    )?;

    let tol = cfg.tolerances.residual_rel * (1.0 + outcome.rhs_sup);
    let report = SolveReport {
        projected: project,
        adjusted_entries: adjusted,
        resonant_rows: outcome
            .resonant_rows
            .iter()
            .map(|(ell, m)| RowLabel { two_ell: ell.twice(), twice_m: *m })
            .collect(),
        skipped: outcome
            .skipped
            .iter()
            .map(|s| SkipRecord {
                two_ell: s.ell.twice(),
                twice_m: s.twice_m,
                twice_n: s.twice_n,
                obstruction: s.obstruction,
            })
            .collect(),
        rhs_sup: outcome.rhs_sup,
        residual_sup: outcome.residual_sup,
        residual_tolerance: tol,
        work_n_t,
    };
    write_json(&out_dir.join("solve_report.json"), &report)?;

    println!(
        "resonant rows: {}, adjusted entries: {}",
        report.resonant_rows.len(),
        report.adjusted_entries
    );
    println!("mode-equation residual: {:.3e} (tolerance {:.3e})", outcome.residual_sup, tol);
    if outcome.residual_sup > tol {
        eprintln!("residual exceeded the configured tolerance");
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct GrowthRecord {
    alpha: u32,
    exponent: f64,
    sups: Vec<(i64, f64)>,
}

#[derive(Serialize)]
struct ConjugateReport {
    intertwine_residual: f64,
    intertwine_tolerance: f64,
    inverse_error: f64,
    growth: Vec<GrowthRecord>,
}

fn cmd_conjugate(cfg: &RunConfig, out_dir: &Path) -> Result<u8> {
    let a = cfg.coefficient()?;
    let u = random_partial_field(cfg.seed, cfg.n_t, cfg.ell_max(), cfg.tau_max)?;

    let residual = verify_intertwine(&a, &u)?;
    let tol = cfg.tolerances.intertwine * (1.0 + u.max_abs());
    let back = psi(&a, &psi(&a, &u, GaugeSign::Plus), GaugeSign::Minus);
    let inverse_error = field_sup_distance(&u, &back);

    // The phase is constant when a has no fluctuation; growth in the row
    // label is only defined against a nontrivial primitive.
    let growth = if a.degree() == 0 {
        Vec::new()
    } else {
        gauge_growth_check(&a, 3, &[8, 16, 32, 64])?
            .into_iter()
            .map(|g| GrowthRecord { alpha: g.alpha, exponent: g.exponent, sups: g.sups })
            .collect()
    };

    println!("intertwining residual: {:.3e} (tolerance {:.3e})", residual, tol);
    println!("gauge inversion error: {:.3e}", inverse_error);
    for g in &growth {
        println!("phase derivative order {}: fitted exponent {:.4}", g.alpha, g.exponent);
    }
    let report = ConjugateReport {
        intertwine_residual: residual,
        intertwine_tolerance: tol,
        inverse_error,
        growth,
    };
    write_json(&out_dir.join("conjugate_report.json"), &report)?;
    if residual > tol {
        eprintln!("intertwining residual exceeded the configured tolerance");
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct DiophantineReport {
    mean: A0Class,
    /// Exact floor over integer row labels (even doubled labels), rationals only.
    integer_label_floor: Option<DivisorFloor>,
    /// Exact floor admitting half-integer row labels too, rationals only.
    any_label_floor: Option<DivisorFloor>,
    /// Empirical divisor magnitudes for non-rational means.
    empirical: Vec<(i64, f64)>,
    witness_count: usize,
}

fn cmd_diophantine(cfg: &RunConfig, max_exponent: u32, out_dir: &Path) -> Result<u8> {
    let a0 = cfg.a.a0.clone();
    let mut report = DiophantineReport {
        mean: a0.clone(),
        integer_label_floor: None,
        any_label_floor: None,
        empirical: Vec::new(),
        witness_count: 0,
    };

    match &a0 {
        A0Class::Rational { q, .. } => {
            let period = 2 * (*q as i64);
            report.integer_label_floor =
                Some(divisor_floor(&a0, (1..=period).map(|m| 2 * m))?);
            report.any_label_floor = Some(divisor_floor(&a0, 1..=2 * period)?);
            let floor = report.integer_label_floor.as_ref().map(|f| f.minimum);
            println!("integer-label divisor floor: {:.12}", floor.unwrap_or(f64::NAN));
        }
        A0Class::Liouville { .. } => {
            let series = a0.series().expect("liouville mean carries its series");
            // Certification failures surface here as exit code 3.
            let list = witnesses(series, max_exponent)?;
            write_witnesses(
                BufWriter::new(File::create(out_dir.join("witnesses.json"))?),
                &list,
            )?;
            report.witness_count = list.len();
            for w in &list {
                println!(
                    "witness exponent {}: certified at truncation level {} \
                     ({} lower levels rejected)",
                    w.exponent,
                    w.level,
                    w.rejected_levels.len()
                );
            }
        }
        A0Class::NonLiouville { .. } => {
            report.empirical = divisor_values(&a0, 1..=64);
            let min = report
                .empirical
                .iter()
                .map(|(_, v)| *v)
                .fold(f64::INFINITY, f64::min);
            println!("empirical divisor minimum over |2m| <= 64: {min:.6e}");
        }
    }
    write_json(&out_dir.join("diophantine_report.json"), &report)?;
    Ok(0)
}

fn cmd_demo(cfg: &RunConfig, max_exponent: u32, out_dir: &Path) -> Result<u8> {
    let report = demo_nonsolvable(&cfg.a.a0, max_exponent)?;
    write_demo_csv(BufWriter::new(File::create(out_dir.join("demo.csv"))?), &report)?;
    write_json(&out_dir.join("demo_report.json"), &report)?;

    println!("{}", report.a0_description);
    for row in &report.rows {
        println!(
            "exponent {}: data magnitude 1e{:.1} vs forced solution magnitude {} \
             (bound 1e{:.1}, certified: {})",
            row.exponent, row.rhs_log10, row.solution_magnitude, row.bound_log10, row.certified
        );
    }
    if report.rows.iter().any(|r| !r.certified) {
        eprintln!("a witness failed exact certification");
        return Ok(3);
    }
    Ok(0)
}
