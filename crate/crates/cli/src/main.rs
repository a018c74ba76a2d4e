// composite-fading: tabulate, sweep, validate, and sample the kappa-mu/gamma and
// kappa-mu Extreme/gamma composite distributions. Plot-data emission only; point
// the CSVs at whatever plotting tool you like.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use composite_fading::base_models::GammaShadowParams;
use composite_fading::composite::{
    composite_envelope_pdf_numeric, kappa_mu_gamma_envelope_pdf_series,
    kmu_extreme_gamma_envelope_pdf_series, Compounding, CompositeSpec, MultipathModel,
    SeriesConfig, SeriesMode,
};
use composite_fading::quadrature::QuadConfig;
use composite_fading::validation::{run_invariant_suite, sample_composite, CheckKind, SuiteConfig};

const QUAD_TOL_ENV: &str = "COMPOSITE_FADING_QUAD_TOL";

#[derive(Parser)]
#[command(
    name = "composite-fading",
    version,
    about = "pdf tables, figure sweeps, validation suite, and samplers for composite fading models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the composite pdf on an x grid: numeric oracle vs series
    Pdf(PdfArgs),
    /// Emit one CSV (or JSON) per swept parameter value plus a manifest
    Sweep(SweepArgs),
    /// Run the invariant suite and print a machine-readable report
    Validate(ValidateArgs),
    /// Draw envelope samples, one per line
    Sample(SampleArgs),
    /// Quick validation pass (alias of `validate --quick`)
    Selfcheck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    KmuGamma,
    KmuExtremeGamma,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompoundingArg {
    RootMeanSquare,
    MeanSquare,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Renormalized,
    Literal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Dominant-to-scattered power ratio (kmu-gamma)
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Cluster number, real-valued (kmu-gamma)
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Extreme-model severity parameter (kmu-extreme-gamma)
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Gamma shadowing shape
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Gamma shadowing scale
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    /// How the gamma draw maps to the conditional rms envelope
    #[arg(long, value_enum, default_value = "root-mean-square")]
    compounding: CompoundingArg,
}

#[derive(Args)]
struct SeriesArgs {
    /// Series expansion order (terms l = 0..=n)
    #[arg(long, default_value_t = 30)]
    series_n: u32,
    /// Series coefficient basis
    #[arg(long, value_enum, default_value = "renormalized")]
    mode: ModeArg,
}

#[derive(Args)]
struct PdfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation grid start:stop:count
    #[arg(long, value_parser = parse_grid, default_value = "0:4:81")]
    x: XGrid,
    #[command(flatten)]
    series: SeriesArgs,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Captioned parameter set to reproduce
    #[arg(long, value_enum)]
    preset: Preset,
    /// Override the swept kappa values (fig1)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    kappa_values: Option<Vec<f64>>,
    /// Override the swept mu values (fig2)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mu_values: Option<Vec<f64>>,
    /// Override the swept m values (fig3)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    m_values: Option<Vec<f64>>,
    /// Evaluation grid start:stop:count
    #[arg(long, value_parser = parse_grid, default_value = "0:4:81")]
    x: XGrid,
    #[command(flatten)]
    series: SeriesArgs,
    /// Per-curve file format; the manifest is always JSON
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Directory for curve files and manifest
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Thinner grids and smaller Monte Carlo runs
    #[arg(long)]
    quick: bool,
    /// Seed for the goodness-of-fit sampling stages
    #[arg(long)]
    seed: Option<u64>,
    /// CI self-test: tighten one budget so the suite must fail
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of draws
    #[arg(long, allow_negative_numbers = true)]
    count: i64,
    /// RNG seed; identical seeds give identical output bytes
    #[arg(long)]
    seed: u64,
    /// Write samples here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy)]
struct XGrid {
    start: f64,
    stop: f64,
    count: usize,
}

impl XGrid {
    fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        let mut xs: Vec<f64> = (0..self.count)
            .map(|i| self.start + i as f64 * step)
            .collect();
        *xs.last_mut().expect("count >= 2") = self.stop;
        xs
    }
}

fn parse_grid(s: &str) -> Result<XGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("x grid must be start:stop:count".into());
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| "x grid start must be a number".to_string())?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| "x grid stop must be a number".to_string())?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| "x grid count must be an integer".to_string())?;
    if count < 2 {
        return Err("x grid count must be at least 2".into());
    }
    if !start.is_finite() || start < 0.0 {
        return Err("x grid start must be nonnegative".into());
    }
    if !stop.is_finite() || stop <= start {
        return Err("x grid stop must be greater than start".into());
    }
    Ok(XGrid { start, stop, count })
}

enum CliError {
    /// Bad parameters or environment: exit 2
    Usage(String),
    /// A check or computation failed: exit 1
    Failure(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let quad = quad_config_from_env()?;
    match cli.cmd {
        Cmd::Pdf(args) => cmd_pdf(args, &quad),
        Cmd::Sweep(args) => cmd_sweep(args, &quad),
        Cmd::Validate(args) => cmd_validate(args.quick, args.seed, args.inject_fault, &quad),
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::Selfcheck => cmd_validate(true, None, false, &quad),
    }
}

fn quad_config_from_env() -> Result<QuadConfig, CliError> {
    let mut cfg = QuadConfig::default();
    if let Ok(raw) = std::env::var(QUAD_TOL_ENV) {
        let tol: f64 = raw
            .parse()
            .map_err(|_| CliError::Usage(format!("{QUAD_TOL_ENV} must be a number")))?;
        if !tol.is_finite() || tol <= 0.0 {
            return Err(CliError::Usage(format!("{QUAD_TOL_ENV} must be positive")));
        }
        cfg.rel_tol = tol;
    }
    Ok(cfg)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive")))
    }
}

fn build_spec(args: &ModelArgs) -> Result<CompositeSpec, CliError> {
    let multipath = match args.model {
        ModelKind::KmuGamma => {
            let kappa = args
                .kappa
                .ok_or_else(|| CliError::Usage("--kappa is required for kmu-gamma".into()))?;
            let mu = args
                .mu
                .ok_or_else(|| CliError::Usage("--mu is required for kmu-gamma".into()))?;
            if args.m.is_some() {
                return Err(CliError::Usage("--m does not apply to kmu-gamma".into()));
            }
            MultipathModel::KappaMu {
                kappa: positive("kappa", kappa)?,
                mu: positive("mu", mu)?,
            }
        }
        ModelKind::KmuExtremeGamma => {
            let m = args
                .m
                .ok_or_else(|| CliError::Usage("--m is required for kmu-extreme-gamma".into()))?;
            if args.kappa.is_some() || args.mu.is_some() {
                return Err(CliError::Usage(
                    "--kappa/--mu do not apply to kmu-extreme-gamma".into(),
                ));
            }
            MultipathModel::KappaMuExtreme {
                m: positive("m", m)?,
            }
        }
    };
    let shadow = GammaShadowParams::new(positive("b", args.b)?, positive("omega", args.omega)?)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let compounding = match args.compounding {
        CompoundingArg::RootMeanSquare => Compounding::RootMeanSquare,
        CompoundingArg::MeanSquare => Compounding::MeanSquare,
    };
    CompositeSpec::new(multipath, shadow, compounding).map_err(|e| CliError::Usage(e.to_string()))
}

fn series_config(args: &SeriesArgs) -> SeriesConfig {
    SeriesConfig {
        n: args.series_n,
        mode: match args.mode {
            ModeArg::Renormalized => SeriesMode::Renormalized,
            ModeArg::Literal => SeriesMode::Literal,
        },
    }
}

// --- pdf/sweep row computation ---

#[derive(Clone, Copy, Serialize)]
struct Row {
    x: f64,
    #[serde(serialize_with = "nan_as_null")]
    pdf_numeric: f64,
    #[serde(serialize_with = "nan_as_null")]
    pdf_series: f64,
    #[serde(serialize_with = "nan_as_null")]
    abs_diff: f64,
}

fn nan_as_null<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_nan() {
        s.serialize_none()
    } else {
        s.serialize_f64(*v)
    }
}

// Continuous parts only; the Extreme atom is a property of the distribution, not
// of any grid point, and is reported by `validate` instead.
fn row_at(x: f64, spec: &CompositeSpec, sc: SeriesConfig, quad: &QuadConfig) -> Result<Row, String> {
    let numeric = if x == 0.0 {
        // mu < 1/2 diverges at the origin; report NaN rather than failing the table
        composite_envelope_pdf_numeric(x, spec, quad)
            .map(|d| d.continuous)
            .unwrap_or(f64::NAN)
    } else {
        composite_envelope_pdf_numeric(x, spec, quad)
            .map(|d| d.continuous)
            .map_err(|e| format!("numeric pdf at x = {x}: {e}"))?
    };
    let series = if x == 0.0 {
        series_limit_at_zero(spec)
    } else {
        match spec.multipath() {
            MultipathModel::KappaMu { .. } => kappa_mu_gamma_envelope_pdf_series(x, spec, sc)
                .map_err(|e| format!("series pdf at x = {x}: {e}"))?,
            MultipathModel::KappaMuExtreme { .. } => {
                kmu_extreme_gamma_envelope_pdf_series(x, spec, sc)
                    .map_err(|e| format!("series pdf at x = {x}: {e}"))?
                    .continuous
            }
        }
    };
    Ok(Row {
        x,
        pdf_numeric: numeric,
        pdf_series: series,
        abs_diff: (numeric - series).abs(),
    })
}

// x -> 0 limit of the series sum: every term behaves like x^(2b-1) or better for
// the high-l tail, and the lead term like x^(2 min(mu, b) - 1) (kappa-mu) or
// x^(2b-1) (Extreme). Zero when the governing exponent is positive, divergent
// otherwise (NaN stands in for +inf in the table).
fn series_limit_at_zero(spec: &CompositeSpec) -> f64 {
    let b = spec.shadow().b();
    let governing = match spec.multipath() {
        MultipathModel::KappaMu { mu, .. } => mu.min(b),
        MultipathModel::KappaMuExtreme { .. } => b,
    };
    if governing > 0.5 {
        0.0
    } else {
        f64::NAN
    }
}

fn tabulate(
    spec: &CompositeSpec,
    sc: SeriesConfig,
    xs: &[f64],
    quad: &QuadConfig,
) -> Result<Vec<Row>, CliError> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .clamp(1, xs.len());
    let chunk = xs.len().div_ceil(workers);
    let mut slots: Vec<Result<Row, String>> = vec![Err(String::new()); xs.len()];
    std::thread::scope(|s| {
        for (xs_chunk, out_chunk) in xs.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            s.spawn(move || {
                for (x, slot) in xs_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = row_at(*x, spec, sc, quad);
                }
            });
        }
    });
    slots
        .into_iter()
        .collect::<Result<Vec<Row>, String>>()
        .map_err(CliError::Failure)
}

fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = String::from("x,pdf_numeric,pdf_series,abs_diff\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig17(r.x),
            fmt_sig17(r.pdf_numeric),
            fmt_sig17(r.pdf_series),
            fmt_sig17(r.abs_diff)
        ));
    }
    out
}

fn rows_to_json(rows: &[Row]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Positional decimal with 17 significant digits: enough to reproduce the f64
/// bit-exactly on parse, and plain enough for any CSV consumer.
fn fmt_sig17(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("always has exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat('0').take(int_len - digits.len()));
            out.push_str(".0");
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-exp - 1) as usize));
        out.push_str(&digits);
    }
    out
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_pdf(args: PdfArgs, quad: &QuadConfig) -> Result<(), CliError> {
    let spec = build_spec(&args.model)?;
    if spec.compounding() != Compounding::RootMeanSquare {
        return Err(CliError::Usage(
            "the series column requires root-mean-square compounding".into(),
        ));
    }
    let rows = tabulate(&spec, series_config(&args.series), &args.x.values(), quad)?;
    write_output(args.output.as_deref(), &rows_to_csv(&rows))
}

// --- sweep ---

struct PresetDef {
    name: &'static str,
    swept_param: &'static str,
    default_values: &'static [f64],
    fixed: &'static [(&'static str, f64)],
    model: ModelKind,
}

// The three captioned parameter sets. The swept parameter is never among the
// fixed ones by construction.
const FIG1: PresetDef = PresetDef {
    name: "fig1",
    swept_param: "kappa",
    default_values: &[1.0, 2.0, 4.0, 8.0],
    fixed: &[("mu", 2.0), ("b", 1.4), ("omega", 1.2)],
    model: ModelKind::KmuGamma,
};
const FIG2: PresetDef = PresetDef {
    name: "fig2",
    swept_param: "mu",
    default_values: &[0.5, 1.0, 2.0, 4.0],
    fixed: &[("kappa", 1.0), ("b", 1.4), ("omega", 1.2)],
    model: ModelKind::KmuGamma,
};
const FIG3: PresetDef = PresetDef {
    name: "fig3",
    swept_param: "m",
    default_values: &[0.5, 1.0, 1.5],
    fixed: &[("b", 1.2), ("omega", 0.8)],
    model: ModelKind::KmuExtremeGamma,
};

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    preset: &'a str,
    model: &'a str,
    compounding: &'a str,
    fixed: serde_json::Map<String, serde_json::Value>,
    swept_param: &'a str,
    swept_values: &'a [f64],
    x_grid: GridJson,
    series_n: u32,
    mode: &'a str,
    quad_rel_tol: f64,
    format: &'a str,
    files: Vec<String>,
}

#[derive(Serialize)]
struct GridJson {
    start: f64,
    stop: f64,
    count: usize,
}

fn cmd_sweep(args: SweepArgs, quad: &QuadConfig) -> Result<(), CliError> {
    let def = match args.preset {
        Preset::Fig1 => &FIG1,
        Preset::Fig2 => &FIG2,
        Preset::Fig3 => &FIG3,
    };
    for (flag, values) in [
        ("kappa", &args.kappa_values),
        ("mu", &args.mu_values),
        ("m", &args.m_values),
    ] {
        if values.is_some() && flag != def.swept_param {
            return Err(CliError::Usage(format!(
                "{} sweeps {}; use --{}-values",
                def.name, def.swept_param, def.swept_param
            )));
        }
    }
    let swept: Vec<f64> = match def.swept_param {
        "kappa" => args.kappa_values.clone(),
        "mu" => args.mu_values.clone(),
        _ => args.m_values.clone(),
    }
    .unwrap_or_else(|| def.default_values.to_vec());
    if swept.is_empty() {
        return Err(CliError::Usage("swept values must be non-empty".into()));
    }
    for &v in &swept {
        positive(def.swept_param, v)?;
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Usage(format!("cannot create {}: {e}", args.out_dir.display()))
    })?;
    let sc = series_config(&args.series);
    let xs = args.x.values();
    let ext = match args.format {
        OutFormat::Csv => "csv",
        OutFormat::Json => "json",
    };

    let mut files = Vec::new();
    for &value in &swept {
        let spec = spec_for_sweep(def, value)?;
        let rows = tabulate(&spec, sc, &xs, quad)?;
        let content = match args.format {
            OutFormat::Csv => rows_to_csv(&rows),
            OutFormat::Json => rows_to_json(&rows),
        };
        let file = format!("{}_{}_{}.{ext}", def.name, def.swept_param, value);
        let path = args.out_dir.join(&file);
        fs::write(&path, content)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        files.push(file);
    }

    let mut fixed = serde_json::Map::new();
    for (k, v) in def.fixed {
        fixed.insert((*k).into(), serde_json::json!(v));
    }
    let manifest = Manifest {
        tool: "composite-fading",
        version: env!("CARGO_PKG_VERSION"),
        preset: def.name,
        model: match def.model {
            ModelKind::KmuGamma => "kmu-gamma",
            ModelKind::KmuExtremeGamma => "kmu-extreme-gamma",
        },
        compounding: "root-mean-square",
        fixed,
        swept_param: def.swept_param,
        swept_values: &swept,
        x_grid: GridJson {
            start: args.x.start,
            stop: args.x.stop,
            count: args.x.count,
        },
        series_n: args.series.series_n,
        mode: match args.series.mode {
            ModeArg::Renormalized => "renormalized",
            ModeArg::Literal => "literal",
        },
        quad_rel_tol: quad.rel_tol,
        format: ext,
        files,
    };
    let path = args.out_dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    fs::write(&path, body)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn spec_for_sweep(def: &PresetDef, swept_value: f64) -> Result<CompositeSpec, CliError> {
    let get = |name: &str| -> Option<f64> {
        if def.swept_param == name {
            Some(swept_value)
        } else {
            def.fixed
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
        }
    };
    let args = ModelArgs {
        model: def.model,
        kappa: get("kappa"),
        mu: get("mu"),
        m: get("m"),
        b: get("b").expect("presets fix b"),
        omega: get("omega").expect("presets fix omega"),
        compounding: CompoundingArg::RootMeanSquare,
    };
    build_spec(&args)
}

// --- validate ---

#[derive(Serialize)]
struct CheckJson {
    name: String,
    kind: &'static str,
    #[serde(serialize_with = "nan_as_null")]
    measured: f64,
    #[serde(serialize_with = "nan_as_null")]
    budget: f64,
    passed: bool,
}

#[derive(Serialize)]
struct Report {
    tool: &'static str,
    version: &'static str,
    quick: bool,
    seed: u64,
    quad_rel_tol: f64,
    checks_total: usize,
    gates_failed: Vec<String>,
    passed: bool,
    checks: Vec<CheckJson>,
}

fn cmd_validate(
    quick: bool,
    seed: Option<u64>,
    inject_fault: bool,
    quad: &QuadConfig,
) -> Result<(), CliError> {
    let defaults = SuiteConfig::default();
    let sc = SuiteConfig {
        quick,
        quad: quad.clone(),
        seed: seed.unwrap_or(defaults.seed),
        inject_fault,
    };
    let results = run_invariant_suite(&sc);
    let gates_failed: Vec<String> = results
        .iter()
        .filter(|r| r.kind == CheckKind::Gate && !r.passed)
        .map(|r| r.name.clone())
        .collect();
    let report = Report {
        tool: "composite-fading",
        version: env!("CARGO_PKG_VERSION"),
        quick,
        seed: sc.seed,
        quad_rel_tol: sc.quad.rel_tol,
        checks_total: results.len(),
        gates_failed: gates_failed.clone(),
        passed: gates_failed.is_empty(),
        checks: results
            .iter()
            .map(|r| CheckJson {
                name: r.name.clone(),
                kind: match r.kind {
                    CheckKind::Gate => "gate",
                    CheckKind::Info => "info",
                },
                measured: r.measured,
                budget: r.budget,
                passed: r.passed,
            })
            .collect(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if let Some(first) = gates_failed.first() {
        return Err(CliError::Failure(format!("failed check: {first}")));
    }
    Ok(())
}

// --- sample ---

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    if args.count <= 0 {
        return Err(CliError::Usage("count must be positive".into()));
    }
    let spec = build_spec(&args.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = String::with_capacity(args.count as usize * 20);
    for _ in 0..args.count {
        out.push_str(&fmt_sig17(sample_composite(&spec, &mut rng)));
        out.push('\n');
    }
    match args.output.as_deref() {
        Some(p) => fs::write(p, out)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(out.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}
