use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use black_karasinski::bond::{bond_price_fast, bond_price_full, FastBondPricer};
use black_karasinski::calibrate::{
    calibrate, BondObservation, CalibrationSettings, SwaptionObservation,
};
use black_karasinski::oracle::{lattice_build, mc_bond_price, LatticeConfig, McConfig};
use black_karasinski::swaption::{implied_vol, BoundaryOutcome, Side, SwaptionSpec};
use black_karasinski::ModelParams;

use bk::output;
use bk::tables::{
    run_bond_table, run_comparison_table, run_parity_table, run_swaption_table, BondTableSettings,
    ComparisonSettings, SwaptionTableSettings,
};

/// Black-Karasinski bond and swaption pricing: semi-analytic approximations,
/// Monte Carlo and lattice oracles, benchmark tables and calibration.
#[derive(Parser)]
#[command(name = "bk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bond yield grid: approximation vs Monte Carlo.
    BondTable(TableOpts),
    /// Swaption implied-vol grid over expiry, tenor and moneyness:
    /// approximation vs lattice.
    SwaptionTable(TableOpts),
    /// ATM payer-minus-receiver implied-vol disparity grid.
    ParityTable(TableOpts),
    /// High-volatility bond comparison run with published reference columns.
    CompareTable5(TableOpts),
    /// Price a single instrument.
    Price(PriceOpts),
    /// Bootstrap the drift to bond quotes and fit (sigma, b) to swaption
    /// vols.
    Calibrate(CalibrateOpts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TableOpts {
    /// Ignored by table commands (the benchmark grids are built in); present
    /// for interface symmetry.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gauss-Hermite points for bond approximations.
    #[arg(long)]
    gh_points: Option<usize>,
    /// Swaption interpolation nodes.
    #[arg(long)]
    k: Option<usize>,
    /// Conditional-discount quadrature points.
    #[arg(long)]
    m: Option<usize>,
    /// Per-bond quadrature points inside the swaption pipeline.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo paths.
    #[arg(long)]
    paths: Option<u64>,
    /// Steps per year (Monte Carlo grid or lattice).
    #[arg(long)]
    steps: Option<u32>,
}

impl TableOpts {
    fn warn_unused_config(&self) {
        if self.config.is_some() {
            eprintln!("warning: table commands use the built-in benchmark grid; --config ignored");
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Instrument {
    Bond,
    Swaption,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Fast,
    Full,
    Mc,
    Lattice,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Payer,
    Receiver,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Payer => Side::Payer,
            SideArg::Receiver => Side::Receiver,
        }
    }
}

#[derive(Args)]
struct PriceOpts {
    /// Model parameters JSON: {"sigma":..., "b":..., "r0":..., "a":[{"t":0.0,"level":...}]}.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    instrument: Instrument,
    #[arg(long, value_enum, default_value = "fast")]
    method: Method,
    /// Bond: forward start time (0 prices a spot bond).
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    /// Bond: time from start to maturity, in years.
    #[arg(long)]
    maturity: Option<f64>,
    /// Bond: short rate at the start time; default is the zero-volatility
    /// forward rate.
    #[arg(long)]
    r_start: Option<f64>,
    /// Swaption: expiry in years.
    #[arg(long)]
    expiry: Option<f64>,
    /// Swaption: underlying tenor in years.
    #[arg(long)]
    tenor: Option<f64>,
    /// Swaption: fixed-leg payment period.
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Swaption: absolute strike. Exactly one of --strike / --moneyness.
    #[arg(long)]
    strike: Option<f64>,
    /// Swaption: strike as a fraction of the forward swap rate.
    #[arg(long)]
    moneyness: Option<f64>,
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    gh_points: usize,
    /// Extra retained modes for --method full (bond only, 0..=3).
    #[arg(long, default_value_t = 2)]
    trunc: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    paths: u64,
    #[arg(long, default_value_t = 64)]
    steps: u32,
}

#[derive(Args)]
struct CalibrateOpts {
    /// Initial model parameters (also fixes r0).
    #[arg(long)]
    config: PathBuf,
    /// Quotes JSON: {"bonds":[{"maturity":..,"ytm":..}],
    /// "swaptions":[{"expiry":..,"period":..,"payments":..,"vol":..}]}.
    #[arg(long)]
    quotes: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    gh_points: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
}

fn load_params(path: &PathBuf) -> Result<ModelParams> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading model config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing model config {}", path.display()))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing output {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::BondTable(o) => {
            o.warn_unused_config();
            let mut s = BondTableSettings {
                seed: o.seed,
                ..Default::default()
            };
            if let Some(p) = o.paths {
                s.paths = p;
            }
            if let Some(st) = o.steps {
                s.steps_per_year = st;
            }
            if let Some(gh) = o.gh_points {
                s.gh_points = gh;
            }
            let rows = run_bond_table(&s)?;
            let text = match o.format {
                Format::Csv => output::bond_table_csv(&rows),
                Format::Json => output::rows_to_json(&rows, None),
            };
            write_out(&o.out, &text)
        }
        Command::SwaptionTable(o) => {
            o.warn_unused_config();
            let s = swaption_settings(&o);
            let rows = run_swaption_table(&s)?;
            let text = match o.format {
                Format::Csv => output::swaption_table_csv(&rows),
                Format::Json => output::rows_to_json(&rows, None),
            };
            write_out(&o.out, &text)
        }
        Command::ParityTable(o) => {
            o.warn_unused_config();
            let s = swaption_settings(&o);
            let rows = run_parity_table(&s)?;
            let text = match o.format {
                Format::Csv => output::parity_table_csv(&rows),
                Format::Json => output::rows_to_json(&rows, None),
            };
            write_out(&o.out, &text)
        }
        Command::CompareTable5(o) => {
            o.warn_unused_config();
            let mut s = ComparisonSettings {
                seed: o.seed,
                ..Default::default()
            };
            if let Some(p) = o.paths {
                s.paths = p;
            }
            if let Some(st) = o.steps {
                s.steps_per_year = st;
            }
            if let Some(gh) = o.gh_points {
                s.gh_points = gh;
            }
            let (rows, warning) = run_comparison_table(&s)?;
            eprintln!("warning: {warning}");
            let text = match o.format {
                Format::Csv => output::comparison_table_csv(&rows, warning),
                Format::Json => output::rows_to_json(&rows, Some(warning)),
            };
            write_out(&o.out, &text)
        }
        Command::Price(o) => run_price(o),
        Command::Calibrate(o) => run_calibrate(o),
    }
}

fn swaption_settings(o: &TableOpts) -> SwaptionTableSettings {
    let mut s = SwaptionTableSettings {
        steps_per_year: o.steps,
        ..Default::default()
    };
    if let Some(k) = o.k {
        s.k = k;
    }
    if let Some(m) = o.m {
        s.m = m;
    }
    if let Some(n) = o.n {
        s.n = n;
    }
    s
}

#[derive(Serialize)]
struct BondPriceReport {
    instrument: &'static str,
    method: &'static str,
    start: f64,
    maturity: f64,
    r_start: f64,
    price: f64,
    ytm: f64,
    diagnostics: serde_json::Value,
}

#[derive(Serialize)]
struct SwaptionPriceReport {
    instrument: &'static str,
    method: &'static str,
    expiry: f64,
    tenor: f64,
    period: f64,
    payments: usize,
    strike: f64,
    side: &'static str,
    forward: f64,
    annuity: f64,
    price: f64,
    implied_vol: Option<f64>,
    diagnostics: serde_json::Value,
}

fn run_price(o: PriceOpts) -> Result<()> {
    let params = load_params(&o.config)?;
    let text = match o.instrument {
        Instrument::Bond => {
            let tau = o
                .maturity
                .ok_or_else(|| anyhow!("--maturity is required for bonds"))?;
            if tau <= 0.0 || tau.is_nan() {
                bail!("--maturity must be > 0, got {tau}");
            }
            let r_start = match o.r_start {
                Some(r) if r > 0.0 => r,
                Some(r) => bail!("--r-start must be > 0, got {r}"),
                None => params.rbar(params.r0(), 0.0, o.start),
            };
            let (method, price, diagnostics) = match o.method {
                Method::Fast => {
                    let q = bond_price_fast(&params, r_start, o.start, tau, o.gh_points)?;
                    (
                        "fast",
                        q.price,
                        serde_json::json!({ "gh_points": o.gh_points }),
                    )
                }
                Method::Full => {
                    let q = bond_price_full(&params, r_start, o.start, tau, o.trunc, o.gh_points)?;
                    (
                        "full",
                        q.price,
                        serde_json::json!({ "gh_points": o.gh_points, "trunc": o.trunc }),
                    )
                }
                Method::Mc => {
                    let cfg = McConfig {
                        paths: o.paths,
                        steps_per_year: o.steps,
                        seed: o.seed,
                        antithetic: true,
                    };
                    let est = mc_bond_price(&params, o.start, tau, &cfg)?;
                    (
                        "mc",
                        est.mean,
                        serde_json::json!({
                            "paths": est.paths,
                            "steps_per_year": o.steps,
                            "seed": o.seed,
                            "stderr": est.stderr,
                        }),
                    )
                }
                Method::Lattice => {
                    if o.start != 0.0 {
                        bail!("lattice bond pricing starts at time 0");
                    }
                    let cfg = LatticeConfig {
                        steps_per_year: o.steps,
                        width_multiplier: 1.0,
                    };
                    let lat = lattice_build(&params, tau, &cfg)?;
                    (
                        "lattice",
                        lat.bond_price(tau)?,
                        serde_json::json!({ "steps_per_year": o.steps }),
                    )
                }
            };
            let report = BondPriceReport {
                instrument: "bond",
                method,
                start: o.start,
                maturity: o.start + tau,
                r_start,
                price,
                ytm: black_karasinski::yield_from_price(price, tau)?,
                diagnostics,
            };
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        Instrument::Swaption => {
            let expiry = o
                .expiry
                .ok_or_else(|| anyhow!("--expiry is required for swaptions"))?;
            let tenor = o
                .tenor
                .ok_or_else(|| anyhow!("--tenor is required for swaptions"))?;
            let side: Side = o
                .side
                .ok_or_else(|| anyhow!("--side is required for swaptions"))?
                .into();
            let payments = (tenor / o.period).round() as usize;
            if payments == 0 || (payments as f64 * o.period - tenor).abs() > 1e-9 {
                bail!("--tenor must be a positive multiple of --period");
            }
            // forward and annuity: lattice-based for the lattice method,
            // fast-approximation based otherwise
            let lattice = match o.method {
                Method::Lattice => {
                    let cfg = LatticeConfig {
                        steps_per_year: o.steps,
                        width_multiplier: 1.0,
                    };
                    Some(lattice_build(&params, expiry + tenor, &cfg)?)
                }
                _ => None,
            };
            let (forward, annuity) = match &lattice {
                Some(lat) => lat.swap_rate(expiry, o.period, payments)?,
                None => {
                    let bond_t = FastBondPricer::new(&params, 0.0, expiry, 20)?.price(params.r0());
                    let mut annuity = 0.0;
                    let mut terminal = 0.0;
                    for j in 1..=payments {
                        terminal =
                            FastBondPricer::new(&params, 0.0, expiry + j as f64 * o.period, 20)?
                                .price(params.r0());
                        annuity += o.period * terminal;
                    }
                    ((bond_t - terminal) / annuity, annuity)
                }
            };
            let strike = match (o.strike, o.moneyness) {
                (Some(s), None) => s,
                (None, Some(mny)) => mny * forward,
                (None, None) => bail!("one of --strike / --moneyness is required"),
                (Some(_), Some(_)) => bail!("--strike and --moneyness are mutually exclusive"),
            };
            let spec = SwaptionSpec::new(expiry, o.period, payments, strike, side)?;
            let (method, price, diagnostics) = match o.method {
                Method::Fast | Method::Full => {
                    let val = black_karasinski::swaption_price(&params, &spec, o.m, o.n, o.k)?;
                    let boundary = match &val.boundary {
                        BoundaryOutcome::Interior(b) => serde_json::json!({
                            "z0": b.z0,
                            "x0": b.x0,
                            "bracket": [b.bracket.0, b.bracket.1],
                        }),
                        BoundaryOutcome::AllPositive => serde_json::json!("all-positive"),
                        BoundaryOutcome::AllNegative => serde_json::json!("all-negative"),
                    };
                    (
                        "fast",
                        val.price,
                        serde_json::json!({
                            "k": o.k, "m": o.m, "n": o.n,
                            "boundary": boundary,
                            "node_values": val.node_values,
                        }),
                    )
                }
                Method::Mc => {
                    bail!("no swaption Monte Carlo (nested expectations); use --method lattice")
                }
                Method::Lattice => {
                    let lat = lattice.as_ref().expect("lattice built above");
                    (
                        "lattice",
                        lat.swaption_price(&spec)?,
                        serde_json::json!({ "steps_per_year": o.steps }),
                    )
                }
            };
            let vol = if price > 0.0 {
                Some(implied_vol(price, forward, strike, annuity, expiry, side)?)
            } else {
                None
            };
            let report = SwaptionPriceReport {
                instrument: "swaption",
                method,
                expiry,
                tenor,
                period: o.period,
                payments,
                strike,
                side: match side {
                    Side::Payer => "payer",
                    Side::Receiver => "receiver",
                },
                forward,
                annuity,
                price,
                implied_vol: vol,
                diagnostics,
            };
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
    };
    write_out(&o.out, &text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotesFile {
    #[serde(default)]
    bonds: Vec<BondQuoteIn>,
    #[serde(default)]
    swaptions: Vec<SwaptionQuoteIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BondQuoteIn {
    maturity: f64,
    ytm: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SwaptionQuoteIn {
    expiry: f64,
    period: f64,
    payments: usize,
    vol: f64,
}

#[derive(Serialize)]
struct CalibrationReport {
    sigma: f64,
    b: f64,
    r0: f64,
    drift: Vec<serde_json::Value>,
    residuals: Vec<f64>,
    objective: f64,
    iterations: usize,
    converged: bool,
}

fn run_calibrate(o: CalibrateOpts) -> Result<()> {
    let params = load_params(&o.config)?;
    let text = fs::read_to_string(&o.quotes)
        .with_context(|| format!("reading quotes {}", o.quotes.display()))?;
    let quotes: QuotesFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing quotes {}", o.quotes.display()))?;
    let bonds: Vec<BondObservation> = quotes
        .bonds
        .iter()
        .map(|q| BondObservation {
            maturity: q.maturity,
            ytm: q.ytm,
        })
        .collect();
    let swaptions: Vec<SwaptionObservation> = quotes
        .swaptions
        .iter()
        .map(|q| SwaptionObservation {
            expiry: q.expiry,
            period: q.period,
            payments: q.payments,
            vol: q.vol,
        })
        .collect();
    let settings = CalibrationSettings {
        gh_points: o.gh_points,
        k: o.k,
        m: o.m,
        n: o.n,
        max_iterations: o.max_iterations,
    };
    let result = calibrate(&params, &bonds, &swaptions, &settings)?;
    let report = CalibrationReport {
        sigma: result.params.sigma(),
        b: result.params.b(),
        r0: result.params.r0(),
        drift: result
            .params
            .drift_knots()
            .iter()
            .map(|k| serde_json::json!({ "t": k.t, "level": k.level }))
            .collect(),
        residuals: result.residuals,
        objective: result.objective,
        iterations: result.iterations,
        converged: result.converged,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_out(&o.out, &text)
}
