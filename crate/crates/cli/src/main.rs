//! `bjj` — exact-diagonalization toolkit for the two-mode
//! Bose-Josephson junction.
//!
//! Subcommands: `point` prints one CSV row of ground-state (and
//! optionally thermal) observables; `sweep` tabulates quantities along
//! one parameter axis with optional resonance detection; `figure` runs
//! the bundled parameter studies fig1..fig5.
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 numerical
//! failure. Output files are only written after the computation behind
//! them fully succeeded.

mod config;
mod csvfmt;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bjj_core::eigensolve::ground_state;
use bjj_core::model::build_hamiltonian;
use bjj_core::observables::{coherence_stats, number_stats};
use bjj_core::sweep::{
    detect_resonances, figure_recipe, run_sweep, Axis, FigureId, FigureOverrides, GridScale,
    GridValues, NamedSweep, Quantity, ResonanceDetection, SweepSpec,
};
use bjj_core::thermal::{thermal_coherence, thermal_number};
use bjj_core::{Error as CoreError, Junction};

use config::Config;
use csvfmt::{fmt_float, DEFAULT_SIG_DIGITS};

const OUT_DIR_ENV: &str = "BJJ_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "bjj",
    version,
    about = "Exact diagonalization of the two-mode Bose-Josephson junction"
)]
struct Cli {
    /// Flat key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one parameter point and print a CSV row to stdout.
    Point(PointArgs),
    /// Sweep one parameter axis and write CSV tables.
    Sweep(SweepArgs),
    /// Run a bundled parameter study (fig1..fig5).
    Figure(FigureArgs),
}

#[derive(Args)]
struct CommonParams {
    /// Total particle number N.
    #[arg(long)]
    n: Option<u32>,
    /// Single-particle tunneling strength J.
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    /// Charging energy E_C.
    #[arg(long, allow_hyphen_values = true)]
    ec: Option<f64>,
    /// Asymmetry delta.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Inverse temperature beta = 1/(k_B T); "inf" means ground state.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Significant digits for printed floats.
    #[arg(long)]
    precision: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    params: CommonParams,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: CommonParams,
    /// Axis to vary: ec, delta, beta, or n.
    #[arg(long)]
    axis: Option<String>,
    /// Grid minimum (with --max and --count).
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    /// Grid maximum.
    #[arg(long, allow_hyphen_values = true)]
    max: Option<f64>,
    /// Grid point count.
    #[arg(long)]
    count: Option<usize>,
    /// Grid spacing: linear or log.
    #[arg(long)]
    scale: Option<String>,
    /// Explicit comma-separated axis values (alternative to a grid).
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Comma-separated quantities to tabulate.
    #[arg(long)]
    quantities: Option<String>,
    /// Detect resonances and write a companion .resonances.csv file.
    #[arg(long)]
    detect: bool,
    /// Output directory (default: $BJJ_OUT_DIR or the working directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write an SVG line plot next to the CSV.
    #[arg(long)]
    emit_plot: bool,
}

#[derive(Args)]
struct FigureArgs {
    /// Which study to run: fig1, fig2, fig3, fig4, or fig5.
    id: String,
    /// Grid resolution override (points, or points per unit for
    /// delta-axis studies).
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated temperature list (k_B T) for fig5.
    #[arg(long)]
    temps: Option<String>,
    /// Output directory (default: $BJJ_OUT_DIR or the working directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Significant digits for printed floats.
    #[arg(long)]
    precision: Option<usize>,
    /// Also write one SVG per panel and a gnuplot script.
    #[arg(long)]
    emit_plot: bool,
}

/// Failures carrying the exit-code contract.
enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

fn core_failure(e: CoreError) -> Failure {
    fn is_usage(e: &CoreError) -> bool {
        match e {
            CoreError::EmptyJunction
            | CoreError::NegativeChargingEnergy(_)
            | CoreError::NonFinite(_)
            | CoreError::MomentumOutOfRange { .. }
            | CoreError::ZeroChargingEnergy
            | CoreError::NegativeBeta(_)
            | CoreError::ClassicalRequiresPositiveBeta(_)
            | CoreError::ClassicalTooFewAtoms(_)
            | CoreError::AsymmetricAnsatz(_)
            | CoreError::TooFewLevels { .. }
            | CoreError::OracleTooLarge { .. }
            | CoreError::BandLengthMismatch { .. }
            | CoreError::EmptyMatrix
            | CoreError::InvalidSweep(_) => true,
            CoreError::SweepPointFailure { source, .. } => is_usage(source),
            _ => false,
        }
    }
    if is_usage(&e) {
        Failure::Usage(e.to_string())
    } else {
        Failure::Numeric(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    let config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(m) => {
                eprintln!("error: {m}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };

    let outcome = match cli.command {
        Command::Point(args) => cmd_point(&args, &config),
        Command::Sweep(args) => cmd_sweep(&args, &config),
        Command::Figure(args) => cmd_figure(&args, &config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// flag > config > default.
fn pick<T: Clone + std::str::FromStr>(
    flag: &Option<T>,
    config: &Config,
    key: &str,
) -> Result<Option<T>, Failure>
where
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(Some(v.clone()));
    }
    config.parse::<T>(key).map_err(usage)
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("missing required parameter --{what}")))
}

struct Resolved {
    n: Option<u32>,
    j: Option<f64>,
    ec: Option<f64>,
    delta: Option<f64>,
    beta: Option<f64>,
    precision: usize,
}

fn resolve_common(p: &CommonParams, config: &Config) -> Result<Resolved, Failure> {
    Ok(Resolved {
        n: pick(&p.n, config, "n")?,
        j: pick(&p.j, config, "j")?,
        ec: pick(&p.ec, config, "ec")?,
        delta: pick(&p.delta, config, "delta")?,
        beta: pick(&p.beta, config, "beta")?,
        precision: pick(&p.precision, config, "precision")?.unwrap_or(DEFAULT_SIG_DIGITS),
    })
}

fn out_dir_from(flag: &Option<PathBuf>, config: &Config) -> PathBuf {
    if let Some(d) = flag {
        return d.clone();
    }
    if let Some(d) = config.get("out_dir") {
        return PathBuf::from(d);
    }
    if let Ok(d) = std::env::var(OUT_DIR_ENV) {
        return PathBuf::from(d);
    }
    PathBuf::from(".")
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| usage(format!("invalid {what} entry `{s}`: {e}")))
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| usage(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_point(args: &PointArgs, config: &Config) -> Result<(), Failure> {
    let r = resolve_common(&args.params, config)?;
    let n = require(r.n, "n")?;
    let j = require(r.j, "j")?;
    let ec = require(r.ec, "ec")?;
    let delta = require(r.delta, "delta")?;
    let params = Junction::new(n, j, ec, delta).map_err(core_failure)?;

    let h = build_hamiltonian(&params);
    let (energy, state) = ground_state(&h).map_err(core_failure)?;
    let c = coherence_stats(&state, n).map_err(core_failure)?;
    let st = number_stats(&state, n);

    let mut header = vec![
        "ground_energy",
        "var_cos",
        "mean_cos",
        "inv_s_squared",
        "mean_nr",
        "var_nr",
    ];
    let mut row = vec![
        energy,
        c.var_cos,
        c.mean_cos,
        st.inv_s_squared,
        st.mean_nr,
        st.var_nr,
    ];

    if let Some(beta) = r.beta {
        let spectrum = bjj_core::eigensolve::diagonalize(&h).map_err(core_failure)?;
        let ct = thermal_coherence(&params, &spectrum, beta).map_err(core_failure)?;
        let nt = thermal_number(&params, &spectrum, beta).map_err(core_failure)?;
        header.extend([
            "thermal_var_cos",
            "thermal_mean_cos",
            "thermal_inv_s_squared",
            "thermal_mean_nr",
            "thermal_var_nr",
        ]);
        row.extend([
            ct.var_cos,
            ct.mean_cos,
            nt.inv_s_squared,
            nt.mean_nr,
            nt.var_nr,
        ]);
    }

    println!("{}", header.join(","));
    let fields: Vec<String> = row.iter().map(|&v| fmt_float(v, r.precision)).collect();
    println!("{}", fields.join(","));
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, config: &Config) -> Result<(), Failure> {
    let r = resolve_common(&args.params, config)?;
    let axis_raw = pick(&args.axis, config, "axis")?;
    let axis = Axis::parse(&require(axis_raw, "axis")?)
        .ok_or_else(|| usage("axis must be one of: ec, delta, beta, n"))?;

    // the axis parameter itself defaults; the others are required
    let n = match (axis, r.n) {
        (Axis::NTotal, v) => v.unwrap_or(1),
        (_, v) => require(v, "n")?,
    };
    let j = require(r.j, "j")?;
    let ec = match (axis, r.ec) {
        (Axis::ChargingEc, v) => v.unwrap_or(0.0),
        (_, v) => require(v, "ec")?,
    };
    let delta = match (axis, r.delta) {
        (Axis::Delta, v) => v.unwrap_or(0.0),
        (_, v) => require(v, "delta")?,
    };
    let beta = r.beta.unwrap_or(f64::INFINITY);
    let base = Junction::new(n, j, ec, delta).map_err(core_failure)?;

    let values_raw = pick(&args.values, config, "values")?;
    let grid = if let Some(raw) = values_raw {
        GridValues::Explicit(parse_list(&raw, "values")?)
    } else {
        let min = require(pick(&args.min, config, "min")?, "min")?;
        let max = require(pick(&args.max, config, "max")?, "max")?;
        let count = require(pick(&args.count, config, "count")?, "count")?;
        let scale = match pick(&args.scale, config, "scale")?.as_deref() {
            None | Some("linear") => GridScale::Linear,
            Some("log") => GridScale::Log,
            Some(other) => return Err(usage(format!("unknown scale `{other}`"))),
        };
        GridValues::Range {
            min,
            max,
            count,
            scale,
        }
    };

    let quantities_raw = require(pick(&args.quantities, config, "quantities")?, "quantities")?;
    let mut quantities = Vec::new();
    for name in quantities_raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let q = Quantity::parse(name)
            .ok_or_else(|| usage(format!("unknown quantity `{name}`")))?;
        quantities.push(q);
    }
    if quantities.is_empty() {
        return Err(usage("empty quantity list"));
    }

    let detect = args.detect || matches!(config.get("detect"), Some("true") | Some("1"));
    let log_grid = matches!(
        grid,
        GridValues::Range {
            scale: GridScale::Log,
            ..
        }
    );

    let spec = SweepSpec::new(axis, grid, base, beta).with_quantities(&quantities);
    let result = run_sweep(&spec).map_err(core_failure)?;

    // compute everything before writing anything
    let detection = if detect {
        let quantity = if result.column(Quantity::VarNr).is_some() {
            Quantity::VarNr
        } else if result.column(Quantity::VarCos).is_some() {
            Quantity::VarCos
        } else {
            return Err(usage(
                "--detect needs var_nr or var_cos among the quantities",
            ));
        };
        Some(detect_resonances(&result, quantity).map_err(core_failure)?)
    } else {
        None
    };

    let out_dir = out_dir_from(&args.out_dir, config);
    let csv_path = out_dir.join(format!("sweep_{}.csv", axis.name()));
    write_file(&csv_path, &csvfmt::render_sweep(&result, r.precision))?;

    if let Some(det) = detection {
        let path = out_dir.join(format!("sweep_{}.resonances.csv", axis.name()));
        write_file(&path, &render_resonances(&det, r.precision))?;
    }

    if args.emit_plot {
        let panel = svg::Panel {
            title: format!("sweep over {}", axis.name()),
            x_label: axis.name().into(),
            y_label: "value".into(),
            log_x: log_grid,
            log_y: false,
            curves: result
                .quantities
                .iter()
                .enumerate()
                .map(|(col, q)| svg::Curve {
                    label: q.name().into(),
                    points: result
                        .rows
                        .iter()
                        .map(|row| (row.axis_value, row.values[col]))
                        .collect(),
                })
                .collect(),
        };
        write_file(
            &out_dir.join(format!("sweep_{}.svg", axis.name())),
            &svg::render(&panel),
        )?;
    }
    Ok(())
}

/// Companion table: each predicted resonance paired with the nearest
/// detection, then any unmatched detections.
fn render_resonances(det: &ResonanceDetection, sig: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# resonance detection: {} found, {} predicted in range{}\n",
        det.positions.len(),
        det.predicted.len(),
        if det.grid_too_coarse {
            " (grid too coarse)"
        } else {
            ""
        }
    ));
    out.push_str("predicted_delta,detected_delta,offset\n");
    let mut used = vec![false; det.positions.len()];
    for &p in &det.predicted {
        let nearest = det
            .positions
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - p)
                    .abs()
                    .partial_cmp(&(b.1 - p).abs())
                    .expect("finite positions")
            })
            .map(|(i, &d)| (i, d));
        match nearest {
            Some((i, d)) => {
                used[i] = true;
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_float(p, sig),
                    fmt_float(d, sig),
                    fmt_float(d - p, sig)
                ));
            }
            None => {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_float(p, sig),
                    "nan",
                    "nan"
                ));
            }
        }
    }
    for (i, &d) in det.positions.iter().enumerate() {
        if !used[i] {
            out.push_str(&format!("nan,{},nan\n", fmt_float(d, sig)));
        }
    }
    out
}

fn cmd_figure(args: &FigureArgs, config: &Config) -> Result<(), Failure> {
    let id = FigureId::parse(&args.id)
        .ok_or_else(|| usage(format!("unknown figure `{}`", args.id)))?;
    let precision = pick(&args.precision, config, "precision")?.unwrap_or(DEFAULT_SIG_DIGITS);
    let grid_count = pick(&args.grid, config, "grid")?;
    let temps = match pick(&args.temps, config, "temps")? {
        Some(raw) => Some(parse_list::<f64>(&raw, "temps")?),
        None => None,
    };
    let overrides = FigureOverrides { grid_count, temps };

    let curves = figure_recipe(id, &overrides).map_err(core_failure)?;

    let out_dir = out_dir_from(&args.out_dir, config);
    for c in &curves {
        let path = out_dir.join(format!("{}.csv", c.name));
        write_file(&path, &csvfmt::render_sweep(&c.result, precision))?;
    }

    if args.emit_plot {
        emit_panels(&curves, id, &out_dir)?;
    }
    Ok(())
}

fn emit_panels(curves: &[NamedSweep], id: FigureId, out_dir: &Path) -> Result<(), Failure> {
    let mut panels: Vec<&str> = Vec::new();
    for c in curves {
        if !panels.contains(&c.style.panel.as_str()) {
            panels.push(&c.style.panel);
        }
    }

    let mut script = String::new();
    script.push_str(&format!("# gnuplot script for {}\n", id.name()));
    script.push_str("set datafile separator ','\n");
    script.push_str("set terminal svg size 820,560\n");

    for panel_key in panels {
        let members: Vec<&NamedSweep> = curves
            .iter()
            .filter(|c| c.style.panel == panel_key)
            .collect();
        let style = &members[0].style;

        let mut plot_curves = Vec::new();
        let mut plot_terms = Vec::new();
        for m in &members {
            for (col, q) in m.result.quantities.iter().enumerate() {
                let tail = m
                    .name
                    .split_once('_')
                    .map(|(_, t)| t.to_string())
                    .unwrap_or_else(|| m.name.clone());
                let label = if m.result.quantities.len() > 1 {
                    format!("{tail}:{}", q.name())
                } else {
                    tail
                };
                plot_curves.push(svg::Curve {
                    label: label.clone(),
                    points: m
                        .result
                        .rows
                        .iter()
                        .map(|row| (row.axis_value * m.style.x_factor, row.values[col]))
                        .collect(),
                });
                plot_terms.push(format!(
                    "'{}.csv' using ($1*{}):{} every ::1 with lines title '{}'",
                    m.name,
                    m.style.x_factor,
                    col + 2,
                    label
                ));
            }
        }

        let panel = svg::Panel {
            title: panel_key.to_string(),
            x_label: style.x_label.clone(),
            y_label: style.y_label.clone(),
            log_x: style.log_x,
            log_y: style.log_y,
            curves: plot_curves,
        };
        write_file(&out_dir.join(format!("{panel_key}.svg")), &svg::render(&panel))?;

        script.push_str(&format!("set output '{panel_key}.gnuplot.svg'\n"));
        script.push_str(&format!("set xlabel '{}'\n", style.x_label));
        script.push_str(&format!("set ylabel '{}'\n", style.y_label));
        script.push_str(if style.log_x {
            "set logscale x\n"
        } else {
            "unset logscale x\n"
        });
        script.push_str(&format!("plot {}\n", plot_terms.join(", \\\n     ")));
    }

    write_file(&out_dir.join(format!("{}.gp", id.name())), &script)
}
