//! Deterministic parameter sweeps, resonance/plateau detectors, and the
//! bundled figure recipes.
//!
//! A sweep varies one knob (E_C, delta, beta, or N) over a strictly
//! monotone grid, evaluates the requested quantities at every point by
//! exact diagonalization (plus the approximation schemes on demand),
//! and assembles rows in grid order. Points are independent, so they
//! run in parallel; the output is byte-reproducible because each point
//! is evaluated single-threaded in a fixed summation order.
//!
//! The detectors post-process delta sweeps: resonant peaks of D(N_r)
//! (or dips of D(cos phi)) are located by a three-point parabola, and
//! interaction-blockade plateaus of <N_r>/2 are found as maximal runs
//! that stay within a tolerance of their median.

use rayon::prelude::*;

use crate::approx::{classical_boltzmann, gaussian_ansatz, two_level_ground_auto};
use crate::eigensolve::diagonalize;
use crate::model::{build_hamiltonian, single_atom_resonances};
use crate::observables::{coherence_stats, number_stats};
use crate::thermal::{
    spectrum_diagnostics, thermal_coherence, thermal_coherence_per_state, thermal_number,
    DEFAULT_DEGENERACY_TOL,
};
use crate::{Error, Junction, Result};

/// Default cap on the per-point particle number.
pub const DEFAULT_N_CAP: u32 = 2000;

/// Default plateau tolerance around the interval median.
pub const PLATEAU_TOL: f64 = 0.05;

/// Minimum number of grid points a plateau must span.
pub const PLATEAU_MIN_POINTS: usize = 5;

/// Which junction knob the sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    ChargingEc,
    Delta,
    Beta,
    NTotal,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::ChargingEc => "charging_ec",
            Axis::Delta => "delta",
            Axis::Beta => "beta",
            Axis::NTotal => "n_total",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "charging_ec" | "ec" => Some(Axis::ChargingEc),
            "delta" => Some(Axis::Delta),
            "beta" => Some(Axis::Beta),
            "n_total" | "n" => Some(Axis::NTotal),
            _ => None,
        }
    }
}

/// Grid spacing law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

/// Axis values: an explicit list or a generated grid.
#[derive(Clone, Debug)]
pub enum GridValues {
    Explicit(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        count: usize,
        scale: GridScale,
    },
}

impl GridValues {
    /// Materializes the grid: strictly monotone values, count >= 2 for
    /// ranges, positive endpoints for log spacing.
    pub fn materialize(&self) -> Result<Vec<f64>> {
        match self {
            GridValues::Explicit(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidSweep("empty value list".into()));
                }
                let increasing = values.windows(2).all(|w| w[0] < w[1]);
                let decreasing = values.windows(2).all(|w| w[0] > w[1]);
                if values.len() > 1 && !increasing && !decreasing {
                    return Err(Error::InvalidSweep(
                        "explicit values must be strictly monotone".into(),
                    ));
                }
                Ok(values.clone())
            }
            GridValues::Range {
                min,
                max,
                count,
                scale,
            } => {
                if *count < 2 {
                    return Err(Error::InvalidSweep("grid needs at least 2 points".into()));
                }
                if min.is_nan() || max.is_nan() || min >= max {
                    return Err(Error::InvalidSweep("grid needs min < max".into()));
                }
                match scale {
                    GridScale::Linear => {
                        let step = (max - min) / (*count as f64 - 1.0);
                        Ok((0..*count).map(|i| min + step * i as f64).collect())
                    }
                    GridScale::Log => {
                        if *min <= 0.0 {
                            return Err(Error::InvalidSweep(
                                "log grid needs positive endpoints".into(),
                            ));
                        }
                        let (la, lb) = (min.ln(), max.ln());
                        let step = (lb - la) / (*count as f64 - 1.0);
                        Ok((0..*count).map(|i| (la + step * i as f64).exp()).collect())
                    }
                }
            }
        }
    }
}

/// Quantities a sweep can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    VarCos,
    MeanCos,
    InvSSquared,
    MeanNr,
    VarNr,
    MeanSpacing,
    UpperMeanSpacing,
    ClassicalVarCos,
    GaussianVarCos,
    GaussianInvSSquared,
    PerturbationVarCos,
    VarCosPerState,
}

impl Quantity {
    pub const ALL: [Quantity; 12] = [
        Quantity::VarCos,
        Quantity::MeanCos,
        Quantity::InvSSquared,
        Quantity::MeanNr,
        Quantity::VarNr,
        Quantity::MeanSpacing,
        Quantity::UpperMeanSpacing,
        Quantity::ClassicalVarCos,
        Quantity::GaussianVarCos,
        Quantity::GaussianInvSSquared,
        Quantity::PerturbationVarCos,
        Quantity::VarCosPerState,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::VarCos => "var_cos",
            Quantity::MeanCos => "mean_cos",
            Quantity::InvSSquared => "inv_s_squared",
            Quantity::MeanNr => "mean_nr",
            Quantity::VarNr => "var_nr",
            Quantity::MeanSpacing => "mean_spacing",
            Quantity::UpperMeanSpacing => "upper_mean_spacing",
            Quantity::ClassicalVarCos => "classical_var_cos",
            Quantity::GaussianVarCos => "gaussian_var_cos",
            Quantity::GaussianInvSSquared => "gaussian_inv_s_squared",
            Quantity::PerturbationVarCos => "perturbation_var_cos",
            Quantity::VarCosPerState => "var_cos_per_state",
        }
    }

    pub fn parse(s: &str) -> Option<Quantity> {
        Quantity::ALL.iter().copied().find(|q| q.name() == s)
    }

    fn needs_spectrum(&self) -> bool {
        matches!(
            self,
            Quantity::VarCos
                | Quantity::MeanCos
                | Quantity::InvSSquared
                | Quantity::MeanNr
                | Quantity::VarNr
                | Quantity::MeanSpacing
                | Quantity::UpperMeanSpacing
                | Quantity::VarCosPerState
        )
    }
}

/// Full sweep specification.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: GridValues,
    /// Fixed junction parameters; the axis field is overwritten per point.
    pub base: Junction,
    /// Fixed inverse temperature; `f64::INFINITY` means ground state.
    pub beta: f64,
    pub quantities: Vec<Quantity>,
    pub n_cap: u32,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: GridValues, base: Junction, beta: f64) -> Self {
        SweepSpec {
            axis,
            values,
            base,
            beta,
            quantities: Vec::new(),
            n_cap: DEFAULT_N_CAP,
        }
    }

    pub fn with_quantities(mut self, quantities: &[Quantity]) -> Self {
        self.quantities = quantities.to_vec();
        self
    }
}

/// One grid point: the axis value plus the requested quantities in spec
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub values: Vec<f64>,
}

/// Parameter echo attached to every sweep result.
#[derive(Clone, Debug)]
pub struct SweepMetadata {
    pub axis: Axis,
    pub base: Junction,
    pub beta: f64,
    pub version: &'static str,
}

/// Assembled sweep output, rows in grid order.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub quantities: Vec<Quantity>,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    /// Column index of a quantity, if present.
    pub fn column(&self, q: Quantity) -> Option<usize> {
        self.quantities.iter().position(|&x| x == q)
    }
}

fn validate(spec: &SweepSpec, grid: &[f64]) -> Result<()> {
    if spec.quantities.is_empty() {
        return Err(Error::InvalidSweep("no quantities requested".into()));
    }
    for (i, q) in spec.quantities.iter().enumerate() {
        if spec.quantities[..i].contains(q) {
            return Err(Error::InvalidSweep(format!(
                "duplicate quantity {}",
                q.name()
            )));
        }
    }
    if spec.base.n_total() > spec.n_cap {
        return Err(Error::InvalidSweep(format!(
            "N = {} exceeds cap {}",
            spec.base.n_total(),
            spec.n_cap
        )));
    }
    match spec.axis {
        Axis::NTotal => {
            for &v in grid {
                if v < 1.0 || v.fract() != 0.0 || v > spec.n_cap as f64 {
                    return Err(Error::InvalidSweep(format!(
                        "N axis value {v} is not a positive integer within the cap"
                    )));
                }
            }
        }
        Axis::ChargingEc => {
            if grid.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidSweep("negative charging energy".into()));
            }
        }
        Axis::Beta => {
            if grid.iter().any(|&v| v < 0.0 || v.is_nan()) {
                return Err(Error::InvalidSweep("beta axis values must be >= 0".into()));
            }
        }
        Axis::Delta => {}
    }
    if spec.axis != Axis::Beta && (spec.beta.is_nan() || spec.beta < 0.0) {
        return Err(Error::InvalidSweep("fixed beta must be >= 0".into()));
    }

    let wants_gaussian = spec
        .quantities
        .iter()
        .any(|q| matches!(q, Quantity::GaussianVarCos | Quantity::GaussianInvSSquared));
    if wants_gaussian {
        if spec.axis == Axis::Delta {
            return Err(Error::InvalidSweep(
                "Gaussian ansatz quantities conflict with a delta axis".into(),
            ));
        }
        if spec.base.asymmetry_delta() != 0.0 {
            return Err(Error::InvalidSweep(
                "Gaussian ansatz quantities need delta = 0".into(),
            ));
        }
    }
    if spec.quantities.contains(&Quantity::ClassicalVarCos) {
        let betas_ok = match spec.axis {
            Axis::Beta => grid.iter().all(|&b| b > 0.0 && b.is_finite()),
            _ => spec.beta > 0.0 && spec.beta.is_finite(),
        };
        if !betas_ok {
            return Err(Error::InvalidSweep(
                "classical estimate needs a positive finite beta".into(),
            ));
        }
    }
    Ok(())
}

fn point_inputs(spec: &SweepSpec, v: f64) -> Result<(Junction, f64)> {
    let params = match spec.axis {
        Axis::ChargingEc => spec.base.with_charging_ec(v)?,
        Axis::Delta => spec.base.with_delta(v)?,
        Axis::Beta => spec.base,
        Axis::NTotal => Junction::new(
            v as u32,
            spec.base.tunneling_j(),
            spec.base.charging_ec(),
            spec.base.asymmetry_delta(),
        )?,
    };
    let beta = if spec.axis == Axis::Beta { v } else { spec.beta };
    Ok((params, beta))
}

fn evaluate_point(spec: &SweepSpec, v: f64) -> Result<Vec<f64>> {
    let (params, beta) = point_inputs(spec, v)?;
    let n = params.n_total();

    let spectrum = if spec.quantities.iter().any(|q| q.needs_spectrum()) {
        Some(diagonalize(&build_hamiltonian(&params))?)
    } else {
        None
    };
    let coherence = match spectrum.as_ref() {
        Some(s)
            if spec
                .quantities
                .iter()
                .any(|q| matches!(q, Quantity::VarCos | Quantity::MeanCos)) =>
        {
            Some(thermal_coherence(&params, s, beta)?)
        }
        _ => None,
    };
    let number = match spectrum.as_ref() {
        Some(s)
            if spec.quantities.iter().any(|q| {
                matches!(
                    q,
                    Quantity::InvSSquared | Quantity::MeanNr | Quantity::VarNr
                )
            }) =>
        {
            Some(thermal_number(&params, s, beta)?)
        }
        _ => None,
    };
    let diagnostics = match spectrum.as_ref() {
        Some(s)
            if spec
                .quantities
                .iter()
                .any(|q| matches!(q, Quantity::MeanSpacing | Quantity::UpperMeanSpacing)) =>
        {
            Some(spectrum_diagnostics(s, DEFAULT_DEGENERACY_TOL)?)
        }
        _ => None,
    };
    let per_state = match spectrum.as_ref() {
        Some(s) if spec.quantities.contains(&Quantity::VarCosPerState) => {
            Some(thermal_coherence_per_state(&params, s, beta)?)
        }
        _ => None,
    };
    let classical = if spec.quantities.contains(&Quantity::ClassicalVarCos) {
        Some(classical_boltzmann(&params, beta)?)
    } else {
        None
    };
    let gaussian = if spec
        .quantities
        .iter()
        .any(|q| matches!(q, Quantity::GaussianVarCos | Quantity::GaussianInvSSquared))
    {
        let g = gaussian_ansatz(&params)?;
        let c = coherence_stats(&g.state, n)?;
        let st = number_stats(&g.state, n);
        Some((c.var_cos, st.inv_s_squared))
    } else {
        None
    };
    let perturbation = if spec.quantities.contains(&Quantity::PerturbationVarCos) {
        let r = two_level_ground_auto(&params)?;
        Some(coherence_stats(&r.state, n)?.var_cos)
    } else {
        None
    };

    let row = spec
        .quantities
        .iter()
        .map(|q| match q {
            Quantity::VarCos => coherence.as_ref().unwrap().var_cos,
            Quantity::MeanCos => coherence.as_ref().unwrap().mean_cos,
            Quantity::InvSSquared => number.as_ref().unwrap().inv_s_squared,
            Quantity::MeanNr => number.as_ref().unwrap().mean_nr,
            Quantity::VarNr => number.as_ref().unwrap().var_nr,
            Quantity::MeanSpacing => diagnostics.as_ref().unwrap().mean_spacing,
            Quantity::UpperMeanSpacing => diagnostics.as_ref().unwrap().upper_mean_spacing,
            Quantity::ClassicalVarCos => classical.as_ref().unwrap().var_cos,
            Quantity::GaussianVarCos => gaussian.as_ref().unwrap().0,
            Quantity::GaussianInvSSquared => gaussian.as_ref().unwrap().1,
            Quantity::PerturbationVarCos => perturbation.unwrap(),
            Quantity::VarCosPerState => per_state.as_ref().unwrap().var_cos,
        })
        .collect();
    Ok(row)
}

/// Runs the sweep, evaluating grid points in parallel and assembling
/// rows in grid order. The first failing point aborts the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let grid = spec.values.materialize()?;
    validate(spec, &grid)?;

    let outcomes: Vec<Result<Vec<f64>>> = grid
        .par_iter()
        .map(|&v| evaluate_point(spec, v))
        .collect();

    let mut rows = Vec::with_capacity(grid.len());
    for (index, (axis_value, outcome)) in grid.iter().zip(outcomes).enumerate() {
        match outcome {
            Ok(values) => rows.push(SweepRow {
                axis_value: *axis_value,
                values,
            }),
            Err(source) => {
                return Err(Error::SweepPointFailure {
                    index,
                    axis_value: *axis_value,
                    source: Box::new(source),
                })
            }
        }
    }

    Ok(SweepResult {
        quantities: spec.quantities.clone(),
        rows,
        metadata: SweepMetadata {
            axis: spec.axis,
            base: spec.base,
            beta: spec.beta,
            version: env!("CARGO_PKG_VERSION"),
        },
    })
}

/// Resonance detections on a delta sweep.
#[derive(Clone, Debug)]
pub struct ResonanceDetection {
    /// Parabola-refined extremum positions, in grid order.
    pub positions: Vec<f64>,
    /// Zero-tunneling predictions falling inside the scanned window.
    pub predicted: Vec<f64>,
    /// Set when fewer extrema were found than predicted; the grid is
    /// then too coarse to resolve every resonance.
    pub grid_too_coarse: bool,
}

/// Locates single-atom resonances on a delta sweep: local maxima of
/// D(N_r), or local minima of D(cos phi) (resonant suppression), each
/// refined by a parabola through the three bracketing points.
pub fn detect_resonances(result: &SweepResult, quantity: Quantity) -> Result<ResonanceDetection> {
    if result.metadata.axis != Axis::Delta {
        return Err(Error::InvalidSweep(
            "resonance detection needs a delta axis".into(),
        ));
    }
    let col = result
        .column(quantity)
        .ok_or_else(|| Error::InvalidSweep(format!("{} not in sweep", quantity.name())))?;
    let minima = match quantity {
        Quantity::VarNr => false,
        Quantity::VarCos => true,
        _ => {
            return Err(Error::InvalidSweep(
                "resonance detection works on var_nr or var_cos".into(),
            ))
        }
    };

    let xs: Vec<f64> = result.rows.iter().map(|r| r.axis_value).collect();
    let ys: Vec<f64> = result.rows.iter().map(|r| r.values[col]).collect();

    let mut positions = Vec::new();
    for i in 1..xs.len().saturating_sub(1) {
        let hit = if minima {
            ys[i] < ys[i - 1] && ys[i] < ys[i + 1]
        } else {
            ys[i] > ys[i - 1] && ys[i] > ys[i + 1]
        };
        if hit {
            positions.push(parabola_vertex(
                xs[i - 1],
                ys[i - 1],
                xs[i],
                ys[i],
                xs[i + 1],
                ys[i + 1],
            ));
        }
    }

    let (lo, hi) = window(&xs);
    let predicted = match single_atom_resonances(&result.metadata.base) {
        Ok(all) => all.into_iter().filter(|&d| d >= lo && d <= hi).collect(),
        Err(Error::ZeroChargingEnergy) => Vec::new(),
        Err(e) => return Err(e),
    };
    let grid_too_coarse = positions.len() < predicted.len();
    if grid_too_coarse {
        log::warn!(
            "resonance scan found {} extrema but {} are predicted in range; grid too coarse",
            positions.len(),
            predicted.len()
        );
    }
    Ok(ResonanceDetection {
        positions,
        predicted,
        grid_too_coarse,
    })
}

fn window(xs: &[f64]) -> (f64, f64) {
    let first = *xs.first().unwrap_or(&0.0);
    let last = *xs.last().unwrap_or(&0.0);
    (first.min(last), first.max(last))
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when they are collinear.
fn parabola_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return x1;
    }
    x1 - 0.5 * num / den
}

/// One interaction-blockade plateau of the half relative number.
#[derive(Clone, Debug)]
pub struct Plateau {
    pub axis_start: f64,
    pub axis_end: f64,
    /// Median of <N_r>/2 over the interval.
    pub value: f64,
    /// Largest deviation from the median inside the interval.
    pub max_dev: f64,
    pub points: usize,
}

/// Finds maximal intervals where <N_r>/2 stays within `tol` of its
/// interval median; intervals shorter than `min_points` are dropped.
/// The sweep must carry `mean_nr` on a delta axis.
pub fn detect_plateaus(result: &SweepResult, tol: f64, min_points: usize) -> Result<Vec<Plateau>> {
    if result.metadata.axis != Axis::Delta {
        return Err(Error::InvalidSweep(
            "plateau detection needs a delta axis".into(),
        ));
    }
    let col = result
        .column(Quantity::MeanNr)
        .ok_or_else(|| Error::InvalidSweep("mean_nr not in sweep".into()))?;
    let xs: Vec<f64> = result.rows.iter().map(|r| r.axis_value).collect();
    // Fig. 4(b) convention: plateaus live in the half relative number
    let ys: Vec<f64> = result.rows.iter().map(|r| r.values[col] / 2.0).collect();

    let mut plateaus = Vec::new();
    let mut start = 0;
    while start < ys.len() {
        // grow [start, end] while the window stays within tol of its
        // median; a single point always qualifies (deviation zero)
        let mut end = start;
        let mut accepted = (ys[start], 0.0);
        loop {
            let candidate = &ys[start..=end];
            let median = median_of(candidate);
            let max_dev = candidate
                .iter()
                .fold(0.0f64, |acc, &y| acc.max((y - median).abs()));
            if max_dev <= tol {
                accepted = (median, max_dev);
                if end + 1 == ys.len() {
                    break;
                }
                end += 1;
            } else {
                end -= 1;
                break;
            }
        }
        let points = end - start + 1;
        if points >= min_points {
            plateaus.push(Plateau {
                axis_start: xs[start],
                axis_end: xs[end],
                value: accepted.0,
                max_dev: accepted.1,
                points,
            });
        }
        start = end + 1;
    }
    Ok(plateaus)
}

fn median_of(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// The five bundled parameter studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub fn parse(s: &str) -> Option<FigureId> {
        match s {
            "fig1" => Some(FigureId::Fig1),
            "fig2" => Some(FigureId::Fig2),
            "fig3" => Some(FigureId::Fig3),
            "fig4" => Some(FigureId::Fig4),
            "fig5" => Some(FigureId::Fig5),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

/// Caller adjustments to a figure recipe.
#[derive(Clone, Debug, Default)]
pub struct FigureOverrides {
    /// Grid resolution (points on the primary axis).
    pub grid_count: Option<usize>,
    /// Temperature list for the thermal study (k_B T, absolute units).
    pub temps: Option<Vec<f64>>,
}

/// Plot hints the CLI uses to draw a curve.
#[derive(Clone, Debug)]
pub struct CurveStyle {
    /// Panel key, e.g. "fig1a"; curves sharing a panel overlay.
    pub panel: String,
    /// Multiply the axis value by this before plotting.
    pub x_factor: f64,
    pub log_x: bool,
    pub log_y: bool,
    pub x_label: String,
    pub y_label: String,
}

/// One named curve of a figure.
#[derive(Clone, Debug)]
pub struct NamedSweep {
    pub name: String,
    pub style: CurveStyle,
    pub result: SweepResult,
}

fn float_tag(x: f64) -> String {
    let mut s = format!("{x}");
    if s.contains('e') {
        s = format!("{x:e}");
    }
    s.replace('.', "p").replace('-', "m")
}

/// Runs one of the bundled studies and returns its curves.
///
/// Parameter sets follow the bundled defaults (see README); grid
/// densities and the fig5 temperature list accept overrides.
pub fn figure_recipe(id: FigureId, overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    match id {
        FigureId::Fig1 => fig1(overrides),
        FigureId::Fig2 => fig2(overrides),
        FigureId::Fig3 => fig3(overrides),
        FigureId::Fig4 => fig4(overrides),
        FigureId::Fig5 => fig5(overrides),
    }
}

fn style(panel: &str, x_factor: f64, log_x: bool, x_label: &str, y_label: &str) -> CurveStyle {
    CurveStyle {
        panel: panel.into(),
        x_factor,
        log_x,
        log_y: false,
        x_label: x_label.into(),
        y_label: y_label.into(),
    }
}

/// Symmetric ground states: coherence fluctuations vs E_C/E_J and
/// squeezing vs N^2 E_C/E_J for N in {2, 4, 50, 100}, with the Gaussian
/// ansatz at N = 100.
fn fig1(overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    let count = overrides.grid_count.unwrap_or(400);
    let grid = GridValues::Range {
        min: 1e-4,
        max: 1e4,
        count,
        scale: GridScale::Log,
    };
    let mut out = Vec::new();
    for n in [2u32, 4, 50, 100] {
        // E_J = 1, so the E_C axis is E_C/E_J directly
        let base = Junction::new(n, 1.0 / n as f64, 0.0, 0.0)?;
        let spec = SweepSpec::new(Axis::ChargingEc, grid.clone(), base, f64::INFINITY)
            .with_quantities(&[Quantity::VarCos, Quantity::InvSSquared]);
        let result = run_sweep(&spec)?;
        let mut a = result.clone();
        a.quantities = vec![Quantity::VarCos];
        a.rows = result
            .rows
            .iter()
            .map(|r| SweepRow {
                axis_value: r.axis_value,
                values: vec![r.values[0]],
            })
            .collect();
        out.push(NamedSweep {
            name: format!("fig1a_n{n}"),
            style: style("fig1a", 1.0, true, "E_C/E_J", "var_cos"),
            result: a,
        });
        let mut b = result.clone();
        b.quantities = vec![Quantity::InvSSquared];
        b.rows = result
            .rows
            .iter()
            .map(|r| SweepRow {
                axis_value: r.axis_value,
                values: vec![r.values[1]],
            })
            .collect();
        out.push(NamedSweep {
            name: format!("fig1b_n{n}"),
            style: style(
                "fig1b",
                (n as f64).powi(2),
                true,
                "N^2 E_C/E_J",
                "inv_s_squared",
            ),
            result: b,
        });
    }
    let base = Junction::new(100, 1e-2, 0.0, 0.0)?;
    let spec = SweepSpec::new(Axis::ChargingEc, grid, base, f64::INFINITY)
        .with_quantities(&[Quantity::GaussianVarCos, Quantity::GaussianInvSSquared]);
    let result = run_sweep(&spec)?;
    let mut a = result.clone();
    a.quantities = vec![Quantity::GaussianVarCos];
    a.rows = result
        .rows
        .iter()
        .map(|r| SweepRow {
            axis_value: r.axis_value,
            values: vec![r.values[0]],
        })
        .collect();
    out.push(NamedSweep {
        name: "fig1a_gaussian".into(),
        style: style("fig1a", 1.0, true, "E_C/E_J", "var_cos"),
        result: a,
    });
    let mut b = result.clone();
    b.quantities = vec![Quantity::GaussianInvSSquared];
    b.rows = result
        .rows
        .iter()
        .map(|r| SweepRow {
            axis_value: r.axis_value,
            values: vec![r.values[1]],
        })
        .collect();
    out.push(NamedSweep {
        name: "fig1b_gaussian".into(),
        style: style("fig1b", 1e4, true, "N^2 E_C/E_J", "inv_s_squared"),
        result: b,
    });
    Ok(out)
}

/// Asymmetric ground states at weak interaction: fluctuations and
/// squeezing vs delta/E_J for N = 100, E_J = 100,
/// E_C in {0, 1e-3, 1e-2} E_J.
fn fig2(overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    let count = overrides.grid_count.unwrap_or(400);
    let ej = 100.0;
    let grid = GridValues::Range {
        min: 0.0,
        max: 2.0 * ej,
        count,
        scale: GridScale::Linear,
    };
    let mut out = Vec::new();
    for ec in [0.0, 1e-3 * ej, 1e-2 * ej] {
        let base = Junction::new(100, 1.0, ec, 0.0)?;
        let spec = SweepSpec::new(Axis::Delta, grid.clone(), base, f64::INFINITY)
            .with_quantities(&[Quantity::VarCos, Quantity::InvSSquared]);
        let result = run_sweep(&spec)?;
        let tag = float_tag(ec);
        for (panel, q, label) in [
            ("fig2a", Quantity::VarCos, "var_cos"),
            ("fig2b", Quantity::InvSSquared, "inv_s_squared"),
        ] {
            let col = result.column(q).unwrap();
            let mut r = result.clone();
            r.quantities = vec![q];
            r.rows = result
                .rows
                .iter()
                .map(|row| SweepRow {
                    axis_value: row.axis_value,
                    values: vec![row.values[col]],
                })
                .collect();
            out.push(NamedSweep {
                name: format!("{panel}_ec{tag}"),
                style: style(panel, 1.0 / ej, false, "delta/E_J", label),
                result: r,
            });
        }
    }
    Ok(out)
}

/// Resonant suppression at strong interaction: fluctuations vs
/// delta/E_C for N = 100, E_J = 100, E_C in {100, 800}, with the
/// two-level perturbation curve alongside and a zoomed panel.
fn fig3(overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    let per_unit = overrides.grid_count.unwrap_or(64);
    let mut out = Vec::new();
    for ec in [100.0, 800.0] {
        let base = Junction::new(100, 1.0, ec, 0.0)?;
        let tag = float_tag(ec);
        for (panel, lo, hi, density) in [
            ("fig3a", -1.6, 1.6, per_unit),
            ("fig3b", -0.75, -0.25, per_unit * 8),
        ] {
            let count = ((hi - lo) * density as f64).round() as usize + 1;
            let grid = GridValues::Range {
                min: lo * ec,
                max: hi * ec,
                count,
                scale: GridScale::Linear,
            };
            let spec = SweepSpec::new(Axis::Delta, grid, base, f64::INFINITY)
                .with_quantities(&[Quantity::VarCos, Quantity::PerturbationVarCos]);
            out.push(NamedSweep {
                name: format!("{panel}_ec{tag}"),
                style: style(panel, 1.0 / ec, false, "delta/E_C", "var_cos"),
                result: run_sweep(&spec)?,
            });
        }
    }
    Ok(out)
}

/// Interaction blockade: D(N_r) peaks and <N_r>/2 plateaus vs delta/E_C
/// for N = 10, E_J = 10, E_C/E_J in {100, 10, 1}.
fn fig4(overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    let per_unit = overrides.grid_count.unwrap_or(64);
    let mut out = Vec::new();
    for ec in [1000.0, 100.0, 10.0] {
        let base = Junction::new(10, 1.0, ec, 0.0)?;
        let count = (12.0 * per_unit as f64).round() as usize + 1;
        let grid = GridValues::Range {
            min: -6.0 * ec,
            max: 6.0 * ec,
            count,
            scale: GridScale::Linear,
        };
        let spec = SweepSpec::new(Axis::Delta, grid, base, f64::INFINITY)
            .with_quantities(&[Quantity::VarNr, Quantity::MeanNr]);
        let result = run_sweep(&spec)?;
        let tag = float_tag(ec);
        for (panel, q, label) in [
            ("fig4a", Quantity::VarNr, "var_nr"),
            ("fig4b", Quantity::MeanNr, "half_nr"),
        ] {
            let col = result.column(q).unwrap();
            let mut r = result.clone();
            r.quantities = vec![q];
            r.rows = result
                .rows
                .iter()
                .map(|row| SweepRow {
                    axis_value: row.axis_value,
                    values: vec![row.values[col]],
                })
                .collect();
            out.push(NamedSweep {
                name: format!("{panel}_ec{tag}"),
                style: style(panel, 1.0 / ec, false, "delta/E_C", label),
                result: r,
            });
        }
    }
    Ok(out)
}

/// Thermal fluctuations vs E_C/E_J for N = 100, E_J in {1.0, 0.5}, at
/// the bundled temperatures, with the classical Boltzmann estimate and
/// level-spacing companions.
fn fig5(overrides: &FigureOverrides) -> Result<Vec<NamedSweep>> {
    let count = overrides.grid_count.unwrap_or(150);
    let temps = overrides
        .temps
        .clone()
        .unwrap_or_else(|| vec![0.01, 0.1, 0.5]);
    let mut out = Vec::new();
    for ej in [1.0, 0.5] {
        let base = Junction::new(100, ej / 100.0, 0.0, 0.0)?;
        let grid = GridValues::Range {
            min: 1e-5 * ej,
            max: 1e-1 * ej,
            count,
            scale: GridScale::Log,
        };
        let ej_tag = float_tag(ej);
        for &temp in &temps {
            if temp.is_nan() || temp <= 0.0 || !temp.is_finite() {
                return Err(Error::InvalidSweep(format!(
                    "temperature {temp} must be positive and finite"
                )));
            }
            let beta = 1.0 / temp;
            let t_tag = float_tag(temp);
            let spec = SweepSpec::new(Axis::ChargingEc, grid.clone(), base, beta)
                .with_quantities(&[Quantity::VarCos, Quantity::VarCosPerState]);
            out.push(NamedSweep {
                name: format!("fig5_ej{ej_tag}_t{t_tag}"),
                style: style("fig5", 1.0 / ej, true, "E_C/E_J", "var_cos"),
                result: run_sweep(&spec)?,
            });
            let spec = SweepSpec::new(Axis::ChargingEc, grid.clone(), base, beta)
                .with_quantities(&[Quantity::ClassicalVarCos]);
            out.push(NamedSweep {
                name: format!("fig5cl_ej{ej_tag}_t{t_tag}"),
                style: style("fig5", 1.0 / ej, true, "E_C/E_J", "var_cos"),
                result: run_sweep(&spec)?,
            });
        }
        let spec = SweepSpec::new(Axis::ChargingEc, grid, base, f64::INFINITY)
            .with_quantities(&[Quantity::MeanSpacing, Quantity::UpperMeanSpacing]);
        out.push(NamedSweep {
            name: format!("fig5sp_ej{ej_tag}"),
            style: style("fig5sp", 1.0 / ej, true, "E_C/E_J", "mean_spacing"),
            result: run_sweep(&spec)?,
        });
    }
    Ok(out)
}
