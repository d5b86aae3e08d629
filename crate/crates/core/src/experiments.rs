//! Monte Carlo harness.
//!
//! Every sweep point re-runs the same population: node positions depend only
//! on `(seed, trial)` and the shadowing draws of one link only on
//! `(seed, trial, node, anchor)`. Sweep points therefore share random numbers,
//! which keeps error curves smooth, and the outcome does not depend on how
//! many threads evaluate the nodes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_rss, EnvironmentParams, LinkGeometry};
use crate::error::{Error, Result};
use crate::estimation::{crlb_sigma, crlb_sigma_samples, mle_distance, ElevationModel, SearchConfig};
use crate::geometry::{build_constellation, in_coverage, link_geometry, ring_nodes, sample_nodes_uniform_disk, Anchor, ConstellationSpec, NodePosition};
use crate::localization::{localization_error, multilaterate, position_error, SolverConfig};
use crate::rng::{substream, Purpose};

/// Lowest admissible UAV altitude, m.
pub const H_MIN: f64 = 50.0;

/// Exact CSV header written by [`write_results`].
pub const RESULTS_HEADER: &str = "sweep_value,mean_error_m,error_std_m,mean_position_error_m,n_nodes,n_trials,seed";

/// Exact CSV header written by [`write_crlb_table`].
pub const CRLB_HEADER: &str =
    "r_m,h_m,crlb_sigma_m,crlb_sigma_n_m,mle_std_m,mle_bias_m,coupled_mle_std_m,coupled_mle_bias_m,boundary_fraction";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Altitude,
    InterDistance,
    AnchorCount,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Altitude => "altitude",
            SweepVariable::InterDistance => "inter_distance",
            SweepVariable::AnchorCount => "anchor_count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// `start, start + step, ...` up to and including `stop`.
    pub fn range(variable: SweepVariable, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(Error::InvalidArgument(format!("bad sweep range {start}..={stop} step {step}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok(Self {
            variable,
            values: (0..=n).map(|i| start + i as f64 * step).collect(),
        })
    }
}

/// Where the evaluated terrestrial nodes are placed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum NodeLayout {
    /// Fresh uniform draw over the deployment disk for every trial.
    Disk,
    /// Nodes at a fixed distance from the centroid, cycling over
    /// equally spaced azimuths.
    Ring { distance: f64, azimuths: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSettings {
    pub d_max: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl EstimatorSettings {
    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            d_max: self.d_max,
            grid_points: self.grid_points,
            tolerance: self.tolerance,
            elevation: ElevationModel::Coupled,
        }
    }
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        let s = SearchConfig::default();
        Self {
            d_max: s.d_max,
            grid_points: s.grid_points,
            tolerance: s.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrlbStudy {
    pub r_values: Vec<f64>,
    pub repetitions: usize,
}

impl Default for CrlbStudy {
    fn default() -> Self {
        Self {
            r_values: vec![10.0, 500.0, 1000.0],
            repetitions: 10_000,
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub node_count: usize,
    pub deployment_radius: f64,
    pub samples_per_anchor: usize,
    pub trials: usize,
    /// Preset the environment was derived from, if any.
    pub environment_name: Option<String>,
    pub environment: EnvironmentParams,
    pub constellation: ConstellationSpec,
    /// Horizontal coverage radius of every anchor; `None` is unbounded.
    pub coverage_radius: Option<f64>,
    pub nodes: NodeLayout,
    pub sweep: SweepSpec,
    pub estimator: EstimatorSettings,
    pub solver: SolverConfig,
    pub crlb: CrlbStudy,
}

impl ExperimentConfig {
    /// Defaults for the given study in the given environment.
    pub fn default_for(variable: SweepVariable, environment: EnvironmentParams) -> Self {
        let deployment_radius = 1000.0;
        let (sweep, nodes) = match variable {
            SweepVariable::Altitude => (SweepSpec::range(variable, 100.0, 3000.0, 50.0), NodeLayout::Disk),
            SweepVariable::InterDistance => (
                SweepSpec::range(variable, 100.0, 2000.0, 100.0),
                NodeLayout::Ring { distance: 650.0, azimuths: 8 },
            ),
            SweepVariable::AnchorCount => (
                SweepSpec::range(variable, 3.0, 30.0, 3.0),
                NodeLayout::Ring { distance: 650.0, azimuths: 8 },
            ),
        };
        Self {
            seed: 1,
            node_count: 1000,
            deployment_radius,
            samples_per_anchor: 5,
            trials: 1,
            environment_name: None,
            environment,
            constellation: ConstellationSpec::default(),
            coverage_radius: None,
            nodes,
            sweep: sweep.expect("static sweep range"),
            estimator: EstimatorSettings {
                d_max: 20.0 * deployment_radius,
                ..EstimatorSettings::default()
            },
            solver: SolverConfig::for_deployment_radius(deployment_radius),
            crlb: CrlbStudy::default(),
        }
    }

    pub fn urban(variable: SweepVariable) -> Self {
        Self {
            environment_name: Some("urban".into()),
            ..Self::default_for(variable, EnvironmentParams::urban())
        }
    }

    pub fn suburban(variable: SweepVariable) -> Self {
        Self {
            environment_name: Some("suburban".into()),
            ..Self::default_for(variable, EnvironmentParams::suburban())
        }
    }

    /// Checks every constraint; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.node_count == 0 {
            return bad("node_count must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.samples_per_anchor == 0 {
            return bad("samples_per_anchor must be at least 1".into());
        }
        if !(self.deployment_radius > 0.0 && self.deployment_radius.is_finite()) {
            return bad(format!("deployment_radius must be positive, got {}", self.deployment_radius));
        }
        if let Some(r) = self.coverage_radius {
            if !(r > 0.0) {
                return bad(format!("coverage_radius must be positive, got {r}"));
            }
        }
        if let NodeLayout::Ring { distance, azimuths } = self.nodes {
            if !(distance >= 0.0 && distance.is_finite()) || azimuths == 0 {
                return bad("nodes: ring needs a non-negative distance and at least one azimuth".into());
            }
        }
        if self.environment.is_noiseless() {
            EnvironmentParams { a_los: 1.0, a_nlos: 1.0, ..self.environment }.validate()?;
        } else {
            self.environment.validate()?;
        }
        self.constellation.validate()?;
        if self.constellation.altitude < H_MIN {
            return bad(format!(
                "constellation.altitude = {} m is below the minimum altitude h_min = {H_MIN} m",
                self.constellation.altitude
            ));
        }
        let values = &self.sweep.values;
        if values.is_empty() {
            return bad("sweep.values must not be empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("sweep.values must be finite and strictly increasing".into());
        }
        match self.sweep.variable {
            SweepVariable::Altitude => {
                if let Some(h) = values.iter().find(|&&h| h < H_MIN) {
                    return bad(format!(
                        "sweep.values: altitude {h} m is below the minimum altitude h_min = {H_MIN} m"
                    ));
                }
            }
            SweepVariable::InterDistance => {
                if let Some(l) = values.iter().find(|&&l| !(l > 0.0)) {
                    return bad(format!("sweep.values: inter-distance {l} m must be positive"));
                }
            }
            SweepVariable::AnchorCount => {
                if let Some(n) = values.iter().find(|&&n| n < 3.0 || n.fract() != 0.0 || (n as usize) % 3 != 0) {
                    return bad(format!("sweep.values: anchor count {n} is not a positive multiple of 3"));
                }
            }
        }
        let highest = match self.sweep.variable {
            SweepVariable::Altitude => values[values.len() - 1],
            _ => self.constellation.altitude,
        };
        if !(self.estimator.d_max > highest) {
            return bad(format!("estimator.d_max = {} m must exceed every anchor altitude", self.estimator.d_max));
        }
        if self.estimator.grid_points < 2 || !(self.estimator.tolerance > 0.0) {
            return bad("estimator needs grid_points >= 2 and a positive tolerance".into());
        }
        if self.solver.max_iterations == 0 || !(self.solver.step_tolerance > 0.0) || !(self.solver.grid_half_width > 0.0) {
            return bad("solver needs max_iterations >= 1, positive step_tolerance and grid_half_width".into());
        }
        if self.crlb.repetitions == 0 {
            return bad("crlb.repetitions must be at least 1".into());
        }
        if let Some(r) = self.crlb.r_values.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return bad(format!("crlb.r_values: {r} is not a finite non-negative distance"));
        }
        Ok(())
    }

    /// Constellation used at one sweep point.
    pub fn constellation_at(&self, value: f64) -> ConstellationSpec {
        let mut spec = self.constellation;
        match self.sweep.variable {
            SweepVariable::Altitude => spec.altitude = value,
            SweepVariable::InterDistance => spec.base_side = value,
            SweepVariable::AnchorCount => spec.n_anchors = value as usize,
        }
        spec
    }

    /// Evaluated node positions of one trial.
    pub fn nodes_for_trial(&self, trial: usize) -> Result<Vec<NodePosition>> {
        let center = self.constellation.centroid;
        match self.nodes {
            NodeLayout::Disk => {
                let mut rng = substream(self.seed, Purpose::NodePlacement, &[trial as u64]);
                sample_nodes_uniform_disk(self.node_count, self.deployment_radius, center, &mut rng)
            }
            NodeLayout::Ring { distance, azimuths } => ring_nodes(self.node_count, distance, azimuths, center),
        }
    }
}

/// Per-point bookkeeping that does not enter the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMetadata {
    pub n_nodes: usize,
    pub n_trials: usize,
    pub seed: u64,
    /// Node evaluations that entered the averages.
    pub evaluated: usize,
    pub median_error: f64,
    /// Position fixes whose solver hit the iteration cap.
    pub unconverged_fixes: usize,
    /// Range estimates that landed on an end of the search interval.
    pub boundary_estimates: usize,
    /// Node evaluations heard by fewer than three anchors.
    pub uncovered_nodes: usize,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    /// Range-space error ξ averaged over nodes and trials, m.
    pub mean_error: Vec<f64>,
    /// Sample standard deviation of the per-node ξ values, m.
    pub error_std: Vec<f64>,
    /// Planar position error averaged over nodes and trials, m.
    pub mean_position_error: Vec<f64>,
    pub points: Vec<PointMetadata>,
    /// Mean horizontal distance of the evaluated nodes to the constellation centroid, m.
    pub mean_node_distance: f64,
}

impl ExperimentResult {
    /// Index of the smallest mean error; ties go to the earliest sweep value.
    pub fn argmin(&self) -> usize {
        argmin_with_tolerance(&self.mean_error, 0.0)
    }

    /// Same as [`argmin`](Self::argmin) for the planar position error.
    pub fn argmin_position(&self) -> usize {
        argmin_with_tolerance(&self.mean_position_error, 0.0)
    }

    /// Drops timing so results from different runs compare equal.
    pub fn without_timing(mut self) -> Self {
        for p in &mut self.points {
            p.runtime_s = 0.0;
        }
        self
    }
}

fn argmin_with_tolerance(values: &[f64], tol: f64) -> usize {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.iter().position(|&v| v <= min + tol).unwrap_or(0)
}

struct NodeOutcome {
    xi: f64,
    position_error: f64,
    converged: bool,
    boundary: usize,
}

fn evaluate_node(
    cfg: &ExperimentConfig,
    anchors: &[Anchor],
    search: &SearchConfig,
    trial: usize,
    index: usize,
    node: &NodePosition,
) -> Result<Option<NodeOutcome>> {
    let mut heard = Vec::with_capacity(anchors.len());
    let mut r_hat = Vec::with_capacity(anchors.len());
    let mut r_true = Vec::with_capacity(anchors.len());
    let mut boundary = 0;
    for (a, anchor) in anchors.iter().enumerate() {
        if !in_coverage(anchor, node) {
            continue;
        }
        let geom = link_geometry(anchor, node);
        let mut rng = substream(cfg.seed, Purpose::Shadowing, &[trial as u64, index as u64, a as u64]);
        let samples = sample_rss(&geom, &cfg.environment, cfg.samples_per_anchor, &mut rng)?;
        let est = mle_distance(&samples, anchor.h, &cfg.environment, search)?;
        boundary += est.boundary as usize;
        heard.push(*anchor);
        r_hat.push(est.r_hat);
        r_true.push(geom.r);
    }
    if heard.len() < 3 {
        return Ok(None);
    }
    let xi = localization_error(&r_hat, &r_true)?;
    let fix = multilaterate(&heard, &r_hat, &cfg.solver)?;
    Ok(Some(NodeOutcome {
        xi,
        position_error: position_error(&fix, node),
        converged: fix.converged,
        boundary,
    }))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

fn run_sweep(cfg: &ExperimentConfig, expected: SweepVariable) -> Result<ExperimentResult> {
    if cfg.sweep.variable != expected {
        return Err(Error::InvalidArgument(format!(
            "config sweeps {} but a {} sweep was requested",
            cfg.sweep.variable.name(),
            expected.name()
        )));
    }
    cfg.validate()?;
    let search = cfg.estimator.search();
    let populations: Vec<Vec<NodePosition>> = (0..cfg.trials).map(|t| cfg.nodes_for_trial(t)).collect::<Result<_>>()?;
    let centroid = cfg.constellation.centroid;
    let all: Vec<f64> = populations.iter().flatten().map(|n| n.distance_to(&centroid)).collect();
    let mean_node_distance = mean(&all);

    let mut result = ExperimentResult {
        variable: cfg.sweep.variable,
        sweep_values: cfg.sweep.values.clone(),
        mean_error: Vec::new(),
        error_std: Vec::new(),
        mean_position_error: Vec::new(),
        points: Vec::new(),
        mean_node_distance,
    };

    for &value in &cfg.sweep.values {
        let started = Instant::now();
        let mut anchors = build_constellation(&cfg.constellation_at(value))?;
        if let Some(radius) = cfg.coverage_radius {
            for a in &mut anchors {
                *a = a.with_coverage_radius(radius)?;
            }
        }
        let mut xi = Vec::with_capacity(cfg.trials * cfg.node_count);
        let mut pos = Vec::with_capacity(cfg.trials * cfg.node_count);
        let (mut unconverged, mut boundary, mut uncovered) = (0, 0, 0);
        for (trial, nodes) in populations.iter().enumerate() {
            let outcomes: Vec<Option<NodeOutcome>> = nodes
                .par_iter()
                .enumerate()
                .map(|(i, node)| evaluate_node(cfg, &anchors, &search, trial, i, node))
                .collect::<Result<_>>()?;
            for outcome in outcomes {
                match outcome {
                    Some(o) => {
                        xi.push(o.xi);
                        pos.push(o.position_error);
                        unconverged += (!o.converged) as usize;
                        boundary += o.boundary;
                    }
                    None => uncovered += 1,
                }
            }
        }
        if xi.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no node is covered by three anchors at {} = {value}",
                cfg.sweep.variable.name()
            )));
        }
        result.mean_error.push(mean(&xi));
        result.error_std.push(sample_std(&xi));
        result.mean_position_error.push(mean(&pos));
        result.points.push(PointMetadata {
            n_nodes: cfg.node_count,
            n_trials: cfg.trials,
            seed: cfg.seed,
            evaluated: xi.len(),
            median_error: median(&xi),
            unconverged_fixes: unconverged,
            boundary_estimates: boundary,
            uncovered_nodes: uncovered,
            runtime_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(result)
}

/// Localization error versus UAV altitude.
pub fn run_altitude_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_sweep(cfg, SweepVariable::Altitude)
}

/// Localization error versus triangle side length.
pub fn run_inter_distance_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_sweep(cfg, SweepVariable::InterDistance)
}

/// Localization error versus number of anchors.
pub fn run_anchor_count_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_sweep(cfg, SweepVariable::AnchorCount)
}

/// Outcome of [`optimize_altitude`].
#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeOptimum {
    pub h_opt: f64,
    pub error_at_opt: f64,
    /// `atan(h_opt / r̄)` with r̄ the mean node distance to the centroid, rad.
    pub theta_opt: f64,
    pub mean_node_distance: f64,
    pub sweep: ExperimentResult,
}

/// Mean errors within this distance of the minimum count as ties, m.
pub const ALTITUDE_TIE_TOLERANCE: f64 = 0.01;

/// Grid search for the altitude with the smallest mean ξ. Errors within
/// [`ALTITUDE_TIE_TOLERANCE`] of the minimum tie, and ties go to the lowest altitude.
pub fn optimize_altitude(cfg: &ExperimentConfig) -> Result<AltitudeOptimum> {
    let sweep = run_altitude_sweep(cfg)?;
    let i = argmin_with_tolerance(&sweep.mean_error, ALTITUDE_TIE_TOLERANCE);
    let h_opt = sweep.sweep_values[i];
    Ok(AltitudeOptimum {
        h_opt,
        error_at_opt: sweep.mean_error[i],
        theta_opt: h_opt.atan2(sweep.mean_node_distance),
        mean_node_distance: sweep.mean_node_distance,
        sweep,
    })
}

/// One `(r, h)` cell of the bound-versus-estimator study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrlbRow {
    pub r: f64,
    pub h: f64,
    /// Per-sample closed-form bound, m.
    pub crlb_sigma: f64,
    /// Bound for `samples_per_anchor` samples, m.
    pub crlb_sigma_n: f64,
    /// Spread of the elevation-conditioned estimator, m.
    pub mle_std: f64,
    pub mle_bias: f64,
    /// Spread of the altitude-only estimator, m.
    pub coupled_mle_std: f64,
    pub coupled_mle_bias: f64,
    /// Share of conditioned estimates on the search boundary.
    pub boundary_fraction: f64,
}

/// Single-anchor ranging study. For every `r` in `r_values` and every
/// altitude of the sweep grid, `cfg.crlb.repetitions` sample sets are drawn
/// and ranged by both estimator models.
pub fn run_crlb_comparison(cfg: &ExperimentConfig, r_values: &[f64]) -> Result<Vec<CrlbRow>> {
    if cfg.sweep.variable != SweepVariable::Altitude {
        return Err(Error::InvalidArgument("the CRLB study sweeps altitude".into()));
    }
    cfg.validate()?;
    if r_values.is_empty() {
        return Err(Error::InvalidArgument("r_values must not be empty".into()));
    }
    let env = &cfg.environment;
    let base = cfg.estimator.search();
    let mut rows = Vec::with_capacity(r_values.len() * cfg.sweep.values.len());
    for (ri, &r) in r_values.iter().enumerate() {
        for (hi, &h) in cfg.sweep.values.iter().enumerate() {
            let geom = LinkGeometry::new(r, h)?;
            let d = geom.d();
            let conditioned = base.with_elevation(ElevationModel::Conditioned(geom.theta()));
            let estimates: Vec<(f64, f64, bool)> = (0..cfg.crlb.repetitions)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = substream(cfg.seed, Purpose::RangeStudy, &[ri as u64, hi as u64, rep as u64]);
                    let samples = sample_rss(&geom, env, cfg.samples_per_anchor, &mut rng)?;
                    let c = mle_distance(&samples, h, env, &conditioned)?;
                    let u = mle_distance(&samples, h, env, &base)?;
                    Ok((c.d_hat, u.d_hat, c.boundary))
                })
                .collect::<Result<_>>()?;
            let cond: Vec<f64> = estimates.iter().map(|e| e.0).collect();
            let coup: Vec<f64> = estimates.iter().map(|e| e.1).collect();
            let at_boundary = estimates.iter().filter(|e| e.2).count();
            rows.push(CrlbRow {
                r,
                h,
                crlb_sigma: crlb_sigma(&geom, env)?,
                crlb_sigma_n: crlb_sigma_samples(&geom, env, cfg.samples_per_anchor)?,
                mle_std: sample_std(&cond),
                mle_bias: mean(&cond) - d,
                coupled_mle_std: sample_std(&coup),
                coupled_mle_bias: mean(&coup) - d,
                boundary_fraction: at_boundary as f64 / cfg.crlb.repetitions as f64,
            });
        }
    }
    Ok(rows)
}

/// Sidecar path for a CSV output: `out.csv` → `out.meta.toml`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    library: &'static str,
    version: &'static str,
    kind: &'a str,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_node_distance_m: Option<f64>,
    points: &'a [T],
}

fn write_sidecar<T: Serialize>(csv_path: &Path, kind: &str, cfg: &ExperimentConfig, mean_r: Option<f64>, points: &[T]) -> Result<()> {
    let sidecar = Sidecar {
        library: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind,
        config: cfg,
        mean_node_distance_m: mean_r,
        points,
    };
    let path = metadata_path(csv_path);
    let text = toml::to_string(&sidecar).map_err(|e| Error::Config {
        path: path.clone(),
        message: format!("cannot serialize metadata: {e}"),
    })?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one CSV row per sweep value plus a `.meta.toml` sidecar holding the
/// resolved config and per-point metadata.
pub fn write_results(result: &ExperimentResult, cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RESULTS_HEADER.split(',')).map_err(csv_err(path))?;
    for (i, value) in result.sweep_values.iter().enumerate() {
        let meta = &result.points[i];
        w.write_record([
            value.to_string(),
            result.mean_error[i].to_string(),
            result.error_std[i].to_string(),
            result.mean_position_error[i].to_string(),
            meta.n_nodes.to_string(),
            meta.n_trials.to_string(),
            meta.seed.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_sidecar(path, result.variable.name(), cfg, Some(result.mean_node_distance), &result.points)
}

pub fn write_crlb_table(rows: &[CrlbRow], cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CRLB_HEADER.split(',')).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(
            [
                row.r,
                row.h,
                row.crlb_sigma,
                row.crlb_sigma_n,
                row.mle_std,
                row.mle_bias,
                row.coupled_mle_std,
                row.coupled_mle_bias,
                row.boundary_fraction,
            ]
            .map(|v| v.to_string()),
        )
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_sidecar::<CrlbRow>(path, "crlb", cfg, None, &[])
}

/// One parsed row of a results CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub mean_error_m: f64,
    pub error_std_m: f64,
    pub mean_position_error_m: f64,
    pub n_nodes: usize,
    pub n_trials: usize,
    pub seed: u64,
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}
