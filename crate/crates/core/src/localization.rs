//! Multilateration and error metrics.
//!
//! The node position minimizes `F(p) = Σ (‖p - p_i‖ - r̂_i)²` over the plane.
//! [`multilaterate`] runs Levenberg-damped Gauss-Newton from the centroid of
//! the anchor projections. If that run stops without converging, or stops at
//! a stationary point that is not a local minimum, the objective is scanned on
//! a square grid and the solver is restarted from the best cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Anchor, NodePosition};

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Convergence threshold on the accepted step length, m.
    pub step_tolerance: f64,
    /// Half-width of the fallback grid around the anchor centroid, m.
    pub grid_half_width: f64,
    /// Grid cells per half-width; pitch is `grid_half_width / grid_divisions`.
    pub grid_divisions: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            step_tolerance: 1e-4,
            grid_half_width: 1000.0,
            grid_divisions: 50,
        }
    }
}

impl SolverConfig {
    pub fn for_deployment_radius(radius: f64) -> Self {
        Self {
            grid_half_width: radius,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionFix {
    pub x_hat: f64,
    pub y_hat: f64,
    /// Objective value at the returned point, m².
    pub residual: f64,
    pub converged: bool,
    /// Linear solves performed, across all restarts.
    pub iterations: usize,
    pub used_grid_fallback: bool,
}

impl PositionFix {
    pub fn position(&self) -> NodePosition {
        NodePosition::new(self.x_hat, self.y_hat)
    }
}

struct Problem<'a> {
    anchors: &'a [Anchor],
    ranges: &'a [f64],
}

impl Problem<'_> {
    fn objective(&self, x: f64, y: f64) -> f64 {
        self.anchors
            .iter()
            .zip(self.ranges)
            .map(|(a, r)| {
                let e = (x - a.x).hypot(y - a.y) - r;
                e * e
            })
            .sum()
    }

    /// Returns `(JᵀJ, Jᵀf)` as `[a11, a12, a22]` and `[g1, g2]`.
    fn normal_equations(&self, x: f64, y: f64) -> ([f64; 3], [f64; 2]) {
        let mut jtj = [0.0; 3];
        let mut jtf = [0.0; 2];
        for (a, r) in self.anchors.iter().zip(self.ranges) {
            let (dx, dy) = (x - a.x, y - a.y);
            let rho = dx.hypot(dy);
            if rho == 0.0 {
                continue;
            }
            let (ux, uy) = (dx / rho, dy / rho);
            let f = rho - r;
            jtj[0] += ux * ux;
            jtj[1] += ux * uy;
            jtj[2] += uy * uy;
            jtf[0] += ux * f;
            jtf[1] += uy * f;
        }
        (jtj, jtf)
    }

    /// Exact Hessian of the objective is positive definite at `(x, y)`.
    fn is_local_min(&self, x: f64, y: f64) -> bool {
        let mut h = [0.0; 3];
        for (a, r) in self.anchors.iter().zip(self.ranges) {
            let (dx, dy) = (x - a.x, y - a.y);
            let rho = dx.hypot(dy);
            if rho == 0.0 {
                // Cone tip: objective grows in every direction when r > 0.
                continue;
            }
            let (ux, uy) = (dx / rho, dy / rho);
            let k = 1.0 - r / rho;
            h[0] += ux * ux + k * (1.0 - ux * ux);
            h[1] += ux * uy - k * ux * uy;
            h[2] += uy * uy + k * (1.0 - uy * uy);
        }
        let scale = self.anchors.len() as f64;
        h[0] > 1e-9 * scale && h[0] * h[2] - h[1] * h[1] > 1e-12 * scale * scale
    }
}

struct Run {
    x: f64,
    y: f64,
    value: f64,
    converged: bool,
    iterations: usize,
}

fn damped_gauss_newton(p: &Problem, start: (f64, f64), cfg: &SolverConfig, trace: &mut Option<&mut Vec<f64>>) -> Run {
    let (mut x, mut y) = start;
    let mut value = p.objective(x, y);
    if let Some(t) = trace.as_deref_mut() {
        t.push(value);
    }
    let mut lambda = LAMBDA_INIT;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        let (jtj, jtf) = p.normal_equations(x, y);
        if jtf[0].hypot(jtf[1]) < 1e-12 {
            converged = true;
            break;
        }
        let mu = lambda * (1.0 + 0.5 * (jtj[0] + jtj[2]));
        let a11 = jtj[0] + mu;
        let a22 = jtj[2] + mu;
        let det = a11 * a22 - jtj[1] * jtj[1];
        iterations += 1;
        if !(det.abs() > f64::MIN_POSITIVE) {
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                break;
            }
            continue;
        }
        let sx = -(a22 * jtf[0] - jtj[1] * jtf[1]) / det;
        let sy = -(a11 * jtf[1] - jtj[1] * jtf[0]) / det;
        let candidate = p.objective(x + sx, y + sy);
        if candidate < value {
            x += sx;
            y += sy;
            value = candidate;
            if let Some(t) = trace.as_deref_mut() {
                t.push(value);
            }
            lambda = (lambda / 10.0).max(1e-12);
            if sx.hypot(sy) < cfg.step_tolerance {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                // No descent direction left at this scale: stationary point.
                converged = true;
                break;
            }
        }
    }
    Run {
        x,
        y,
        value,
        converged,
        iterations,
    }
}

fn check_inputs(anchors: &[Anchor], r_hats: &[f64]) -> Result<()> {
    if anchors.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "multilateration needs at least 3 anchors, got {}",
            anchors.len()
        )));
    }
    if anchors.len() != r_hats.len() {
        return Err(Error::InvalidArgument(format!(
            "{} anchors but {} range estimates",
            anchors.len(),
            r_hats.len()
        )));
    }
    if let Some(r) = r_hats.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument(format!("range estimate {r} is not a finite non-negative value")));
    }
    // Spread of the projections along their minor principal axis.
    let n = anchors.len() as f64;
    let cx = anchors.iter().map(|a| a.x).sum::<f64>() / n;
    let cy = anchors.iter().map(|a| a.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for a in anchors {
        let (dx, dy) = (a.x - cx, a.y - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let minor = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
    if !(minor > 1e-10 * tr) {
        return Err(Error::DegenerateGeometry("anchor projections are collinear".into()));
    }
    Ok(())
}

fn solve(anchors: &[Anchor], r_hats: &[f64], cfg: &SolverConfig, mut trace: Option<&mut Vec<f64>>) -> Result<PositionFix> {
    check_inputs(anchors, r_hats)?;
    let p = Problem { anchors, ranges: r_hats };
    let n = anchors.len() as f64;
    let centroid = (
        anchors.iter().map(|a| a.x).sum::<f64>() / n,
        anchors.iter().map(|a| a.y).sum::<f64>() / n,
    );

    let first = damped_gauss_newton(&p, centroid, cfg, &mut trace);
    let mut iterations = first.iterations;
    let mut best = first;
    let mut used_grid_fallback = false;

    if !best.converged || !p.is_local_min(best.x, best.y) {
        used_grid_fallback = true;
        let divisions = cfg.grid_divisions.max(1) as i64;
        let pitch = cfg.grid_half_width / divisions as f64;
        let mut start = (best.x, best.y);
        let mut start_value = best.value;
        for i in -divisions..=divisions {
            for j in -divisions..=divisions {
                let (x, y) = (centroid.0 + i as f64 * pitch, centroid.1 + j as f64 * pitch);
                let v = p.objective(x, y);
                if v < start_value {
                    start = (x, y);
                    start_value = v;
                }
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.clear();
        }
        let second = damped_gauss_newton(&p, start, cfg, &mut trace);
        iterations += second.iterations;
        if second.value <= best.value || !best.converged {
            best = second;
        }
    }

    Ok(PositionFix {
        x_hat: best.x,
        y_hat: best.y,
        residual: best.value,
        converged: best.converged,
        iterations,
        used_grid_fallback,
    })
}

/// Least-squares node position from horizontal range estimates.
pub fn multilaterate(anchors: &[Anchor], r_hats: &[f64], solver: &SolverConfig) -> Result<PositionFix> {
    solve(anchors, r_hats, solver, None)
}

/// Like [`multilaterate`], also returning the objective after every accepted
/// step of the final solver run.
pub fn multilaterate_traced(anchors: &[Anchor], r_hats: &[f64], solver: &SolverConfig) -> Result<(PositionFix, Vec<f64>)> {
    let mut trace = Vec::new();
    let fix = solve(anchors, r_hats, solver, Some(&mut trace))?;
    Ok((fix, trace))
}

/// Euclidean norm of the per-anchor range errors.
pub fn localization_error(r_hat: &[f64], r_true: &[f64]) -> Result<f64> {
    if r_hat.is_empty() || r_hat.len() != r_true.len() {
        return Err(Error::InvalidArgument(format!(
            "range vectors must be non-empty and equal length, got {} and {}",
            r_hat.len(),
            r_true.len()
        )));
    }
    Ok(r_hat
        .iter()
        .zip(r_true)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Planar distance between a fix and the true node position.
pub fn position_error(fix: &PositionFix, truth: &NodePosition) -> f64 {
    fix.position().distance_to(truth)
}
