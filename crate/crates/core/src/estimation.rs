//! Range estimation from received-power samples.
//!
//! [`mle_distance`] maximizes the Gaussian log-likelihood of the samples over
//! the direct distance `d ∈ [h, d_max]`. Two likelihood models are offered:
//!
//! - [`ElevationModel::Coupled`]: only the anchor altitude is known, so the
//!   elevation is tied to the unknown distance through `θ(d) = asin(h / d)`
//!   and both α and σ move with `d`. This is what a deployed system can do.
//! - [`ElevationModel::Conditioned`]: the elevation is supplied, α and σ are
//!   frozen, and `d` enters only through `log10(d)`. This is the estimator the
//!   closed-form bound in [`crlb_sigma`] speaks about.
//!
//! The search is a log-spaced grid followed by golden-section refinement
//! around the best grid cell.

use std::f64::consts::LN_10;

use rand::Rng;

use crate::channel::{sample_rss, EnvironmentParams, LinkGeometry, RssSampleSet};
use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElevationModel {
    /// Elevation follows the candidate distance, `θ = asin(h / d)`.
    Coupled,
    /// Elevation is known and fixed (radians).
    Conditioned(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Upper end of the distance search interval, m.
    pub d_max: f64,
    /// Number of log-spaced coarse grid points.
    pub grid_points: usize,
    /// Golden-section stopping width, m.
    pub tolerance: f64,
    pub elevation: ElevationModel,
}

impl SearchConfig {
    /// Search bounded at ten times the deployment diameter.
    pub fn for_deployment_radius(radius: f64) -> Self {
        Self {
            d_max: 20.0 * radius,
            ..Self::default()
        }
    }

    pub fn with_elevation(mut self, elevation: ElevationModel) -> Self {
        self.elevation = elevation;
        self
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            d_max: 20_000.0,
            grid_points: 512,
            tolerance: 0.01,
            elevation: ElevationModel::Coupled,
        }
    }
}

/// Result of ranging one anchor-node link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEstimate {
    /// Estimated direct distance, m.
    pub d_hat: f64,
    /// Implied horizontal distance `sqrt(d_hat² - h²)`, m.
    pub r_hat: f64,
    /// Closed-form per-sample bound at the true geometry, when known.
    pub crlb_sigma: Option<f64>,
    /// Log-likelihood at `d_hat` in nats. For a noiseless environment this
    /// is the negated squared residual instead.
    pub log_likelihood: f64,
    /// The maximizer sits on an end of the search interval.
    pub boundary: bool,
}

/// Gaussian log-likelihood of the samples at distance `d`, with the
/// elevation implied by `d` and the anchor altitude `h`.
pub fn log_likelihood(d: f64, samples: &RssSampleSet, h: f64, env: &EnvironmentParams) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    if !(d >= h) {
        return Err(Error::domain("d", d, "[h, inf)"));
    }
    check_likelihood_inputs(d, samples, env)?;
    let theta = elevation_at(d, h);
    Ok(gaussian_ll(d, samples.moments(), samples.len() as f64, env, theta))
}

/// Gaussian log-likelihood of the samples at distance `d` for a known elevation.
pub fn log_likelihood_conditioned(d: f64, samples: &RssSampleSet, theta: f64, env: &EnvironmentParams) -> Result<f64> {
    env.link_stats(theta)?;
    check_likelihood_inputs(d, samples, env)?;
    Ok(gaussian_ll(d, samples.moments(), samples.len() as f64, env, theta))
}

fn check_likelihood_inputs(d: f64, samples: &RssSampleSet, env: &EnvironmentParams) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("sample set must not be empty".into()));
    }
    if !(d >= env.d_o) {
        return Err(Error::domain("d", d, "[d_o, inf)"));
    }
    if env.is_noiseless() {
        return Err(Error::InvalidParameter("likelihood is undefined with zero shadowing".into()));
    }
    Ok(())
}

fn elevation_at(d: f64, h: f64) -> f64 {
    (h / d).min(1.0).asin()
}

fn gaussian_ll(d: f64, (mean, ss): (f64, f64), n: f64, env: &EnvironmentParams, theta: f64) -> f64 {
    let stats = env.link_stats_unchecked(theta);
    let mu = env.c_offset - env.k_ref - 10.0 * stats.alpha * (d / env.d_o).log10();
    let var = stats.sigma * stats.sigma;
    let resid = ss + n * (mean - mu) * (mean - mu);
    -n * (stats.sigma.ln() + HALF_LN_2PI) - resid / (2.0 * var)
}

fn squared_residual(d: f64, (mean, ss): (f64, f64), n: f64, env: &EnvironmentParams, theta: f64) -> f64 {
    let alpha = env.link_stats_unchecked(theta).alpha;
    let mu = env.c_offset - env.k_ref - 10.0 * alpha * (d / env.d_o).log10();
    -(ss + n * (mean - mu) * (mean - mu))
}

/// Maximum-likelihood direct distance for one sample set.
///
/// The search covers `[max(h, d_o), d_max]`. Ties on the coarse grid go to
/// the smaller distance. A maximizer on either end of the interval is
/// returned with `boundary = true`; `d_hat = h` means the node is directly
/// beneath the anchor and gives `r_hat = 0`.
pub fn mle_distance(
    samples: &RssSampleSet,
    h: f64,
    env: &EnvironmentParams,
    search: &SearchConfig,
) -> Result<RangeEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("sample set must not be empty".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    if search.grid_points < 2 || !(search.tolerance > 0.0) {
        return Err(Error::InvalidArgument("search needs at least 2 grid points and a positive tolerance".into()));
    }
    if let ElevationModel::Conditioned(theta) = search.elevation {
        env.link_stats(theta)?;
    }
    let lower = h.max(env.d_o);
    let upper = search.d_max;
    if !(upper > lower) {
        return Err(Error::InvalidArgument(format!(
            "d_max = {upper} m must exceed the lower search bound {lower} m"
        )));
    }

    let moments = samples.moments();
    let n = samples.len() as f64;
    let noiseless = env.is_noiseless();
    let objective = |d: f64| {
        let theta = match search.elevation {
            ElevationModel::Coupled => elevation_at(d, h),
            ElevationModel::Conditioned(theta) => theta,
        };
        if noiseless {
            squared_residual(d, moments, n, env, theta)
        } else {
            gaussian_ll(d, moments, n, env, theta)
        }
    };

    let last = search.grid_points - 1;
    let ratio = (upper / lower).ln() / last as f64;
    let grid_at = |i: usize| {
        if i == last {
            upper
        } else {
            lower * (ratio * i as f64).exp()
        }
    };
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=last {
        let v = objective(grid_at(i));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }

    let lo = grid_at(best_i.saturating_sub(1));
    let hi = grid_at((best_i + 1).min(last));
    let (mut d_hat, mut value) = golden_max(&objective, lo, hi, search.tolerance);
    if value < best_v {
        d_hat = grid_at(best_i);
        value = best_v;
    }

    let boundary = d_hat - lower <= search.tolerance || upper - d_hat <= search.tolerance;
    for end in [lower, upper] {
        if (d_hat - end).abs() <= search.tolerance {
            let v = objective(end);
            if v >= value {
                d_hat = end;
                value = v;
            }
        }
    }
    let r_hat = (d_hat * d_hat - h * h).max(0.0).sqrt();
    let crlb = samples
        .geometry_truth
        .and_then(|g| crlb_sigma(&g, env).ok());

    Ok(RangeEstimate {
        d_hat,
        r_hat,
        crlb_sigma: crlb,
        log_likelihood: value,
        boundary,
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Closed-form lower bound on the standard deviation of a single-sample
/// distance estimate:
///
/// ```text
/// σ_CRLB = (d ln10 / 10) · σ(θ) / α(θ)
/// ```
///
/// With `n` i.i.d. samples the bound shrinks by `sqrt(n)`; see
/// [`crlb_sigma_samples`].
pub fn crlb_sigma(geom: &LinkGeometry, env: &EnvironmentParams) -> Result<f64> {
    let d = geom.d();
    if !(d >= env.d_o) {
        return Err(Error::domain("d", d, "[d_o, inf)"));
    }
    let stats = env.link_stats(geom.theta())?;
    if !(stats.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "path loss exponent {} is not positive",
            stats.alpha
        )));
    }
    Ok(d * LN_10 / 10.0 * stats.sigma / stats.alpha)
}

/// Bound for an estimate built from `n` i.i.d. samples.
pub fn crlb_sigma_samples(geom: &LinkGeometry, env: &EnvironmentParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    Ok(crlb_sigma(geom, env)? / (n as f64).sqrt())
}

/// Derivative of the per-sample log density with respect to `d`, holding α
/// and σ at the elevation of `geom`:
///
/// ```text
/// [-w - 10 α log10(d) - K + C] · 10 α / (d ln10 σ²)
/// ```
pub fn score(w: f64, geom: &LinkGeometry, env: &EnvironmentParams) -> Result<f64> {
    let d = geom.d();
    if !(d >= env.d_o) {
        return Err(Error::domain("d", d, "[d_o, inf)"));
    }
    let stats = env.link_stats(geom.theta())?;
    if !(stats.sigma > 0.0) {
        return Err(Error::InvalidParameter("score is undefined with zero shadowing".into()));
    }
    let bracket = -w - 10.0 * stats.alpha * (d / env.d_o).log10() - env.k_ref + env.c_offset;
    Ok(bracket * 10.0 * stats.alpha / (d * LN_10 * stats.sigma * stats.sigma))
}

/// Monte Carlo estimate of the per-sample Fisher information for `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherEstimate {
    /// Mean squared score, 1/m².
    pub information: f64,
    /// Mean score; zero in expectation.
    pub mean_score: f64,
    /// Standard error of `mean_score`.
    pub score_std_error: f64,
    pub draws: usize,
}

impl FisherEstimate {
    /// `1 / sqrt(information)`, directly comparable with [`crlb_sigma`].
    pub fn implied_sigma(&self) -> f64 {
        self.information.sqrt().recip()
    }
}

/// Averages the squared score over `mc` simulated received powers.
pub fn fisher_information_numeric<R: Rng + ?Sized>(
    geom: &LinkGeometry,
    env: &EnvironmentParams,
    mc: usize,
    rng: &mut R,
) -> Result<FisherEstimate> {
    if mc == 0 {
        return Err(Error::InvalidArgument("Monte Carlo draw count must be at least 1".into()));
    }
    let draws = sample_rss(geom, env, mc, rng)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &w in &draws.samples {
        let s = score(w, geom, env)?;
        sum += s;
        sum_sq += s * s;
    }
    let n = mc as f64;
    let mean = sum / n;
    let var = if mc > 1 { (sum_sq - n * mean * mean) / (n - 1.0) } else { 0.0 };
    Ok(FisherEstimate {
        information: sum_sq / n,
        mean_score: mean,
        score_std_error: (var / n).sqrt(),
        draws: mc,
    })
}
