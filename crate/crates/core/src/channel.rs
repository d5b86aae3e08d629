//! Air-to-ground channel model.
//!
//! Path loss in dB between a UAV at altitude `h` and a ground node at
//! horizontal distance `r` is
//!
//! ```text
//! PL = K + 10 α(θ) log10(d / d_o) + ψ(θ),     ψ(θ) ~ N(0, σ²(θ))
//! ```
//!
//! with `d = sqrt(r² + h²)` and elevation `θ = atan(h / r)`. The LoS
//! probability is a sigmoid in θ, the path loss exponent interpolates between
//! the ground exponent `b_1` and the free-space exponent `b_1 + a_1`, and the
//! shadowing variance mixes the LoS and NLoS spreads with *squared*
//! probability weights:
//!
//! ```text
//! P_LoS(θ) = 1 / (1 + a_o exp(-b_o θ))
//! σ_j(θ)   = a_j exp(-b_j θ),   j ∈ {LoS, NLoS}
//! σ²(θ)    = P_LoS² σ_LoS² + (1 - P_LoS)² σ_NLoS²
//! α(θ)     = a_1 P_LoS(θ) + b_1
//! ```
//!
//! The received power seen by the ground node is `C - K - 10 α log10(d) - ψ`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Carrier frequency used for the default reference loss.
pub const DEFAULT_FREQUENCY_HZ: f64 = 2.0e9;

/// Free-space path loss at 1 m, in dB: `20 log10(4π f / c)`.
pub fn free_space_reference_loss(frequency_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT).log10()
}

/// Named environment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Urban,
    Suburban,
}

impl Preset {
    pub fn params(self) -> EnvironmentParams {
        match self {
            Preset::Urban => EnvironmentParams::urban(),
            Preset::Suburban => EnvironmentParams::suburban(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Urban => "urban",
            Preset::Suburban => "suburban",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "urban" => Ok(Preset::Urban),
            "suburban" => Ok(Preset::Suburban),
            other => Err(Error::InvalidArgument(format!(
                "unknown environment preset {other:?} (expected \"urban\" or \"suburban\")"
            ))),
        }
    }
}

/// Link state selector for the shadowing spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Los,
    Nlos,
}

/// Channel constants of one propagation environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentParams {
    /// LoS shadowing amplitude, dB.
    pub a_los: f64,
    /// LoS shadowing decay, 1/rad.
    pub b_los: f64,
    /// NLoS shadowing amplitude, dB.
    pub a_nlos: f64,
    /// NLoS shadowing decay, 1/rad.
    pub b_nlos: f64,
    /// LoS probability sigmoid scale.
    pub a_o: f64,
    /// LoS probability sigmoid rate, 1/rad.
    pub b_o: f64,
    /// Path loss exponent span, `α(π/2) - α(0)`. Negative.
    pub a_1: f64,
    /// Path loss exponent at zero elevation.
    pub b_1: f64,
    /// Reference loss K at `d_o`, dB.
    pub k_ref: f64,
    /// Transmit-side offset C of the received power, dBm.
    pub c_offset: f64,
    /// Reference distance, m.
    pub d_o: f64,
}

impl EnvironmentParams {
    pub fn urban() -> Self {
        Self {
            a_los: 10.0,
            b_los: 2.5,
            a_nlos: 30.0,
            b_nlos: 1.7,
            a_o: 45.0,
            b_o: 10.0,
            a_1: -1.5,
            b_1: 3.5,
            k_ref: free_space_reference_loss(DEFAULT_FREQUENCY_HZ),
            c_offset: 0.0,
            d_o: 1.0,
        }
    }

    pub fn suburban() -> Self {
        Self {
            a_los: 5.0,
            b_los: 3.5,
            a_nlos: 10.0,
            b_nlos: 2.5,
            a_o: 47.0,
            b_o: 20.0,
            a_1: -1.0,
            b_1: 3.0,
            ..Self::urban()
        }
    }

    /// Checks the parameter invariants: positive shadowing and sigmoid
    /// constants, a decreasing exponent that never drops below free space,
    /// and a unit reference distance.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a_los", self.a_los),
            ("b_los", self.b_los),
            ("a_nlos", self.a_nlos),
            ("b_nlos", self.b_nlos),
            ("a_o", self.a_o),
            ("b_o", self.b_o),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if !(self.a_1 < 0.0) {
            return Err(Error::InvalidParameter(format!("a_1 must be negative, got {}", self.a_1)));
        }
        if !(self.b_1 + self.a_1 >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "free-space exponent b_1 + a_1 = {} is below 2",
                self.b_1 + self.a_1
            )));
        }
        if !self.k_ref.is_finite() || !self.c_offset.is_finite() {
            return Err(Error::InvalidParameter("k_ref and c_offset must be finite".into()));
        }
        if self.d_o != 1.0 {
            return Err(Error::InvalidParameter(format!("d_o must be 1 m, got {}", self.d_o)));
        }
        Ok(())
    }

    /// Copy with both shadowing amplitudes multiplied by `scale`.
    ///
    /// `scale = 0` gives the noiseless channel, which deliberately sits
    /// outside [`validate`](Self::validate).
    pub fn with_shadowing_scale(mut self, scale: f64) -> Self {
        self.a_los *= scale;
        self.a_nlos *= scale;
        self
    }

    /// True when the shadowing spread is zero at every elevation.
    pub fn is_noiseless(&self) -> bool {
        self.a_los == 0.0 && self.a_nlos == 0.0
    }

    pub fn prob_los(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        Ok(self.prob_los_unchecked(theta))
    }

    pub fn shadowing_sigma_component(&self, theta: f64, kind: LinkKind) -> Result<f64> {
        check_theta(theta)?;
        Ok(self.component_unchecked(theta, kind))
    }

    pub fn shadowing_sigma(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        Ok(self.link_stats_unchecked(theta).sigma)
    }

    pub fn path_loss_exponent(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        Ok(self.link_stats_unchecked(theta).alpha)
    }

    /// LoS probability, exponent and shadowing spread at one elevation.
    pub fn link_stats(&self, theta: f64) -> Result<LinkStats> {
        check_theta(theta)?;
        Ok(self.link_stats_unchecked(theta))
    }

    /// Mean path loss (shadowing omitted).
    pub fn expected_path_loss(&self, geom: &LinkGeometry) -> Result<f64> {
        let d = geom.d();
        if d < self.d_o {
            return Err(Error::domain("d", d, "[d_o, inf)"));
        }
        let alpha = self.path_loss_exponent(geom.theta())?;
        Ok(self.k_ref + 10.0 * alpha * (d / self.d_o).log10())
    }

    /// Mean received power, `C - K - 10 α(θ) log10(d / d_o)`.
    pub fn mean_rss(&self, geom: &LinkGeometry) -> Result<f64> {
        Ok(self.c_offset - self.expected_path_loss(geom)?)
    }

    pub(crate) fn prob_los_unchecked(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.a_o * (-self.b_o * theta).exp())
    }

    fn component_unchecked(&self, theta: f64, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Los => self.a_los * (-self.b_los * theta).exp(),
            LinkKind::Nlos => self.a_nlos * (-self.b_nlos * theta).exp(),
        }
    }

    pub(crate) fn link_stats_unchecked(&self, theta: f64) -> LinkStats {
        let p = self.prob_los_unchecked(theta);
        let los = p * self.component_unchecked(theta, LinkKind::Los);
        let nlos = (1.0 - p) * self.component_unchecked(theta, LinkKind::Nlos);
        LinkStats {
            p_los: p,
            alpha: self.a_1 * p + self.b_1,
            sigma: los.hypot(nlos),
        }
    }
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        Self::urban()
    }
}

/// Channel statistics at a fixed elevation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStats {
    pub p_los: f64,
    /// Path loss exponent.
    pub alpha: f64,
    /// Shadowing standard deviation, dB.
    pub sigma: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&theta) {
        Ok(())
    } else {
        Err(Error::domain("theta", theta, "[0, pi/2]"))
    }
}

/// Horizontal distance and altitude of one anchor-node link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    /// Distance between the anchor's ground projection and the node, m.
    pub r: f64,
    /// Anchor altitude, m.
    pub h: f64,
}

impl LinkGeometry {
    pub fn new(r: f64, h: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain("r", r, "[0, inf)"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain("h", h, "(0, inf)"));
        }
        Ok(Self { r, h })
    }

    /// Direct (slant) distance.
    pub fn d(&self) -> f64 {
        self.r.hypot(self.h)
    }

    /// Elevation angle in radians, in `(0, π/2]`.
    pub fn theta(&self) -> f64 {
        self.h.atan2(self.r)
    }
}

/// Received-power samples collected by one anchor from one node.
#[derive(Debug, Clone, PartialEq)]
pub struct RssSampleSet {
    /// Time-averaged received powers, dBm.
    pub samples: Vec<f64>,
    /// Altitude of the collecting anchor; the only geometry an estimator may use.
    pub anchor_altitude: f64,
    /// Ground truth, kept for benchmarking. Absent for field measurements.
    pub geometry_truth: Option<LinkGeometry>,
}

impl RssSampleSet {
    pub fn from_measurements(samples: Vec<f64>, anchor_altitude: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("sample set must not be empty".into()));
        }
        if !(anchor_altitude > 0.0) {
            return Err(Error::domain("h", anchor_altitude, "(0, inf)"));
        }
        Ok(Self {
            samples,
            anchor_altitude,
            geometry_truth: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample mean and sum of squared deviations from it.
    pub(crate) fn moments(&self) -> (f64, f64) {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        let ss = self.samples.iter().map(|s| (s - mean) * (s - mean)).sum();
        (mean, ss)
    }
}

/// Draws `n` independent received-power samples for `geom`.
///
/// Each sample is `mean_rss - ψ_i` with `ψ_i ~ N(0, σ²(θ))`; the output is a
/// pure function of the generator state.
pub fn sample_rss<R: Rng + ?Sized>(
    geom: &LinkGeometry,
    env: &EnvironmentParams,
    n: usize,
    rng: &mut R,
) -> Result<RssSampleSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mean = env.mean_rss(geom)?;
    let sigma = env.link_stats_unchecked(geom.theta()).sigma;
    let samples = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            mean - sigma * z
        })
        .collect();
    Ok(RssSampleSet {
        samples,
        anchor_altitude: geom.h,
        geometry_truth: Some(*geom),
    })
}
