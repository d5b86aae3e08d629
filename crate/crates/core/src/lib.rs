//! RSS-based localization of terrestrial nodes using UAVs as aerial anchors.
//!
//! The crate models the air-to-ground link with an elevation-dependent path
//! loss exponent and shadowing spread, estimates anchor-to-node distances by
//! maximum likelihood from received-power samples, multilaterates node
//! positions, and evaluates the Cramér-Rao lower bound of the range estimate.
//! On top of that sits a seeded Monte Carlo harness that sweeps UAV altitude,
//! inter-UAV spacing and anchor count.
//!
//! Module map:
//!
//! - [`channel`]: LoS probability, shadowing spread, path loss exponent, RSS sampling.
//! - [`estimation`]: likelihood, ML range estimation, closed-form and numeric CRLB.
//! - [`geometry`]: anchor constellations, node sampling, link geometry.
//! - [`localization`]: damped Gauss-Newton multilateration and error metrics.
//! - [`experiments`]: sweep harness, altitude optimizer, CSV output.
//! - [`config`] and [`cli`]: configuration files and the command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod geometry;
pub mod localization;
pub mod rng;

pub use channel::{sample_rss, EnvironmentParams, LinkGeometry, LinkKind, Preset, RssSampleSet};
pub use error::{Error, Result};
pub use estimation::{crlb_sigma, fisher_information_numeric, log_likelihood, mle_distance, ElevationModel, RangeEstimate, SearchConfig};
pub use geometry::{build_constellation, link_geometry, sample_nodes_uniform_disk, Anchor, ConstellationSpec, NodePosition};
pub use localization::{localization_error, multilaterate, position_error, PositionFix, SolverConfig};
