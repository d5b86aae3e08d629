//! Finds the altitude (and the matching elevation angle seen from an
//! average node) with the lowest mean error, for both presets.
//!
//! ```text
//! cargo run --release --example optimize_altitude
//! ```

use aerial_rss::experiments::{optimize_altitude, ExperimentConfig, SweepVariable};
use aerial_rss::Preset;

fn main() -> aerial_rss::Result<()> {
    for preset in [Preset::Urban, Preset::Suburban] {
        let mut cfg = ExperimentConfig::default_for(SweepVariable::Altitude, preset.params());
        cfg.node_count = 300;
        let opt = optimize_altitude(&cfg)?;
        println!(
            "{:<9} h_opt = {:>5} m  error = {:>6.1} m  theta_opt = {:>4.1} deg  (error at 100 m: {:.1} m)",
            preset.name(),
            opt.h_opt,
            opt.error_at_opt,
            opt.theta_opt.to_degrees(),
            opt.sweep.mean_error[0]
        );
    }
    Ok(())
}
