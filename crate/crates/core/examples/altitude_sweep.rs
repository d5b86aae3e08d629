//! Mean localization error against anchor altitude with three aerial
//! anchors over a 1 km disk. Writes `altitude_sweep.csv` to the temp dir.
//!
//! ```text
//! cargo run --release --example altitude_sweep [urban|suburban]
//! ```

use aerial_rss::experiments::{run_altitude_sweep, write_results, ExperimentConfig, SweepVariable};
use aerial_rss::Preset;

fn main() -> aerial_rss::Result<()> {
    let preset: Preset = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("urban")
        .parse()?;
    let mut cfg = ExperimentConfig::default_for(SweepVariable::Altitude, preset.params());
    cfg.node_count = 300;

    let result = run_altitude_sweep(&cfg)?;
    println!("{:>6} {:>10} {:>12}", "h_m", "xi_m", "position_m");
    for i in (0..result.sweep_values.len()).step_by(4) {
        println!(
            "{:>6} {:>10.1} {:>12.1}",
            result.sweep_values[i], result.mean_error[i], result.mean_position_error[i]
        );
    }
    let best = result.argmin();
    println!("lowest mean error {:.1} m at h = {} m", result.mean_error[best], result.sweep_values[best]);

    let out = std::env::temp_dir().join("altitude_sweep.csv");
    write_results(&result, &cfg, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
