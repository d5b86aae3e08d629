//! Terrestrial (50 m) versus aerial (1 km) anchors as the anchor count
//! grows in steps of three.
//!
//! ```text
//! cargo run --release --example anchor_count_sweep
//! ```

use aerial_rss::experiments::{run_anchor_count_sweep, ExperimentConfig, SweepVariable};

fn main() -> aerial_rss::Result<()> {
    let mut runs = Vec::new();
    for h in [50.0, 1000.0] {
        let mut cfg = ExperimentConfig::urban(SweepVariable::AnchorCount);
        cfg.node_count = 200;
        cfg.constellation.altitude = h;
        runs.push(run_anchor_count_sweep(&cfg)?);
    }
    println!("{:>4} {:>12} {:>12} {:>12} {:>12}", "N", "xi@50m", "pos@50m", "xi@1km", "pos@1km");
    for i in 0..runs[0].sweep_values.len() {
        println!(
            "{:>4} {:>12.1} {:>12.1} {:>12.1} {:>12.1}",
            runs[0].sweep_values[i],
            runs[0].mean_error[i],
            runs[0].mean_position_error[i],
            runs[1].mean_error[i],
            runs[1].mean_position_error[i]
        );
    }
    Ok(())
}
