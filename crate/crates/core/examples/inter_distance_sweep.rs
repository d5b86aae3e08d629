//! Error of a node 650 m from the constellation center as the triangle
//! side grows from 100 m to 2 km, anchors at 1 km.
//!
//! ```text
//! cargo run --release --example inter_distance_sweep
//! ```

use aerial_rss::experiments::{run_inter_distance_sweep, ExperimentConfig, SweepVariable};

fn main() -> aerial_rss::Result<()> {
    let mut cfg = ExperimentConfig::urban(SweepVariable::InterDistance);
    cfg.node_count = 400;
    let result = run_inter_distance_sweep(&cfg)?;
    println!("{:>6} {:>10} {:>12}", "l_m", "xi_m", "position_m");
    for (i, l) in result.sweep_values.iter().enumerate() {
        println!("{l:>6} {:>10.1} {:>12.1}", result.mean_error[i], result.mean_position_error[i]);
    }
    Ok(())
}
