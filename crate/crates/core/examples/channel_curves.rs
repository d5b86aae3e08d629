//! Tabulates the air-to-ground channel against elevation angle for both
//! presets: LoS probability, shadowing spread and path-loss exponent.
//!
//! ```text
//! cargo run --example channel_curves
//! ```

use aerial_rss::{EnvironmentParams, LinkGeometry, Preset};

fn main() -> aerial_rss::Result<()> {
    for preset in [Preset::Urban, Preset::Suburban] {
        let env = preset.params();
        println!("{}", preset.name());
        println!("{:>8} {:>8} {:>9} {:>6}", "deg", "P_LoS", "sigma_dB", "alpha");
        for deg in (0..=90).step_by(10) {
            let s = env.link_stats((deg as f64).to_radians())?;
            println!("{deg:>8} {:>8.4} {:>9.3} {:>6.3}", s.p_los, s.sigma, s.alpha);
        }
        println!();
    }

    let env = EnvironmentParams::urban();
    let geom = LinkGeometry::new(500.0, 500.0)?;
    println!(
        "urban link r = 500 m, h = 500 m: d = {:.1} m, mean path loss {:.2} dB, mean RSS {:.2} dBm",
        geom.d(),
        env.expected_path_loss(&geom)?,
        env.mean_rss(&geom)?
    );
    Ok(())
}
