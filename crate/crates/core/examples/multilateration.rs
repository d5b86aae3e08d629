//! One node, end to end: draw RSS samples from each of six aerial
//! anchors, estimate the ranges, then solve for the position.
//!
//! ```text
//! cargo run --example multilateration
//! ```

use aerial_rss::geometry::{build_constellation, link_geometry, ConstellationSpec, NodePosition};
use aerial_rss::rng::{substream, Purpose};
use aerial_rss::{
    localization_error, mle_distance, multilaterate, position_error, sample_rss, EnvironmentParams, SearchConfig,
    SolverConfig,
};

fn main() -> aerial_rss::Result<()> {
    let env = EnvironmentParams::urban();
    let spec = ConstellationSpec {
        n_anchors: 6,
        altitude: 700.0,
        ..Default::default()
    };
    let anchors = build_constellation(&spec)?;
    let node = NodePosition::new(240.0, -410.0);
    let search = SearchConfig::for_deployment_radius(1000.0);

    let mut r_hat = Vec::new();
    let mut r_true = Vec::new();
    for (i, anchor) in anchors.iter().enumerate() {
        let geom = link_geometry(anchor, &node);
        let mut rng = substream(7, Purpose::Shadowing, &[0, 0, i as u64]);
        let samples = sample_rss(&geom, &env, 5, &mut rng)?;
        let est = mle_distance(&samples, anchor.h, &env, &search)?;
        println!(
            "anchor {i} at ({:>7.1}, {:>7.1}): r = {:>6.1} m, r_hat = {:>6.1} m",
            anchor.x, anchor.y, geom.r, est.r_hat
        );
        r_hat.push(est.r_hat);
        r_true.push(geom.r);
    }

    let fix = multilaterate(&anchors, &r_hat, &SolverConfig::default())?;
    println!(
        "fix ({:.1}, {:.1}) after {} iterations{}",
        fix.x_hat,
        fix.y_hat,
        fix.iterations,
        if fix.used_grid_fallback { " (grid fallback)" } else { "" }
    );
    println!("range error xi = {:.1} m", localization_error(&r_hat, &r_true)?);
    println!("position error = {:.1} m", position_error(&fix, &node));
    Ok(())
}
