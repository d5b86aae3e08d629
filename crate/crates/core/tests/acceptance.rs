//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any of them fails.
//!
//! Run with `cargo test -p aerial-rss --test acceptance`.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

use aerial_rss::channel::RssSampleSet;
use aerial_rss::estimation::{crlb_sigma, fisher_information_numeric, mle_distance, ElevationModel, SearchConfig};
use aerial_rss::experiments::{
    optimize_altitude, run_altitude_sweep, run_anchor_count_sweep, run_inter_distance_sweep, ExperimentConfig,
    SweepSpec, SweepVariable,
};
use aerial_rss::geometry::{build_constellation, link_geometry, ConstellationSpec, NodePosition};
use aerial_rss::localization::{localization_error, multilaterate, SolverConfig};
use aerial_rss::rng::{substream, Purpose};
use aerial_rss::{sample_rss, EnvironmentParams, LinkGeometry};
use rand::Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn crlb_tightness(report: &mut Report) {
    let env = EnvironmentParams::urban();
    let r = 500.0;
    let n = 5;
    let reps = 10_000u64;
    let mut ok = true;
    let mut parts = Vec::new();
    for (hi, h) in [200.0, 500.0, 1000.0, 2000.0].into_iter().enumerate() {
        let geom = LinkGeometry::new(r, h).unwrap();
        let search = SearchConfig::for_deployment_radius(1000.0).with_elevation(ElevationModel::Conditioned(geom.theta()));
        let interior: Vec<f64> = (0..reps)
            .filter_map(|rep| {
                let mut rng = substream(1, Purpose::RangeStudy, &[0, hi as u64, rep]);
                let s = sample_rss(&geom, &env, n, &mut rng).unwrap();
                let est = mle_distance(&s, h, &env, &search).unwrap();
                (!est.boundary).then_some(est.d_hat)
            })
            .collect();
        let bound = crlb_sigma(&geom, &env).unwrap() / (n as f64).sqrt();
        let sigma = std_dev(&interior);
        let rel = sigma / bound - 1.0;
        ok &= rel.abs() <= 0.15;
        parts.push(format!("h={h}: {sigma:.1}/{bound:.1} ({:+.1}%, {} interior)", 100.0 * rel, interior.len()));
    }
    report.check("1 (MLE spread vs bound, within 15%)", ok, parts.join("; "));
}

fn fisher_oracle(report: &mut Report) {
    let mut pick = substream(2024, Purpose::FisherOracle, &[0]);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for i in 0..5u64 {
        let env = if i % 2 == 0 { EnvironmentParams::urban() } else { EnvironmentParams::suburban() };
        let r = pick.random_range(10.0..2000.0);
        let h = pick.random_range(50.0..3000.0);
        let geom = LinkGeometry::new(r, h).unwrap();
        let mut rng = substream(2024, Purpose::FisherOracle, &[1, i]);
        let est = fisher_information_numeric(&geom, &env, 1_000_000, &mut rng).unwrap();
        let closed = crlb_sigma(&geom, &env).unwrap();
        let rel = (est.implied_sigma() - closed).abs() / closed;
        worst = worst.max(rel);
        parts.push(format!("({r:.0},{h:.0}) {:.3}%", 100.0 * rel));
    }
    report.check("2 (Fisher oracle, <= 1%)", worst <= 0.01, format!("worst {:.3}%: {}", 100.0 * worst, parts.join(", ")));
}

fn altitude_config(env: EnvironmentParams) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default_for(SweepVariable::Altitude, env);
    cfg.trials = 5;
    cfg.sweep = SweepSpec::range(SweepVariable::Altitude, 50.0, 3000.0, 50.0).unwrap();
    cfg
}

fn optimal_altitude(report: &mut Report) {
    let opt = optimize_altitude(&altitude_config(EnvironmentParams::urban())).unwrap();
    let baseline = opt.sweep.mean_error[0];
    let best_pos = opt.sweep.argmin_position();
    println!(
        "  urban sweep: xi(50 m) = {baseline:.1} m, h_opt = {} m, xi_min = {:.1} m; position error argmin {} m ({:.1} m)",
        opt.h_opt, opt.error_at_opt, opt.sweep.sweep_values[best_pos], opt.sweep.mean_position_error[best_pos]
    );
    report.check(
        "3a (urban argmin altitude in [600, 900] m)",
        (600.0..=900.0).contains(&opt.h_opt),
        format!("h_opt = {} m", opt.h_opt),
    );
    report.check(
        "3b (urban minimum mean xi in [56, 104] m)",
        (56.0..=104.0).contains(&opt.error_at_opt),
        format!("{:.1} m", opt.error_at_opt),
    );
    report.check("3c (urban xi at 50 m > 250 m)", baseline > 250.0, format!("{baseline:.1} m"));
    let deg = opt.theta_opt.to_degrees();
    report.check(
        "4 (optimal elevation in [43, 57] deg)",
        (43.0..=57.0).contains(&deg),
        format!("theta_opt = {deg:.1} deg at mean node distance {:.1} m", opt.mean_node_distance),
    );
}

fn suburban_gain(report: &mut Report) {
    let opt = optimize_altitude(&altitude_config(EnvironmentParams::suburban())).unwrap();
    let gain = opt.sweep.mean_error[0] - opt.error_at_opt;
    report.check(
        "5 (suburban xi(50 m) - xi(h_opt) > 100 m)",
        gain > 100.0,
        format!("{:.1} - {:.1} = {gain:.1} m at h_opt = {} m", opt.sweep.mean_error[0], opt.error_at_opt, opt.h_opt),
    );
}

fn inter_distance(report: &mut Report) {
    let cfg = ExperimentConfig::urban(SweepVariable::InterDistance);
    let res = run_inter_distance_sweep(&cfg).unwrap();
    let curve: Vec<String> =
        res.sweep_values.iter().zip(&res.mean_error).map(|(l, e)| format!("{l:.0}:{e:.0}")).collect();
    let pos: Vec<String> =
        res.sweep_values.iter().zip(&res.mean_position_error).map(|(l, e)| format!("{l:.0}:{e:.0}")).collect();
    println!("  xi(l): {}", curve.join(" "));
    println!("  position error(l): {}", pos.join(" "));
    let first = res.mean_error[0];
    let i = res.argmin();
    let (l_min, e_min) = (res.sweep_values[i], res.mean_error[i]);
    let last = *res.mean_error.last().unwrap();
    report.check(
        "6a (xi at l = 100 m in [140, 260] m)",
        res.sweep_values[0] == 100.0 && (140.0..=260.0).contains(&first),
        format!("{first:.1} m"),
    );
    report.check(
        "6b (minimum near l = 600 m, xi in [42, 78] m)",
        (420.0..=780.0).contains(&l_min) && (42.0..=78.0).contains(&e_min),
        format!("min {e_min:.1} m at l = {l_min} m"),
    );
    report.check(
        "6c (curve rises again at large l)",
        i > 0 && i + 1 < res.mean_error.len() && last > 1.05 * e_min,
        format!("xi(l_max) = {last:.1} m vs min {e_min:.1} m"),
    );
}

fn anchor_count(report: &mut Report) {
    let mut aerial = ExperimentConfig::urban(SweepVariable::AnchorCount);
    aerial.constellation.altitude = 1000.0;
    aerial.sweep.values = vec![3.0];
    let reference = run_anchor_count_sweep(&aerial).unwrap();
    let target = reference.mean_error[0];

    let mut ground = ExperimentConfig::urban(SweepVariable::AnchorCount);
    ground.constellation.altitude = 50.0;
    let res = run_anchor_count_sweep(&ground).unwrap();
    let curve: Vec<String> =
        res.sweep_values.iter().zip(&res.mean_error).map(|(n, e)| format!("{n:.0}:{e:.0}")).collect();
    let pos: Vec<String> =
        res.sweep_values.iter().zip(&res.mean_position_error).map(|(n, e)| format!("{n:.0}:{e:.0}")).collect();
    println!("  target xi(N=3, 1000 m) = {target:.1} m; xi(N, 50 m): {}", curve.join(" "));
    println!(
        "  target position error = {:.1} m; position error(N, 50 m): {}",
        reference.mean_position_error[0],
        pos.join(" ")
    );
    let n = res.sweep_values.iter().zip(&res.mean_error).find(|(_, e)| **e <= target).map(|(n, _)| *n);
    report.check(
        "7 (ground anchors matching 3 aerial anchors: N in [12, 18])",
        n.is_some_and(|n| (12.0..=18.0).contains(&n)),
        match n {
            Some(n) => format!("N = {n}"),
            None => "no N in the sweep reaches the target".into(),
        },
    );
}

fn property_suite(report: &mut Report) {
    let mut problems = Vec::new();

    let quiet = EnvironmentParams::urban().with_shadowing_scale(0.0);
    let anchors = build_constellation(&ConstellationSpec { n_anchors: 6, ..Default::default() }).unwrap();
    let search = SearchConfig::for_deployment_radius(1000.0);
    for (k, node) in [NodePosition::new(0.0, 0.0), NodePosition::new(400.0, -700.0), NodePosition::new(-950.0, 10.0)]
        .iter()
        .enumerate()
    {
        let mut r_hat = Vec::new();
        let mut r_true = Vec::new();
        for (j, a) in anchors.iter().enumerate() {
            let g = link_geometry(a, node);
            let s = sample_rss(&g, &quiet, 5, &mut substream(k as u64, Purpose::Shadowing, &[j as u64])).unwrap();
            let est = mle_distance(&s, a.h, &quiet, &search).unwrap();
            r_hat.push(est.r_hat);
            r_true.push(g.r);
        }
        let xi = localization_error(&r_hat, &r_true).unwrap();
        let fix = multilaterate(&anchors, &r_hat, &SolverConfig::default()).unwrap();
        if xi > 0.1 || fix.position().distance_to(node) > 0.1 {
            problems.push(format!("noiseless node {k}: xi {xi:.3}"));
        }
    }

    for env in [EnvironmentParams::urban(), EnvironmentParams::suburban()] {
        let thetas: Vec<f64> = (0..=200).map(|i| FRAC_PI_2 * i as f64 / 200.0).collect();
        let stats: Vec<_> = thetas.iter().map(|&t| env.link_stats(t).unwrap()).collect();
        for w in stats.windows(2) {
            if w[1].p_los < w[0].p_los || w[1].alpha > w[0].alpha || w[1].sigma > w[0].sigma * (1.0 + 1e-12) {
                problems.push("monotonicity".into());
                break;
            }
        }
        if stats.iter().any(|s| !(0.0..=1.0).contains(&s.p_los) || !(2.0..=3.5).contains(&s.alpha)) {
            problems.push("bounds".into());
        }
    }

    let env = EnvironmentParams::urban();
    for theta in [0.1, 0.6, 1.2] {
        let base = crlb_sigma(&LinkGeometry::new(100.0 * f64::cos(theta), 100.0 * f64::sin(theta)).unwrap(), &env).unwrap();
        for k in [2.0, 7.5, 30.0] {
            let g = LinkGeometry::new(k * 100.0 * f64::cos(theta), k * 100.0 * f64::sin(theta)).unwrap();
            if (crlb_sigma(&g, &env).unwrap() / base - k).abs() > 1e-9 * k {
                problems.push(format!("crlb linearity at theta {theta}"));
            }
        }
    }

    let mut cfg = ExperimentConfig::urban(SweepVariable::Altitude);
    cfg.node_count = 200;
    cfg.sweep.values = vec![200.0, 800.0];
    let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
    let a = pool(1).install(|| run_altitude_sweep(&cfg)).unwrap().without_timing();
    let b = pool(4).install(|| run_altitude_sweep(&cfg)).unwrap().without_timing();
    if a != b {
        problems.push("thread-count determinism".into());
    }

    let geom = LinkGeometry::new(420.0, 700.0).unwrap();
    for rep in 0..50u64 {
        let s = sample_rss(&geom, &env, 5, &mut substream(3, Purpose::RangeStudy, &[rep])).unwrap();
        let delta = 17.5;
        let moved = RssSampleSet::from_measurements(s.samples.iter().map(|x| x + delta).collect(), 700.0).unwrap();
        let moved_env = EnvironmentParams { c_offset: env.c_offset + delta, ..env };
        let d0 = mle_distance(&s, 700.0, &env, &search).unwrap().d_hat;
        let d1 = mle_distance(&moved, 700.0, &moved_env, &search).unwrap().d_hat;
        if (d0 - d1).abs() > 0.02 {
            problems.push(format!("C-shift rep {rep}: {d0} vs {d1}"));
            break;
        }
    }

    report.check(
        "8 (property suite)",
        problems.is_empty(),
        if problems.is_empty() {
            "noiseless exactness, monotonicity/bounds, CRLB linearity, thread determinism, C-shift invariance".into()
        } else {
            problems.join("; ")
        },
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    crlb_tightness(&mut report);
    fisher_oracle(&mut report);
    optimal_altitude(&mut report);
    suburban_gain(&mut report);
    inter_distance(&mut report);
    anchor_count(&mut report);
    property_suite(&mut report);
    if report.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} check(s) failed", report.failures);
        ExitCode::FAILURE
    }
}
