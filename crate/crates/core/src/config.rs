//! Experiment configuration files.
//!
//! Files are TOML. Every key is optional; resolution order is file value,
//! then environment preset, then the built-in defaults of the requested
//! study. Unknown keys are rejected. `config/example.toml` in this crate
//! documents every key.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel::{EnvironmentParams, Preset};
use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, NodeLayout, SweepSpec, SweepVariable};
use crate::geometry::NodePosition;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub node_count: Option<usize>,
    pub deployment_radius: Option<f64>,
    pub samples_per_anchor: Option<usize>,
    pub trials: Option<usize>,
    pub preset: Option<Preset>,
    pub coverage_radius: Option<f64>,
    #[serde(default)]
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub constellation: ConstellationSection,
    #[serde(default)]
    pub nodes: NodesSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub crlb: CrlbSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub a_los: Option<f64>,
    pub b_los: Option<f64>,
    pub a_nlos: Option<f64>,
    pub b_nlos: Option<f64>,
    pub a_o: Option<f64>,
    pub b_o: Option<f64>,
    pub a_1: Option<f64>,
    pub b_1: Option<f64>,
    pub k_ref: Option<f64>,
    pub c_offset: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSection {
    pub n_anchors: Option<usize>,
    pub side: Option<f64>,
    pub side_increment: Option<f64>,
    pub altitude: Option<f64>,
    pub centroid: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutName {
    Disk,
    Ring,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesSection {
    pub layout: Option<LayoutName>,
    pub ring_distance: Option<f64>,
    pub ring_azimuths: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Option<SweepVariable>,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub d_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iterations: Option<usize>,
    pub step_tolerance: Option<f64>,
    pub grid_half_width: Option<f64>,
    pub grid_divisions: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrlbSection {
    pub r_values: Option<Vec<f64>>,
    pub repetitions: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Resolves into a full config for `study`. `preset` overrides the
    /// file's own `preset` key.
    pub fn resolve(self, study: Option<SweepVariable>, preset: Option<Preset>) -> Result<ExperimentConfig> {
        let variable = study.or(self.sweep.variable).unwrap_or(SweepVariable::Altitude);
        if let (Some(want), Some(file)) = (study, self.sweep.variable) {
            if want != file {
                return Err(Error::InvalidArgument(format!(
                    "sweep.variable = {:?} conflicts with the requested {} study",
                    file.name(),
                    want.name()
                )));
            }
        }
        let preset = preset.or(self.preset).unwrap_or(Preset::Urban);
        let mut cfg = ExperimentConfig::default_for(variable, preset.params());
        cfg.environment_name = Some(preset.name().to_string());

        set(&mut cfg.seed, self.seed);
        set(&mut cfg.node_count, self.node_count);
        set(&mut cfg.samples_per_anchor, self.samples_per_anchor);
        set(&mut cfg.trials, self.trials);
        if let Some(r) = self.deployment_radius {
            cfg.deployment_radius = r;
            cfg.estimator.d_max = 20.0 * r;
            cfg.solver.grid_half_width = r;
        }
        cfg.coverage_radius = self.coverage_radius.or(cfg.coverage_radius);

        let e = self.environment;
        let env: &mut EnvironmentParams = &mut cfg.environment;
        set(&mut env.a_los, e.a_los);
        set(&mut env.b_los, e.b_los);
        set(&mut env.a_nlos, e.a_nlos);
        set(&mut env.b_nlos, e.b_nlos);
        set(&mut env.a_o, e.a_o);
        set(&mut env.b_o, e.b_o);
        set(&mut env.a_1, e.a_1);
        set(&mut env.b_1, e.b_1);
        set(&mut env.k_ref, e.k_ref);
        set(&mut env.c_offset, e.c_offset);
        if *env != preset.params() {
            cfg.environment_name = Some(format!("{} (modified)", preset.name()));
        }

        let c = self.constellation;
        set(&mut cfg.constellation.n_anchors, c.n_anchors);
        set(&mut cfg.constellation.base_side, c.side);
        set(&mut cfg.constellation.side_increment, c.side_increment);
        set(&mut cfg.constellation.altitude, c.altitude);
        if let Some([x, y]) = c.centroid {
            cfg.constellation.centroid = NodePosition::new(x, y);
        }

        let n = self.nodes;
        let (mut distance, mut azimuths) = match cfg.nodes {
            NodeLayout::Ring { distance, azimuths } => (distance, azimuths),
            NodeLayout::Disk => (650.0, 8),
        };
        set(&mut distance, n.ring_distance);
        set(&mut azimuths, n.ring_azimuths);
        let layout = n.layout.unwrap_or(match cfg.nodes {
            NodeLayout::Disk => LayoutName::Disk,
            NodeLayout::Ring { .. } => LayoutName::Ring,
        });
        cfg.nodes = match layout {
            LayoutName::Disk => NodeLayout::Disk,
            LayoutName::Ring => NodeLayout::Ring { distance, azimuths },
        };

        let s = self.sweep;
        match (s.values, s.start, s.stop, s.step) {
            (Some(values), None, None, None) => cfg.sweep = SweepSpec { variable, values },
            (None, Some(start), Some(stop), Some(step)) => cfg.sweep = SweepSpec::range(variable, start, stop, step)?,
            (None, None, None, None) => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "sweep: give either `values` or all of `start`, `stop`, `step`".into(),
                ))
            }
        }

        set(&mut cfg.estimator.d_max, self.estimator.d_max);
        set(&mut cfg.estimator.grid_points, self.estimator.grid_points);
        set(&mut cfg.estimator.tolerance, self.estimator.tolerance);

        set(&mut cfg.solver.max_iterations, self.solver.max_iterations);
        set(&mut cfg.solver.step_tolerance, self.solver.step_tolerance);
        set(&mut cfg.solver.grid_half_width, self.solver.grid_half_width);
        set(&mut cfg.solver.grid_divisions, self.solver.grid_divisions);

        set(&mut cfg.crlb.r_values, self.crlb.r_values);
        set(&mut cfg.crlb.repetitions, self.crlb.repetitions);

        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses config text; `origin` is only used in error messages.
pub fn parse_config(text: &str, origin: &Path, study: Option<SweepVariable>, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let config_error = |message: String| Error::Config {
        path: origin.to_path_buf(),
        message,
    };
    let file = ConfigFile::parse(text).map_err(|e| config_error(e.to_string().trim_end().to_string()))?;
    file.resolve(study, preset).map_err(|e| match e {
        Error::InvalidArgument(m) | Error::InvalidParameter(m) => config_error(m),
        other => config_error(other.to_string()),
    })
}

/// Loads and resolves a config file. The study defaults to the file's
/// `sweep.variable`, or altitude.
pub fn load_config(path: &Path, preset: Option<Preset>) -> Result<ExperimentConfig> {
    load_config_for(path, None, preset)
}

pub fn load_config_for(path: &Path, study: Option<SweepVariable>, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path, study, preset)
}

/// Built-in defaults for a study, as if an empty file had been loaded.
pub fn defaults(study: SweepVariable, preset: Option<Preset>) -> Result<ExperimentConfig> {
    parse_config("", &PathBuf::from("<defaults>"), Some(study), preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config(text, Path::new("test.toml"), None, None)
    }

    #[test]
    fn empty_file_gives_urban_defaults() {
        let cfg = parse_config("", Path::new("x"), None, Some(Preset::Urban)).unwrap();
        assert_eq!(cfg.environment, EnvironmentParams::urban());
        assert_eq!(cfg.constellation.n_anchors, 3);
        assert_eq!(cfg.constellation.base_side, 500.0);
        assert_eq!(cfg.node_count, 1000);
        assert_eq!(cfg.deployment_radius, 1000.0);
        assert_eq!(cfg.samples_per_anchor, 5);
        assert_eq!(cfg.sweep.variable, SweepVariable::Altitude);
    }

    #[test]
    fn file_values_override_defaults() {
        let cfg = parse("[constellation]\nside = 600.0\n").unwrap();
        let mut want = parse("").unwrap();
        want.constellation.base_side = 600.0;
        assert_eq!(cfg, want);
    }

    #[test]
    fn file_values_override_preset() {
        let cfg = parse_config("[environment]\na_los = 7.0\n", Path::new("x"), None, Some(Preset::Suburban)).unwrap();
        assert_eq!(cfg.environment.a_los, 7.0);
        assert_eq!(cfg.environment.b_los, EnvironmentParams::suburban().b_los);
        let flag_wins = parse_config("preset = \"urban\"\n", Path::new("x"), None, Some(Preset::Suburban)).unwrap();
        assert_eq!(flag_wins.environment, EnvironmentParams::suburban());
    }

    #[test]
    fn altitude_below_minimum_is_rejected() {
        let err = parse("[sweep]\nvalues = [40.0, 100.0]\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config { .. }));
        assert!(msg.contains("h_min") && msg.contains("40"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let msg = parse("seed = 3\n\n[constellation]\nsides = 600.0\n").unwrap_err().to_string();
        assert!(msg.contains("sides") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn sweep_range_form() {
        let cfg = parse("[sweep]\nstart = 100.0\nstop = 300.0\nstep = 100.0\n").unwrap();
        assert_eq!(cfg.sweep.values, vec![100.0, 200.0, 300.0]);
        assert!(parse("[sweep]\nstart = 100.0\n").is_err());
    }

    #[test]
    fn study_conflict_is_rejected() {
        let r = parse_config("[sweep]\nvariable = \"altitude\"\n", Path::new("x"), Some(SweepVariable::AnchorCount), None);
        assert!(r.is_err());
    }

    #[test]
    fn deployment_radius_moves_search_and_grid() {
        let cfg = parse("deployment_radius = 500.0\n").unwrap();
        assert_eq!(cfg.estimator.d_max, 10_000.0);
        assert_eq!(cfg.solver.grid_half_width, 500.0);
    }

    #[test]
    fn checked_in_example_parses() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/example.toml");
        let cfg = load_config(&path, None).unwrap();
        assert_eq!(cfg, defaults(SweepVariable::Altitude, Some(Preset::Urban)).unwrap());
    }
}
