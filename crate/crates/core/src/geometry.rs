//! Anchor constellations and node placement.
//!
//! UAVs fly in equilateral triangles centred on a common point. Triangle `k`
//! (0-based) has side `base_side + k * side_increment`; every triangle has a
//! vertex due north (90°) and the others at 210° and 330°.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkGeometry;
use crate::error::{Error, Result};

/// Vertex bearings of every triangle, degrees counter-clockwise from east.
pub const VERTEX_ANGLES_DEG: [f64; 3] = [90.0, 210.0, 330.0];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
}

impl NodePosition {
    pub const ORIGIN: NodePosition = NodePosition { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &NodePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point at `distance` from `self` along `bearing` (radians from east).
    pub fn offset_polar(&self, distance: f64, bearing: f64) -> Self {
        Self {
            x: self.x + distance * bearing.cos(),
            y: self.y + distance * bearing.sin(),
        }
    }
}

/// An aerial anchor: ground projection, altitude and optional coverage radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    /// `None` means the anchor hears every node.
    pub coverage_radius: Option<f64>,
}

impl Anchor {
    pub fn new(x: f64, y: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain("h", h, "(0, inf)"));
        }
        Ok(Self {
            x,
            y,
            h,
            coverage_radius: None,
        })
    }

    pub fn with_coverage_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain("coverage_radius", radius, "(0, inf)"));
        }
        self.coverage_radius = Some(radius);
        Ok(self)
    }

    pub fn projection(&self) -> NodePosition {
        NodePosition::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    /// Total anchors, a positive multiple of three.
    pub n_anchors: usize,
    /// Side of the innermost triangle, m.
    pub base_side: f64,
    /// Side growth from one triangle to the next, m.
    pub side_increment: f64,
    /// Common altitude, m.
    pub altitude: f64,
    pub centroid: NodePosition,
}

impl Default for ConstellationSpec {
    fn default() -> Self {
        Self {
            n_anchors: 3,
            base_side: 500.0,
            side_increment: 20.0,
            altitude: 1000.0,
            centroid: NodePosition::ORIGIN,
        }
    }
}

impl ConstellationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_anchors < 3 || self.n_anchors % 3 != 0 {
            return Err(Error::InvalidArgument(format!(
                "n_anchors must be a positive multiple of 3, got {}",
                self.n_anchors
            )));
        }
        if !(self.base_side > 0.0 && self.base_side.is_finite()) {
            return Err(Error::InvalidArgument(format!("base_side must be positive, got {}", self.base_side)));
        }
        if !(self.side_increment >= 0.0 && self.side_increment.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "side_increment must be non-negative, got {}",
                self.side_increment
            )));
        }
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(Error::InvalidArgument(format!("altitude must be positive, got {}", self.altitude)));
        }
        Ok(())
    }

    /// Side length of triangle `k`.
    pub fn side(&self, k: usize) -> f64 {
        self.base_side + k as f64 * self.side_increment
    }
}

/// Lays out `n_anchors / 3` concentric, co-oriented equilateral triangles.
pub fn build_constellation(spec: &ConstellationSpec) -> Result<Vec<Anchor>> {
    spec.validate()?;
    let mut anchors = Vec::with_capacity(spec.n_anchors);
    for k in 0..spec.n_anchors / 3 {
        let circumradius = spec.side(k) / 3f64.sqrt();
        for deg in VERTEX_ANGLES_DEG {
            let p = spec.centroid.offset_polar(circumradius, deg.to_radians());
            anchors.push(Anchor::new(p.x, p.y, spec.altitude)?);
        }
    }
    Ok(anchors)
}

/// Draws `n` points uniformly over a disk.
pub fn sample_nodes_uniform_disk<R: Rng + ?Sized>(
    n: usize,
    radius: f64,
    center: NodePosition,
    rng: &mut R,
) -> Result<Vec<NodePosition>> {
    if n == 0 {
        return Err(Error::InvalidArgument("node count must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain("radius", radius, "(0, inf)"));
    }
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let phi: f64 = rng.random::<f64>() * TAU;
            center.offset_polar(radius * u.sqrt(), phi)
        })
        .collect())
}

/// `count` nodes at `distance` from `center`, cycling through `azimuths`
/// equally spaced bearings starting due east.
pub fn ring_nodes(count: usize, distance: f64, azimuths: usize, center: NodePosition) -> Result<Vec<NodePosition>> {
    if count == 0 || azimuths == 0 {
        return Err(Error::InvalidArgument("ring needs at least one node and one azimuth".into()));
    }
    if !(distance >= 0.0 && distance.is_finite()) {
        return Err(Error::domain("distance", distance, "[0, inf)"));
    }
    let step = 2.0 * PI / azimuths as f64;
    Ok((0..count)
        .map(|i| center.offset_polar(distance, (i % azimuths) as f64 * step))
        .collect())
}

pub fn link_geometry(anchor: &Anchor, node: &NodePosition) -> LinkGeometry {
    LinkGeometry {
        r: anchor.projection().distance_to(node),
        h: anchor.h,
    }
}

/// Inclusive coverage test on the horizontal distance.
pub fn in_coverage(anchor: &Anchor, node: &NodePosition) -> bool {
    match anchor.coverage_radius {
        None => true,
        Some(radius) => anchor.projection().distance_to(node) <= radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn pairwise(a: &[Anchor]) -> Vec<f64> {
        let mut d = vec![
            a[0].projection().distance_to(&a[1].projection()),
            a[1].projection().distance_to(&a[2].projection()),
            a[0].projection().distance_to(&a[2].projection()),
        ];
        d.sort_by(f64::total_cmp);
        d
    }

    #[test]
    fn single_triangle() {
        let anchors = build_constellation(&ConstellationSpec::default()).unwrap();
        assert_eq!(anchors.len(), 3);
        for d in pairwise(&anchors) {
            assert_relative_eq!(d, 500.0, max_relative = 1e-12);
        }
        let cx = anchors.iter().map(|a| a.x).sum::<f64>() / 3.0;
        let cy = anchors.iter().map(|a| a.y).sum::<f64>() / 3.0;
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);
        assert!(anchors[0].x.abs() < 1e-12 && anchors[0].y > 0.0);
        assert!(anchors.iter().all(|a| a.h == 1000.0));
    }

    #[test]
    fn nested_triangles_grow_by_the_increment() {
        let spec = ConstellationSpec {
            n_anchors: 6,
            base_side: 100.0,
            side_increment: 20.0,
            altitude: 300.0,
            centroid: NodePosition::new(10.0, -5.0),
        };
        let anchors = build_constellation(&spec).unwrap();
        let inner = pairwise(&anchors[..3]);
        let outer = pairwise(&anchors[3..]);
        assert!(inner.iter().all(|d| (d - 100.0).abs() < 1e-9));
        assert!(outer.iter().all(|d| (d - 120.0).abs() < 1e-9));
        for (k, tri) in anchors.chunks(3).enumerate() {
            for a in tri {
                assert_relative_eq!(a.projection().distance_to(&spec.centroid), spec.side(k) / 3f64.sqrt(), max_relative = 1e-12);
            }
        }
        // Same bearing for matching vertices.
        for i in 0..3 {
            let b0 = (anchors[i].y - spec.centroid.y).atan2(anchors[i].x - spec.centroid.x);
            let b1 = (anchors[i + 3].y - spec.centroid.y).atan2(anchors[i + 3].x - spec.centroid.x);
            assert!((b0 - b1).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_constellations() {
        for spec in [
            ConstellationSpec { n_anchors: 4, ..Default::default() },
            ConstellationSpec { n_anchors: 0, ..Default::default() },
            ConstellationSpec { base_side: 0.0, ..Default::default() },
            ConstellationSpec { side_increment: -1.0, ..Default::default() },
            ConstellationSpec { altitude: 0.0, ..Default::default() },
        ] {
            assert!(matches!(build_constellation(&spec), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn link_geometry_cases() {
        let a = Anchor::new(0.0, 0.0, 100.0).unwrap();
        let g = link_geometry(&a, &NodePosition::ORIGIN);
        assert_eq!((g.r, g.d(), g.theta()), (0.0, 100.0, FRAC_PI_2));
        let g = link_geometry(&a, &NodePosition::new(100.0, 0.0));
        assert_relative_eq!(g.theta(), FRAC_PI_4, max_relative = 1e-15);
        let a = Anchor::new(3.0, 4.0, 12.0).unwrap();
        let g = link_geometry(&a, &NodePosition::ORIGIN);
        assert_eq!((g.r, g.d()), (5.0, 13.0));
    }

    #[test]
    fn coverage_is_inclusive() {
        let a = Anchor::new(0.0, 0.0, 100.0).unwrap();
        assert!(in_coverage(&a, &NodePosition::new(1e9, 0.0)));
        let a = a.with_coverage_radius(250.0).unwrap();
        assert!(in_coverage(&a, &NodePosition::new(250.0, 0.0)));
        assert!(!in_coverage(&a, &NodePosition::new(250.0 + 1e-9, 0.0)));
        assert!(Anchor::new(0.0, 0.0, 1.0).unwrap().with_coverage_radius(0.0).is_err());
    }

    #[test]
    fn disk_samples_stay_inside() {
        let c = NodePosition::new(-30.0, 12.0);
        let pts = sample_nodes_uniform_disk(10_000, 1000.0, c, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(pts.iter().all(|p| p.distance_to(&c) <= 1000.0));
        assert!(sample_nodes_uniform_disk(0, 1.0, c, &mut ChaCha8Rng::seed_from_u64(5)).is_err());
        assert!(sample_nodes_uniform_disk(1, -1.0, c, &mut ChaCha8Rng::seed_from_u64(5)).is_err());
    }

    #[test]
    fn disk_samples_are_uniform() {
        let n = 1_000_000;
        let radius = 1000.0;
        let pts = sample_nodes_uniform_disk(n, radius, NodePosition::ORIGIN, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let mx = pts.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.y).sum::<f64>() / n as f64;
        let bound = 3.0 * radius / (2f64.sqrt() * 1000.0);
        assert!(mx.abs() < bound && my.abs() < bound, "({mx}, {my})");
        let inner = pts.iter().filter(|p| p.distance_to(&NodePosition::ORIGIN) < radius / 2f64.sqrt()).count();
        assert!((inner as f64 / n as f64 - 0.5).abs() < 0.005);
    }

    #[test]
    fn ring_cycles_azimuths() {
        let pts = ring_nodes(16, 650.0, 8, NodePosition::ORIGIN).unwrap();
        assert_relative_eq!(pts[0].x, 650.0);
        assert_eq!(pts[0], pts[8]);
        assert!(pts.iter().all(|p| (p.distance_to(&NodePosition::ORIGIN) - 650.0).abs() < 1e-9));
    }
}
