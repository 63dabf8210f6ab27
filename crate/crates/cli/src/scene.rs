//! Scene files: a profile curve, its domain, and the helicoid built on it.

use std::f64::consts::TAU;
use std::path::Path;

use helicoid_core::expr::parse;
use helicoid_core::helicoid::{Axis, HelicoidalSurface};
use helicoid_core::legendre::{LegendreCurve, NuSource};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normal {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub x: String,
    pub z: String,
    #[serde(default)]
    pub nu: Option<Normal>,
    #[serde(default)]
    pub phi: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    X,
    Z,
}

fn default_axis() -> AxisName {
    AxisName::Z
}

fn default_samples() -> usize {
    200
}

fn default_theta() -> (f64, f64, usize) {
    (0.0, TAU, 64)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub curve: CurveSpec,
    pub domain: (f64, f64),
    #[serde(default = "default_axis")]
    pub axis: AxisName,
    #[serde(default)]
    pub slant: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_theta")]
    pub theta: (f64, f64, usize),
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid("scene-read", format!("{}: {e}", path.display())))?;
        Scene::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Scene, CliError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| CliError::invalid("scene-parse", e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::invalid("scene-invalid", m));
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return bad(format!("domain [{a}, {b}] must satisfy t_min < t_max"));
        }
        if self.samples < 2 {
            return bad(format!("samples = {} must be at least 2", self.samples));
        }
        if !self.slant.is_finite() {
            return bad("slant must be finite".into());
        }
        let (t0, t1, n) = self.theta;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) || n < 2 {
            return bad(format!("theta [{t0}, {t1}, {n}] needs min < max and count >= 2"));
        }
        if self.curve.nu.is_some() && self.curve.phi.is_some() {
            return bad("give at most one of curve.nu and curve.phi".into());
        }
        Ok(())
    }

    pub fn axis(&self) -> Axis {
        match self.axis {
            AxisName::X => Axis::X,
            AxisName::Z => Axis::Z,
        }
    }

    pub fn curve(&self) -> Result<LegendreCurve, CliError> {
        let c = &self.curve;
        let nu = match (&c.nu, &c.phi) {
            (Some(n), _) => NuSource::Explicit {
                a: parse(&n.a)?,
                b: parse(&n.b)?,
            },
            (None, Some(phi)) => NuSource::Phi(parse(phi)?),
            (None, None) => NuSource::Auto,
        };
        Ok(LegendreCurve::build(parse(&c.x)?, parse(&c.z)?, nu, self.domain)?)
    }

    pub fn surface(&self) -> Result<HelicoidalSurface, CliError> {
        let h = HelicoidalSurface::build(self.curve()?, self.axis(), self.slant)?;
        Ok(h.with_theta_range((self.theta.0, self.theta.1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let s = Scene::from_json(r#"{"curve": {"x": "t + 2", "z": "t^2/2"}, "domain": [-1, 1]}"#).unwrap();
        assert_eq!((s.samples, s.slant, s.theta.2), (200, 0.0, 64));
        assert!(matches!(s.axis, AxisName::Z));
        for bad in [
            r#"{"curve": {"x": "t", "z": "0"}, "domain": [1, -1]}"#,
            r#"{"curve": {"x": "t", "z": "0"}, "domain": [0, 1], "samples": 1}"#,
            r#"{"curve": {"x": "t", "z": "0"}, "domain": [0, 1], "theta": [0, 1, 1]}"#,
            r#"{"curve": {"x": "t", "z": "0"}, "domain": [0, 1], "colour": 3}"#,
        ] {
            assert_eq!(
                Scene::from_json(bad).unwrap_err().class,
                crate::error::Class::Invalid,
                "{bad}"
            );
        }
    }
}
