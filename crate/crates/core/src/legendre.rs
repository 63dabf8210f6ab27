//! Legendre curves in the xz-plane.
//!
//! A Legendre curve is a plane curve `γ = (x, z)` together with a unit
//! normal `ν = (cos φ, sin φ)` such that `γ' · ν = 0`, even where `γ` itself
//! is singular. With `μ = J(ν) = (−sin φ, cos φ)` the frame equations are
//! `γ' = β μ` and `ν' = ℓ μ`; `(ℓ, β)` is the curvature of the curve.

use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::numerics::{self, find_roots, linspace, unwrap_angle, NumericsError, RootConfig, UnwrappedAngle};

/// Values below this count as zero in classification predicates.
pub const ZERO_TOL: f64 = 1e-10;

const BUILD_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LegendreError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("curve is singular at t = {t}; supply an explicit normal or angle")]
    NeedsExplicitNu { t: f64 },
    #[error("normal is not a unit vector at t = {t}: |ν| = {norm}")]
    NotUnit { t: f64, norm: f64 },
    #[error("Legendre condition violated: |γ'·ν| = {residual:e} at t = {t}")]
    LegendreViolated { t: f64, residual: f64 },
    #[error("ℓ vanishes at t = {t}; the evolute is undefined there")]
    EllVanishes { t: f64 },
}

/// How the unit normal of a curve is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum NuSource {
    /// Computed from the tangent; the curve must be regular.
    Auto,
    /// `ν = (a(t), b(t))`.
    Explicit { a: Expr, b: Expr },
    /// `ν = (cos φ(t), sin φ(t))`.
    Phi(Expr),
}

#[derive(Debug, Clone, PartialEq)]
enum PhiRepr {
    Exact(Expr),
    Sampled(UnwrappedAngle),
}

/// All frame data of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub dx: f64,
    pub dz: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
    pub beta: f64,
    pub ell: f64,
}

impl CurvePoint {
    pub fn nu(&self) -> [f64; 2] {
        [self.cos_phi, self.sin_phi]
    }

    pub fn mu(&self) -> [f64; 2] {
        [-self.sin_phi, self.cos_phi]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCurve {
    x: Expr,
    z: Expr,
    dx: Expr,
    dz: Expr,
    cos_phi: Expr,
    sin_phi: Expr,
    beta: Expr,
    ell: Expr,
    phi: PhiRepr,
    domain: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub t: f64,
    /// `ℓβ'' − βℓ''` is nonzero at `t`.
    pub ordinary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Vertices {
    /// `β'ℓ − βℓ'` vanishes identically (constant curvature).
    DegenerateEverywhere,
    Isolated(Vec<Vertex>),
}

impl LegendreCurve {
    pub fn build(x: Expr, z: Expr, nu: NuSource, domain: (f64, f64)) -> Result<Self, LegendreError> {
        let (t0, t1) = domain;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(LegendreError::InvalidDomain(t0, t1));
        }
        let dx = x.diff();
        let dz = z.diff();
        let grid = linspace(t0, t1, BUILD_SAMPLES);
        let (cos_phi, sin_phi, beta, ell, exact_phi) = match nu {
            NuSource::Auto => {
                let speed2 = dx.clone() * dx.clone() + dz.clone() * dz.clone();
                let f = |t: f64| speed2.eval(t).unwrap_or(f64::NAN);
                let zeros = find_roots(
                    f,
                    domain,
                    &RootConfig {
                        bracket_samples: BUILD_SAMPLES,
                        ..RootConfig::default()
                    },
                );
                if let Some(&t) = zeros.first() {
                    return Err(LegendreError::NeedsExplicitNu { t });
                }
                for &t in &grid {
                    if speed2.eval(t)? <= 1e-20 {
                        return Err(LegendreError::NeedsExplicitNu { t });
                    }
                }
                let speed = Expr::sqrt(speed2.clone());
                let a = dz.clone() / speed.clone();
                let b = -(dx.clone() / speed.clone());
                let curl = dx.clone() * dz.diff() - dz.clone() * dx.diff();
                let ell = curl / speed2;
                (a, b, speed, ell, None)
            }
            NuSource::Explicit { a, b } => {
                let beta = dz.clone() * a.clone() - dx.clone() * b.clone();
                let ell = b.diff() * a.clone() - a.diff() * b.clone();
                (a, b, beta, ell, None)
            }
            NuSource::Phi(phi) => {
                let a = Expr::cos(phi.clone());
                let b = Expr::sin(phi.clone());
                let beta = dz.clone() * a.clone() - dx.clone() * b.clone();
                (a, b, beta, phi.diff(), Some(phi))
            }
        };
        let mut angle_samples = Vec::with_capacity(grid.len());
        for &t in &grid {
            let a = cos_phi.eval(t)?;
            let b = sin_phi.eval(t)?;
            let norm = a.hypot(b);
            if (norm - 1.0).abs() > 1e-8 {
                return Err(LegendreError::NotUnit { t, norm });
            }
            let (gx, gz) = (dx.eval(t)?, dz.eval(t)?);
            let residual = (gx * a + gz * b).abs();
            if residual > 1e-8 * (1.0 + gx.hypot(gz)) {
                return Err(LegendreError::LegendreViolated { t, residual });
            }
            angle_samples.push((t, [a, b]));
        }
        let phi = match exact_phi {
            Some(p) => PhiRepr::Exact(p),
            None => PhiRepr::Sampled(unwrap_angle(&angle_samples)?),
        };
        Ok(LegendreCurve {
            x,
            z,
            dx,
            dz,
            cos_phi,
            sin_phi,
            beta,
            ell,
            phi,
            domain,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn x_expr(&self) -> &Expr {
        &self.x
    }

    pub fn z_expr(&self) -> &Expr {
        &self.z
    }

    pub fn cos_phi_expr(&self) -> &Expr {
        &self.cos_phi
    }

    pub fn sin_phi_expr(&self) -> &Expr {
        &self.sin_phi
    }

    pub fn beta_expr(&self) -> &Expr {
        &self.beta
    }

    pub fn ell_expr(&self) -> &Expr {
        &self.ell
    }

    pub fn point(&self, t: f64) -> Result<CurvePoint, ExprError> {
        Ok(CurvePoint {
            t,
            x: self.x.eval(t)?,
            z: self.z.eval(t)?,
            dx: self.dx.eval(t)?,
            dz: self.dz.eval(t)?,
            cos_phi: self.cos_phi.eval(t)?,
            sin_phi: self.sin_phi.eval(t)?,
            beta: self.beta.eval(t)?,
            ell: self.ell.eval(t)?,
        })
    }

    pub fn gamma(&self, t: f64) -> Result<[f64; 2], ExprError> {
        Ok([self.x.eval(t)?, self.z.eval(t)?])
    }

    pub fn nu(&self, t: f64) -> Result<[f64; 2], ExprError> {
        Ok([self.cos_phi.eval(t)?, self.sin_phi.eval(t)?])
    }

    pub fn mu(&self, t: f64) -> Result<[f64; 2], ExprError> {
        Ok([-self.sin_phi.eval(t)?, self.cos_phi.eval(t)?])
    }

    pub fn beta(&self, t: f64) -> Result<f64, ExprError> {
        self.beta.eval(t)
    }

    pub fn ell(&self, t: f64) -> Result<f64, ExprError> {
        self.ell.eval(t)
    }

    /// The continuous angle `φ` with `ν = (cos φ, sin φ)`. Exact when the
    /// curve was given by an angle, interpolated from the build grid
    /// otherwise.
    pub fn phi(&self, t: f64) -> Result<f64, ExprError> {
        match &self.phi {
            PhiRepr::Exact(p) => p.eval(t),
            PhiRepr::Sampled(u) => Ok(u.eval(t)),
        }
    }

    /// Zeros of `β`: the singular points of `γ`.
    pub fn singular_points(&self) -> Vec<f64> {
        let f = |t: f64| self.beta.eval(t).unwrap_or(f64::NAN);
        find_roots(f, self.domain, &RootConfig::default())
    }

    pub fn is_front_at(&self, t: f64) -> Result<bool, ExprError> {
        Ok(self.ell.eval(t)?.abs() + self.beta.eval(t)?.abs() > ZERO_TOL)
    }

    /// `γ + λν` with the same normal; its curvature is `(ℓ, β + λℓ)`.
    pub fn parallel_curve(&self, lambda: f64) -> LegendreCurve {
        let lam = Expr::num(lambda);
        let x = self.x.clone() + lam.clone() * self.cos_phi.clone();
        let z = self.z.clone() + lam.clone() * self.sin_phi.clone();
        LegendreCurve {
            dx: x.diff(),
            dz: z.diff(),
            x,
            z,
            cos_phi: self.cos_phi.clone(),
            sin_phi: self.sin_phi.clone(),
            beta: self.beta.clone() + lam * self.ell.clone(),
            ell: self.ell.clone(),
            phi: self.phi.clone(),
            domain: self.domain,
        }
    }

    /// `γ − (β/ℓ) ν`.
    pub fn evolute(&self, t: f64) -> Result<[f64; 2], LegendreError> {
        let p = self.point(t)?;
        if p.ell.abs() <= 1e-12 {
            return Err(LegendreError::EllVanishes { t });
        }
        let r = p.beta / p.ell;
        Ok([p.x - r * p.cos_phi, p.z - r * p.sin_phi])
    }

    /// `β'ℓ − βℓ'`, whose zeros are the vertices of a regular curve.
    pub fn vertex_function(&self) -> Expr {
        self.beta.diff() * self.ell.clone() - self.beta.clone() * self.ell.diff()
    }

    pub fn vertices(&self) -> Result<Vertices, LegendreError> {
        let v = self.vertex_function();
        let grid = linspace(self.domain.0, self.domain.1, BUILD_SAMPLES);
        let mut vmax = 0.0f64;
        let mut scale = 0.0f64;
        for &t in &grid {
            let p = self.point(t)?;
            let db = self.beta.diff().eval(t)?;
            let dl = self.ell.diff().eval(t)?;
            vmax = vmax.max(v.eval(t)?.abs());
            scale = scale.max((db * p.ell).abs()).max((p.beta * dl).abs());
        }
        if vmax <= ZERO_TOL * (1.0 + scale) {
            return Ok(Vertices::DegenerateEverywhere);
        }
        let f = |t: f64| v.eval(t).unwrap_or(f64::NAN);
        let mut out = Vec::new();
        for t in find_roots(f, self.domain, &RootConfig::default()) {
            let b = self.beta.derivatives(t, 2)?;
            let l = self.ell.derivatives(t, 2)?;
            let w = l[0] * b[2] - b[0] * l[2];
            let wscale = (l[0] * b[2]).abs() + (b[0] * l[2]).abs();
            out.push(Vertex {
                t,
                ordinary: w.abs() > 1e-8 * (1.0 + wscale).max(1.0) && w.abs() > ZERO_TOL,
            });
        }
        Ok(Vertices::Isolated(out))
    }

    /// Classical signed curvature `(x'z'' − z'x'')/|γ'|³`, for comparison
    /// at regular points.
    pub fn classical_curvature(&self, t: f64) -> Result<f64, ExprError> {
        let (dx, dz) = (self.dx.eval(t)?, self.dz.eval(t)?);
        let ddx = self.dx.diff().eval(t)?;
        let ddz = self.dz.diff().eval(t)?;
        Ok((dx * ddz - dz * ddx) / dx.hypot(dz).powi(3))
    }

    /// Largest frame-equation residual over `n` uniform samples:
    /// `|ν| − 1`, `γ'·ν`, `γ' − βμ` and `ν' − ℓμ` (the last two with a
    /// finite-difference `ν'`).
    pub fn frame_residual(&self, n: usize) -> Result<f64, ExprError> {
        let mut worst = 0.0f64;
        let (t0, t1) = self.domain;
        let h = 1e-4 * (t1 - t0).max(1.0);
        for t in linspace(t0 + 2.0 * h, t1 - 2.0 * h, n) {
            let p = self.point(t)?;
            let mu = p.mu();
            let da = numerics::derivative_with_step(|s| self.cos_phi.eval(s).unwrap_or(f64::NAN), t, 1, h);
            let db = numerics::derivative_with_step(|s| self.sin_phi.eval(s).unwrap_or(f64::NAN), t, 1, h);
            let r = [
                (p.cos_phi.hypot(p.sin_phi) - 1.0).abs(),
                (p.dx * p.cos_phi + p.dz * p.sin_phi).abs(),
                (p.dx - p.beta * mu[0]).abs(),
                (p.dz - p.beta * mu[1]).abs(),
                (da - p.ell * mu[0]).abs(),
                (db - p.ell * mu[1]).abs(),
            ];
            worst = r.iter().fold(worst, |m, v| m.max(*v));
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn parabola() -> LegendreCurve {
        LegendreCurve::build(e("t+2"), e("t^2/2"), NuSource::Auto, (-1.5, 1.5)).unwrap()
    }

    fn circle() -> LegendreCurve {
        LegendreCurve::build(e("sin(t)"), e("2 - cos(t)"), NuSource::Auto, (0.0, 6.0)).unwrap()
    }

    #[test]
    fn parabola_frame() {
        let c = parabola();
        for t in [-1.2, 0.0, 0.7] {
            let p = c.point(t).unwrap();
            let n = (1.0 + t * t).sqrt();
            assert!((p.cos_phi - t / n).abs() < 1e-14);
            assert!((p.sin_phi + 1.0 / n).abs() < 1e-14);
            assert!((p.beta - n).abs() < 1e-14);
            assert!((p.ell - 1.0 / (n * n)).abs() < 1e-14);
        }
        assert!(c.frame_residual(1000).unwrap() < 1e-8);
        assert!((c.phi(0.0).unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn circle_frame() {
        let c = circle();
        let p = c.point(1.1).unwrap();
        assert!((p.beta - 1.0).abs() < 1e-14 && (p.ell - 1.0).abs() < 1e-14);
        assert!((p.cos_phi - 1.1f64.sin()).abs() < 1e-14);
        assert!((p.sin_phi + 1.1f64.cos()).abs() < 1e-14);
        let ev = c.evolute(2.3).unwrap();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
        assert_eq!(c.vertices().unwrap(), Vertices::DegenerateEverywhere);
    }

    #[test]
    fn singular_curve_needs_normal() {
        let r = LegendreCurve::build(e("t^2/2 + 1"), e("t^3/3"), NuSource::Auto, (-1.0, 1.0));
        assert!(matches!(r, Err(LegendreError::NeedsExplicitNu { t }) if t.abs() < 1e-6));
        let c = LegendreCurve::build(
            e("t^2/2 + 1"),
            e("t^3/3"),
            NuSource::Explicit {
                a: e("t/sqrt(1+t^2)"),
                b: e("-1/sqrt(1+t^2)"),
            },
            (-1.0, 1.0),
        )
        .unwrap();
        let s = c.singular_points();
        assert_eq!(s.len(), 1);
        assert!(s[0].abs() < 1e-10);
        assert!(c.is_front_at(0.0).unwrap());
    }

    #[test]
    fn wrong_normal_is_rejected() {
        let r = LegendreCurve::build(e("t"), e("0"), NuSource::Explicit { a: e("1"), b: e("0") }, (0.0, 1.0));
        assert!(matches!(r, Err(LegendreError::LegendreViolated { .. })));
        let r = LegendreCurve::build(e("t"), e("0"), NuSource::Explicit { a: e("0"), b: e("2") }, (0.0, 1.0));
        assert!(matches!(r, Err(LegendreError::NotUnit { .. })));
    }

    #[test]
    fn parallel_and_evolute() {
        let c = circle();
        let p = c.parallel_curve(-1.0);
        for t in [0.5, 2.0, 4.0] {
            let g = p.gamma(t).unwrap();
            assert!(g[0].abs() < 1e-14 && (g[1] - 2.0).abs() < 1e-14);
            assert!(p.beta(t).unwrap().abs() < 1e-14);
        }
        let c = parabola();
        let ev = c.evolute(0.0).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let s = c.parallel_curve(-2.0 * 2f64.sqrt()).singular_points();
        assert_eq!(s.len(), 2);
        assert!((s[0] + 1.0).abs() < 1e-10 && (s[1] - 1.0).abs() < 1e-10);
        assert_eq!(c.parallel_curve(0.0).gamma(0.3).unwrap(), c.gamma(0.3).unwrap());
    }

    #[test]
    fn evolute_needs_curvature() {
        let line = LegendreCurve::build(e("t"), e("t"), NuSource::Auto, (0.0, 1.0)).unwrap();
        assert!(matches!(line.evolute(0.5), Err(LegendreError::EllVanishes { .. })));
    }

    #[test]
    fn vertex_orders() {
        match parabola().vertices().unwrap() {
            Vertices::Isolated(v) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].t.abs() < 1e-10 && v[0].ordinary);
            }
            other => panic!("{other:?}"),
        }
        let flat = LegendreCurve::build(e("t"), e("t^6"), NuSource::Auto, (-1.0, 1.0)).unwrap();
        match flat.vertices().unwrap() {
            Vertices::Isolated(v) => {
                let at0: Vec<_> = v.iter().filter(|v| v.t.abs() < 1e-6).collect();
                assert_eq!(at0.len(), 1);
                assert!(!at0[0].ordinary);
            }
            other => panic!("{other:?}"),
        }
    }
}
