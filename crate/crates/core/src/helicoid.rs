//! Helicoidal surfaces generated by a Legendre curve.
//!
//! Around the z-axis the surface is `(x cos θ, x sin θ, cθ + z)`; around the
//! x-axis it is `(cθ + x, z cos θ, z sin θ)`. With `c = 0` both are surfaces
//! of revolution. The frame `(n, s, t)` and every invariant are given in
//! closed form in terms of `(x, z, φ, ℓ, β)` and the slant `c`.
//!
//! Internally both axes share one implementation: the x-axis surface of
//! `γ = (x, z)` is the z-axis surface of the swapped curve `(z, x)` (for
//! which `cos φ ↔ sin φ` and `(ℓ, β) ↦ (−ℓ, −β)`), followed by the cyclic
//! permutation of coordinates. The closed-form invariants are still written
//! out per axis.

use std::f64::consts::TAU;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::ExprError;
use crate::framed::{BasicInvariants, FramedCurvature, FramedSurface, PointClass};
use crate::legendre::{CurvePoint, LegendreCurve, LegendreError};
use crate::numerics::{derivative, find_roots, linspace, RootConfig};
use crate::vec3::{norm, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HelicoidError {
    #[error(transparent)]
    Curve(#[from] LegendreError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("ξ vanishes at t = {ts:?}")]
    XiVanishes { ts: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Revolution,
    Helicoidal,
}

/// Profile data in axis coordinates: `r` is the distance-like coordinate,
/// `h` the coordinate along the axis, `(cr, sr)` the matching normal
/// components and `(ell, beta)` the curvature with the orientation of the
/// z-axis convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPoint {
    pub t: f64,
    pub r: f64,
    pub h: f64,
    pub cr: f64,
    pub sr: f64,
    pub beta: f64,
    pub ell: f64,
    pub xi: f64,
}

impl Axis {
    pub fn adapt(self, p: &CurvePoint, c: f64) -> AxisPoint {
        let (r, h, cr, sr, beta, ell) = match self {
            Axis::Z => (p.x, p.z, p.cos_phi, p.sin_phi, p.beta, p.ell),
            Axis::X => (p.z, p.x, p.sin_phi, p.cos_phi, -p.beta, -p.ell),
        };
        AxisPoint {
            t: p.t,
            r,
            h,
            cr,
            sr,
            beta,
            ell,
            xi: (c * c * sr * sr + r * r).sqrt(),
        }
    }

    /// Map axis-frame coordinates (rotation plane first, axis last) to
    /// world coordinates.
    pub fn to_world(self, p: Vec3) -> Vec3 {
        match self {
            Axis::Z => p,
            Axis::X => [p[2], p[0], p[1]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Z => "z",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontReport {
    pub kind: SurfaceKind,
    pub is_frontal: bool,
    pub is_front: bool,
    /// Parameters where the front condition fails.
    pub witnesses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
    pub rows: usize,
    pub cols: usize,
    /// The θ range spans a full turn; seam vertices are duplicated.
    pub closed_in_theta: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HelicoidalSurface {
    profile: LegendreCurve,
    axis: Axis,
    c: f64,
    pub theta_range: (f64, f64),
}

const XI_SAMPLES: usize = 1001;

impl HelicoidalSurface {
    pub fn build(profile: LegendreCurve, axis: Axis, c: f64) -> Result<Self, HelicoidError> {
        let surface = HelicoidalSurface {
            profile,
            axis,
            c,
            theta_range: (0.0, TAU),
        };
        surface.check_xi()?;
        Ok(surface)
    }

    pub fn with_theta_range(mut self, range: (f64, f64)) -> Self {
        self.theta_range = range;
        self
    }

    fn check_xi(&self) -> Result<(), HelicoidError> {
        let domain = self.profile.domain();
        let r_of = |t: f64| {
            self.profile
                .point(t)
                .map(|p| self.axis.adapt(&p, self.c).r)
                .unwrap_or(f64::NAN)
        };
        let mut bad = Vec::new();
        for t in find_roots(r_of, domain, &RootConfig::default()) {
            let p = self.axis_point(t)?;
            if self.c == 0.0 || p.sr.abs() <= 1e-8 {
                bad.push(t);
            }
        }
        for t in linspace(domain.0, domain.1, XI_SAMPLES) {
            if self.axis_point(t)?.xi <= 1e-10 && !bad.iter().any(|b| (b - t).abs() < 1e-6) {
                bad.push(t);
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(HelicoidError::XiVanishes { ts: bad })
        }
    }

    pub fn profile(&self) -> &LegendreCurve {
        &self.profile
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn slant(&self) -> f64 {
        self.c
    }

    pub fn kind(&self) -> SurfaceKind {
        if self.c == 0.0 {
            SurfaceKind::Revolution
        } else {
            SurfaceKind::Helicoidal
        }
    }

    pub fn axis_point(&self, t: f64) -> Result<AxisPoint, ExprError> {
        Ok(self.axis.adapt(&self.profile.point(t)?, self.c))
    }

    pub fn xi(&self, t: f64) -> Result<f64, ExprError> {
        Ok(self.axis_point(t)?.xi)
    }

    pub fn position(&self, t: f64, theta: f64) -> Result<Vec3, ExprError> {
        let p = self.axis_point(t)?;
        let (s, c) = theta.sin_cos();
        Ok(self.axis.to_world([p.r * c, p.r * s, p.h + self.c * theta]))
    }

    /// Closed-form `(n, s, t)`; `t = n × s`.
    pub fn frame(&self, t: f64, theta: f64) -> Result<(Vec3, Vec3, Vec3), ExprError> {
        let p = self.axis_point(t)?;
        Ok(self.frame_at(&p, theta))
    }

    fn frame_at(&self, p: &AxisPoint, theta: f64) -> (Vec3, Vec3, Vec3) {
        let (sn, cs) = theta.sin_cos();
        let (r, cr, sr, xi, c) = (p.r, p.cr, p.sr, p.xi, self.c);
        let n = [
            (c * sr * sn + r * cr * cs) / xi,
            (-c * sr * cs + r * cr * sn) / xi,
            r * sr / xi,
        ];
        let s = [
            (-c * sr * cr * cs + r * sn) / xi,
            (-c * sr * cr * sn - r * cs) / xi,
            -c * sr * sr / xi,
        ];
        let tv = [sr * cs, sr * sn, -cr];
        (self.axis.to_world(n), self.axis.to_world(s), self.axis.to_world(tv))
    }

    /// Basic invariants read off the closed-form matrices.
    pub fn invariants_closed_form(&self, t: f64) -> Result<BasicInvariants, ExprError> {
        let q = self.profile.point(t)?;
        let (b, l, c) = (q.beta, q.ell, self.c);
        let (cp, sp) = (q.cos_phi, q.sin_phi);
        Ok(match self.axis {
            Axis::Z => {
                let x = q.x;
                let xi = (c * c * sp * sp + x * x).sqrt();
                BasicInvariants {
                    a1: 0.0,
                    b1: -b,
                    a2: -xi,
                    b2: -c * cp,
                    e1: c * (b * sp * sp + l * x * cp) / (xi * xi),
                    f1: -l * x / xi,
                    g1: c * l * sp / xi,
                    e2: -cp,
                    f2: c * sp * sp / xi,
                    g2: x * sp / xi,
                }
            }
            Axis::X => {
                let z = q.z;
                let xi = (c * c * cp * cp + z * z).sqrt();
                BasicInvariants {
                    a1: 0.0,
                    b1: b,
                    a2: -xi,
                    b2: -c * sp,
                    e1: -c * (b * cp * cp + z * l * sp) / (xi * xi),
                    f1: z * l / xi,
                    g1: -c * l * cp / xi,
                    e2: -sp,
                    f2: c * cp * cp / xi,
                    g2: z * cp / xi,
                }
            }
        })
    }

    /// `(J_F, K_F, H_F)` in closed form; independent of θ.
    pub fn curvature_closed_form(&self, t: f64) -> Result<FramedCurvature, ExprError> {
        let q = self.profile.point(t)?;
        let (b, l, c) = (q.beta, q.ell, self.c);
        let (cp, sp) = (q.cos_phi, q.sin_phi);
        let c2 = c * c;
        Ok(match self.axis {
            Axis::Z => {
                let x = q.x;
                let xi2 = c2 * sp * sp + x * x;
                let xi = xi2.sqrt();
                FramedCurvature {
                    j: -b * xi,
                    k: (c2 * b * sp.powi(4) - x.powi(3) * l * cp) / (xi2 * xi),
                    h: (b * (xi2 + c2 * sp * sp) * cp + x * l * (c2 + x * x)) / (2.0 * xi2),
                }
            }
            Axis::X => {
                let z = q.z;
                let xi2 = c2 * cp * cp + z * z;
                let xi = xi2.sqrt();
                FramedCurvature {
                    j: b * xi,
                    k: -(c2 * b * cp.powi(4) - z.powi(3) * l * sp) / (xi2 * xi),
                    h: -(b * (xi2 + c2 * cp * cp) * sp + z * l * (c2 + z * z)) / (2.0 * xi2),
                }
            }
        })
    }

    /// The eight components of the concomitant mapping in closed form.
    pub fn concomitant_closed_form(&self, t: f64) -> Result<[f64; 8], ExprError> {
        let cf = self.curvature_closed_form(t)?;
        let q = self.profile.point(t)?;
        let (b, l, c) = (q.beta, q.ell, self.c);
        let (cp, sp) = (q.cos_phi, q.sin_phi);
        let c2 = c * c;
        let tail = match self.axis {
            Axis::Z => {
                let x = q.x;
                let xi2 = c2 * sp * sp + x * x;
                let xi = xi2.sqrt();
                [
                    c * l * sp,
                    -(x * b - c2 * l * cp) * sp / xi,
                    c * (x * b * sp * sp + l * (x * x + xi2) * cp) * sp / (xi2 * xi),
                    -l * sp,
                    c * (b * sp * sp + x * l * cp) / xi,
                ]
            }
            Axis::X => {
                let z = q.z;
                let xi2 = c2 * cp * cp + z * z;
                let xi = xi2.sqrt();
                [
                    -c * l * cp,
                    (b * z - c2 * l * sp) * cp / xi,
                    -c * (b * z * cp * cp + l * (xi2 + z * z) * sp) * cp / (xi2 * xi),
                    l * cp,
                    -c * (b * cp * cp + z * l * sp) / xi,
                ]
            }
        };
        Ok([cf.j, cf.k, cf.h, tail[0], tail[1], tail[2], tail[3], tail[4]])
    }

    /// The six integrability conditions evaluated on the closed-form
    /// invariants (same ordering as [`FramedSurface::integrability_residual`]).
    /// The invariants do not depend on θ, so only `t`-derivatives remain;
    /// those are taken by finite differences of the closed forms.
    pub fn integrability_residual(&self, t: f64) -> Result<[f64; 6], ExprError> {
        let b = self.invariants_closed_form(t)?;
        let dt = |pick: fn(&BasicInvariants) -> f64| {
            derivative(|s| self.invariants_closed_form(s).map_or(f64::NAN, |i| pick(&i)), t, 1)
        };
        Ok([
            -b.b1 * b.g2 - dt(|i| i.a2) + b.b2 * b.g1,
            -b.a2 * b.g1 - dt(|i| i.b2) + b.a1 * b.g2,
            b.a1 * b.e2 + b.b1 * b.f2 - b.a2 * b.e1 - b.b2 * b.f1,
            -b.f1 * b.g2 - dt(|i| i.e2) + b.f2 * b.g1,
            -b.e2 * b.g1 - dt(|i| i.f2) + b.e1 * b.g2,
            -b.e1 * b.f2 - dt(|i| i.g2) + b.e2 * b.f1,
        ])
    }

    pub fn classify_point(&self, t: f64) -> Result<PointClass, ExprError> {
        let i = self.concomitant_closed_form(t)?;
        let max = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(PointClass {
            regular: i[0].abs() > crate::framed::ZERO_TOL,
            legendre_immersion: max(&i[..3]) > crate::framed::ZERO_TOL,
            framed_immersion: max(&i) > crate::framed::ZERO_TOL,
        })
    }

    /// Frontal and front status over the whole profile domain.
    ///
    /// A surface of revolution fails to be a front where `γ` does or where
    /// the profile meets the axis with its normal along the axis direction
    /// (`(x, cos φ) = 0` around z, `(z, sin φ) = 0` around x). With `c ≠ 0`
    /// the second pair is `(x, β)` resp. `(z, β)`.
    pub fn classify_frontal_front(&self) -> Result<FrontReport, ExprError> {
        let cfg = RootConfig::default();
        let domain = self.profile.domain();
        let beta = |t: f64| self.profile.beta(t).unwrap_or(f64::NAN);
        let mut witnesses = Vec::new();
        for t in find_roots(beta, domain, &cfg) {
            let p = self.axis_point(t)?;
            let ell_zero = p.ell.abs() <= 1e-8;
            let axis_zero = self.c != 0.0 && p.r.abs() <= 1e-8;
            if ell_zero || axis_zero {
                witnesses.push(t);
            }
        }
        if self.c == 0.0 {
            let r = |t: f64| self.axis_point(t).map(|p| p.r).unwrap_or(f64::NAN);
            for t in find_roots(r, domain, &cfg) {
                if self.axis_point(t)?.cr.abs() <= 1e-8 {
                    witnesses.push(t);
                }
            }
        }
        witnesses.sort_by(|a, b| a.partial_cmp(b).unwrap());
        witnesses.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Ok(FrontReport {
            kind: self.kind(),
            is_frontal: true,
            is_front: witnesses.is_empty(),
            witnesses,
        })
    }

    /// `Λ = det(x_t, x_θ, n)` and its t-derivative. Singular points are
    /// zeros of `Λ`; they are non-degenerate where `Λ_t ≠ 0`.
    pub fn signed_area_density(&self, t: f64) -> Result<(f64, f64), ExprError> {
        let p = self.axis_point(t)?;
        let dbeta = self.profile.beta_expr().derivatives(t, 1)?[1];
        let dbeta = match self.axis {
            Axis::Z => dbeta,
            Axis::X => -dbeta,
        };
        let c2 = self.c * self.c;
        let dr = -p.beta * p.sr;
        let dsr = p.cr * p.ell;
        let dxi = (c2 * p.sr * dsr + p.r * dr) / p.xi;
        Ok((-p.xi * p.beta, -(dxi * p.beta + p.xi * dbeta)))
    }

    /// Grid mesh over the profile domain and θ range with per-vertex
    /// normals from the closed-form frame. Vertices are row-major in
    /// `(t, θ)`; each quad is split along its shorter diagonal.
    pub fn mesh(&self, t_samples: usize, theta_samples: usize) -> Result<Mesh, ExprError> {
        assert!(t_samples >= 2 && theta_samples >= 2, "mesh needs at least 2x2 samples");
        let (t0, t1) = self.profile.domain();
        let ts = linspace(t0, t1, t_samples);
        let thetas = linspace(self.theta_range.0, self.theta_range.1, theta_samples);
        let mut vertices = Vec::with_capacity(t_samples * theta_samples);
        let mut normals = Vec::with_capacity(t_samples * theta_samples);
        for &t in &ts {
            let p = self.axis_point(t)?;
            for &th in &thetas {
                let (s, c) = th.sin_cos();
                vertices.push(self.axis.to_world([p.r * c, p.r * s, p.h + self.c * th]));
                normals.push(self.frame_at(&p, th).0);
            }
        }
        let idx = |i: usize, j: usize| i * theta_samples + j;
        let dist = |a: usize, b: usize| norm(crate::vec3::sub(vertices[a], vertices[b]));
        let mut triangles = Vec::with_capacity(2 * (t_samples - 1) * (theta_samples - 1));
        for i in 0..t_samples - 1 {
            for j in 0..theta_samples - 1 {
                let (a, b, c, d) = (idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j));
                if dist(a, c) <= dist(b, d) {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        let span = self.theta_range.1 - self.theta_range.0;
        Ok(Mesh {
            vertices,
            normals,
            triangles,
            rows: t_samples,
            cols: theta_samples,
            closed_in_theta: (span.abs() - TAU).abs() < 1e-12,
        })
    }

    /// The same surface as a generic framed surface in `(u, v) = (t, θ)`,
    /// with the closed-form frame. Evaluation failures yield NaN.
    pub fn as_framed_surface(&self) -> FramedSurface {
        let me = Arc::new(self.clone());
        let (m1, m2, m3) = (me.clone(), me.clone(), me.clone());
        FramedSurface::new(
            move |t, th| m1.position(t, th).unwrap_or([f64::NAN; 3]),
            move |t, th| m2.frame(t, th).map(|f| f.0).unwrap_or([f64::NAN; 3]),
            move |t, th| m3.frame(t, th).map(|f| f.1).unwrap_or([f64::NAN; 3]),
            me.profile.domain(),
            me.theta_range,
        )
    }
}
