//! Framed surfaces `(x, n, s)` with invariants computed by frame projection.
//!
//! Everything here works from evaluable maps and central differences, so it
//! applies to any framed surface and serves as the reference against which
//! closed-form invariants are checked. No matrix is ever inverted, which
//! keeps the computations valid at singular points of `x`.

use std::fmt;
use std::sync::Arc;

use crate::numerics::derivative_with_step;
use crate::vec3::{add, cross, dot, norm, scale, Vec3};

/// Values below this count as zero when classifying points.
pub const ZERO_TOL: f64 = 1e-10;

type Map = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

#[derive(Clone)]
pub struct FramedSurface {
    x: Map,
    n: Map,
    s: Map,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    step: f64,
}

impl fmt::Debug for FramedSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FramedSurface")
            .field("u_range", &self.u_range)
            .field("v_range", &self.v_range)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BasicInvariants {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub e1: f64,
    pub f1: f64,
    pub g1: f64,
    pub e2: f64,
    pub f2: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedCurvature {
    pub j: f64,
    pub k: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    /// `J_F ≠ 0`: `x` is an immersion.
    pub regular: bool,
    /// `C_F ≠ 0`: `(x, n)` is a Legendre immersion.
    pub legendre_immersion: bool,
    /// `I_F ≠ 0`: `(x, n, s)` is a framed immersion.
    pub framed_immersion: bool,
}

/// Real solutions of `K_F λ² − 2 H_F λ + J_F = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FocalRoots {
    None,
    One(f64),
    /// Two roots, the first with the larger magnitude numerator; equal for
    /// a double root.
    Two(f64, f64),
    /// `K_F = H_F = J_F = 0`: every λ solves the equation.
    Indeterminate,
}

fn det(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

impl BasicInvariants {
    pub fn as_array(&self) -> [f64; 10] {
        [
            self.a1, self.b1, self.a2, self.b2, self.e1, self.f1, self.g1, self.e2, self.f2, self.g2,
        ]
    }

    pub const NAMES: [&'static str; 10] = ["a1", "b1", "a2", "b2", "e1", "f1", "g1", "e2", "f2", "g2"];

    pub fn curvature(&self) -> FramedCurvature {
        FramedCurvature {
            j: det((self.a1, self.a2), (self.b1, self.b2)),
            k: det((self.e1, self.e2), (self.f1, self.f2)),
            h: -0.5 * (det((self.a1, self.a2), (self.f1, self.f2)) - det((self.b1, self.b2), (self.e1, self.e2))),
        }
    }

    /// `(J_F, K_F, H_F, det(a,g), det(b,g), det(e,g), det(f,g), det(a,e))`,
    /// each determinant taken over the columns `(·1, ·2)`.
    pub fn concomitant(&self) -> [f64; 8] {
        let c = self.curvature();
        let a = (self.a1, self.a2);
        let b = (self.b1, self.b2);
        let e = (self.e1, self.e2);
        let f = (self.f1, self.f2);
        let g = (self.g1, self.g2);
        [c.j, c.k, c.h, det(a, g), det(b, g), det(e, g), det(f, g), det(a, e)]
    }

    pub fn classify(&self) -> PointClass {
        let i = self.concomitant();
        let max = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        PointClass {
            regular: i[0].abs() > ZERO_TOL,
            legendre_immersion: max(&i[..3]) > ZERO_TOL,
            framed_immersion: max(&i) > ZERO_TOL,
        }
    }
}

impl FramedCurvature {
    pub fn as_array(&self) -> [f64; 3] {
        [self.j, self.k, self.h]
    }

    /// Gaussian curvature `K_F/J_F` at a regular point.
    pub fn gaussian(&self) -> f64 {
        self.k / self.j
    }

    /// Mean curvature `H_F/J_F` at a regular point.
    pub fn mean(&self) -> f64 {
        self.h / self.j
    }

    /// Solve `K λ² − 2Hλ + J = 0` with the cancellation-free form
    /// `q = H + sgn(H)√(H² − JK)`, roots `q/K` and `J/q`.
    pub fn focal_roots(&self) -> FocalRoots {
        let (j, k, h) = (self.j, self.k, self.h);
        let scale = h * h + (j * k).abs();
        if k.abs() <= ZERO_TOL {
            if h.abs() > ZERO_TOL {
                return FocalRoots::One(j / (2.0 * h));
            }
            return if j.abs() <= ZERO_TOL {
                FocalRoots::Indeterminate
            } else {
                FocalRoots::None
            };
        }
        let mut disc = h * h - j * k;
        if disc < 0.0 {
            if disc >= -1e-10 * scale {
                disc = 0.0;
            } else {
                return FocalRoots::None;
            }
        }
        let q = h + if h >= 0.0 { 1.0 } else { -1.0 } * disc.sqrt();
        if q == 0.0 {
            return FocalRoots::Two(0.0, 0.0);
        }
        FocalRoots::Two(q / k, j / q)
    }
}

impl FramedSurface {
    pub fn new(
        x: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        n: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        s: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        u_range: (f64, f64),
        v_range: (f64, f64),
    ) -> Self {
        FramedSurface {
            x: Arc::new(x),
            n: Arc::new(n),
            s: Arc::new(s),
            u_range,
            v_range,
            step: 1e-3,
        }
    }

    /// Base step of the central differences (default `1e-3`).
    pub fn with_step(mut self, h: f64) -> Self {
        self.step = h;
        self
    }

    pub fn position(&self, u: f64, v: f64) -> Vec3 {
        (self.x)(u, v)
    }

    pub fn normal(&self, u: f64, v: f64) -> Vec3 {
        (self.n)(u, v)
    }

    pub fn s_vec(&self, u: f64, v: f64) -> Vec3 {
        (self.s)(u, v)
    }

    pub fn t_vec(&self, u: f64, v: f64) -> Vec3 {
        cross(self.normal(u, v), self.s_vec(u, v))
    }

    fn d_u(&self, m: &Map, u: f64, v: f64) -> Vec3 {
        let h = self.step;
        let c = |i: usize| derivative_with_step(|uu| m(uu, v)[i], u, 1, h);
        [c(0), c(1), c(2)]
    }

    fn d_v(&self, m: &Map, u: f64, v: f64) -> Vec3 {
        let h = self.step;
        let c = |i: usize| derivative_with_step(|vv| m(u, vv)[i], v, 1, h);
        [c(0), c(1), c(2)]
    }

    pub fn x_u(&self, u: f64, v: f64) -> Vec3 {
        self.d_u(&self.x, u, v)
    }

    pub fn x_v(&self, u: f64, v: f64) -> Vec3 {
        self.d_v(&self.x, u, v)
    }

    /// Largest violation of `|n| = |s| = 1`, `n·s = 0` and `x_u·n = x_v·n = 0`
    /// (the last two relative to `1 + |x_u| + |x_v|`).
    pub fn frame_residual(&self, u: f64, v: f64) -> f64 {
        let n = self.normal(u, v);
        let s = self.s_vec(u, v);
        let xu = self.x_u(u, v);
        let xv = self.x_v(u, v);
        let rel = 1.0 + norm(xu) + norm(xv);
        [
            (norm(n) - 1.0).abs(),
            (norm(s) - 1.0).abs(),
            dot(n, s).abs(),
            dot(xu, n).abs() / rel,
            dot(xv, n).abs() / rel,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn basic_invariants(&self, u: f64, v: f64) -> BasicInvariants {
        let s = self.s_vec(u, v);
        let t = self.t_vec(u, v);
        let xu = self.x_u(u, v);
        let xv = self.x_v(u, v);
        let nu = self.d_u(&self.n, u, v);
        let nv = self.d_v(&self.n, u, v);
        let su = self.d_u(&self.s, u, v);
        let sv = self.d_v(&self.s, u, v);
        BasicInvariants {
            a1: dot(xu, s),
            b1: dot(xu, t),
            a2: dot(xv, s),
            b2: dot(xv, t),
            e1: dot(nu, s),
            f1: dot(nu, t),
            g1: dot(su, t),
            e2: dot(nv, s),
            f2: dot(nv, t),
            g2: dot(sv, t),
        }
    }

    pub fn curvature(&self, u: f64, v: f64) -> FramedCurvature {
        self.basic_invariants(u, v).curvature()
    }

    pub fn concomitant(&self, u: f64, v: f64) -> [f64; 8] {
        self.basic_invariants(u, v).concomitant()
    }

    pub fn classify(&self, u: f64, v: f64) -> PointClass {
        self.basic_invariants(u, v).classify()
    }

    pub fn focal_lambdas(&self, u: f64, v: f64) -> FocalRoots {
        self.curvature(u, v).focal_roots()
    }

    /// Residuals of the six integrability conditions, in the order
    /// `a, b, (a,e;b,f), e, f, g`:
    ///
    /// ```text
    /// a1_v − b1 g2 − a2_u + b2 g1
    /// b1_v − a2 g1 − b2_u + a1 g2
    /// a1 e2 + b1 f2 − a2 e1 − b2 f1
    /// e1_v − f1 g2 − e2_u + f2 g1
    /// f1_v − e2 g1 − f2_u + e1 g2
    /// g1_v − e1 f2 − g2_u + e2 f1
    /// ```
    pub fn integrability_residual(&self, u: f64, v: f64) -> [f64; 6] {
        let h = 5.0 * self.step;
        let inv = |uu: f64, vv: f64| self.basic_invariants(uu, vv);
        let dv = |pick: fn(&BasicInvariants) -> f64| derivative_with_step(|vv| pick(&inv(u, vv)), v, 1, h);
        let du = |pick: fn(&BasicInvariants) -> f64| derivative_with_step(|uu| pick(&inv(uu, v)), u, 1, h);
        let b = inv(u, v);
        [
            dv(|i| i.a1) - b.b1 * b.g2 - du(|i| i.a2) + b.b2 * b.g1,
            dv(|i| i.b1) - b.a2 * b.g1 - du(|i| i.b2) + b.a1 * b.g2,
            b.a1 * b.e2 + b.b1 * b.f2 - b.a2 * b.e1 - b.b2 * b.f1,
            dv(|i| i.e1) - b.f1 * b.g2 - du(|i| i.e2) + b.f2 * b.g1,
            dv(|i| i.f1) - b.e2 * b.g1 - du(|i| i.f2) + b.e1 * b.g2,
            dv(|i| i.g1) - b.e1 * b.f2 - du(|i| i.g2) + b.e2 * b.f1,
        ]
    }

    /// Largest entry of `F2_u − F1_v − (F1 F2 − F2 F1)`.
    pub fn frame_compatibility_residual(&self, u: f64, v: f64) -> f64 {
        let h = 5.0 * self.step;
        let mat = |i: &BasicInvariants, second: bool| {
            let (e, f, g) = if second { (i.e2, i.f2, i.g2) } else { (i.e1, i.f1, i.g1) };
            [[0.0, e, f], [-e, 0.0, g], [-f, -g, 0.0]]
        };
        let b = self.basic_invariants(u, v);
        let f1 = mat(&b, false);
        let f2 = mat(&b, true);
        let mut worst = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                let d2u = derivative_with_step(|uu| mat(&self.basic_invariants(uu, v), true)[r][c], u, 1, h);
                let d1v = derivative_with_step(|vv| mat(&self.basic_invariants(u, vv), false)[r][c], v, 1, h);
                let mut comm = 0.0;
                for k in 0..3 {
                    comm += f1[r][k] * f2[k][c] - f2[r][k] * f1[k][c];
                }
                worst = worst.max((d2u - d1v - comm).abs());
            }
        }
        worst
    }

    /// `(x + λn, n, s)`.
    pub fn parallel_surface(&self, lambda: f64) -> FramedSurface {
        let x = self.x.clone();
        let n = self.n.clone();
        FramedSurface {
            x: Arc::new(move |u, v| add(x(u, v), scale(n(u, v), lambda))),
            n: self.n.clone(),
            s: self.s.clone(),
            u_range: self.u_range,
            v_range: self.v_range,
            step: self.step,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> FramedSurface {
        FramedSurface::new(
            |u, v| [u, v, 0.0],
            |_, _| [0.0, 0.0, 1.0],
            |_, _| [1.0, 0.0, 0.0],
            (-1.0, 1.0),
            (-1.0, 1.0),
        )
    }

    fn sphere() -> FramedSurface {
        FramedSurface::new(
            |u: f64, v: f64| [u.cos() * v.cos(), u.cos() * v.sin(), u.sin()],
            |u: f64, v: f64| [u.cos() * v.cos(), u.cos() * v.sin(), u.sin()],
            |u: f64, v: f64| [-u.sin() * v.cos(), -u.sin() * v.sin(), u.cos()],
            (-1.5, 1.5),
            (0.0, 6.0),
        )
    }

    #[test]
    fn plane_invariants() {
        let p = plane();
        let b = p.basic_invariants(0.2, -0.3);
        let want = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (g, w) in b.as_array().iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        let i = p.concomitant(0.2, -0.3);
        assert!((i[0] - 1.0).abs() < 1e-12 && i[1..].iter().all(|v| v.abs() < 1e-12));
        assert!(p.integrability_residual(0.1, 0.1).iter().all(|r| r.abs() < 1e-10));
        assert_eq!(
            p.classify(0.0, 0.0),
            PointClass {
                regular: true,
                legendre_immersion: true,
                framed_immersion: true
            }
        );
        assert_eq!(p.focal_lambdas(0.0, 0.0), FocalRoots::None);
        let lifted = p.parallel_surface(1.0);
        assert!((lifted.position(0.3, 0.4)[2] - 1.0).abs() < 1e-15);
        assert!((lifted.curvature(0.3, 0.4).j - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_invariants() {
        let s = sphere();
        for (u, v) in [(0.3, 1.0), (-0.7, 4.0), (1.1, 2.5)] {
            let c = s.curvature(u, v);
            // with t = n × s the frame is left-handed relative to (x_u, x_v),
            // so all three carry a minus sign; the ratios do not
            assert!((c.j + u.cos()).abs() < 1e-9);
            assert!((c.k + u.cos()).abs() < 1e-9);
            assert!((c.h - u.cos()).abs() < 1e-9);
            assert!((c.gaussian() - 1.0).abs() < 1e-9);
            assert!((c.mean() + 1.0).abs() < 1e-9);
            assert!(s.integrability_residual(u, v).iter().all(|r| r.abs() < 1e-8));
            assert!(s.frame_compatibility_residual(u, v) < 1e-8);
            assert!(s.frame_residual(u, v) < 1e-9);
            match s.focal_lambdas(u, v) {
                FocalRoots::Two(a, b) => assert!((a + 1.0).abs() < 1e-4 && (b + 1.0).abs() < 1e-4),
                other => panic!("{other:?}"),
            }
        }
        let collapsed = s.parallel_surface(-1.0);
        assert!(collapsed.curvature(0.4, 1.0).j.abs() < 1e-9);
    }

    #[test]
    fn focal_root_cases() {
        let c = FramedCurvature { j: 1.0, k: 0.0, h: 0.0 };
        assert_eq!(c.focal_roots(), FocalRoots::None);
        let c = FramedCurvature { j: 0.0, k: 0.0, h: 0.0 };
        assert_eq!(c.focal_roots(), FocalRoots::Indeterminate);
        let c = FramedCurvature { j: 2.0, k: 0.0, h: 0.5 };
        assert_eq!(c.focal_roots(), FocalRoots::One(2.0));
        // (λ − 1)(λ − 1e-9) with tiny root recovered without cancellation
        let c = FramedCurvature {
            j: 1e-9,
            k: 1.0,
            h: 0.5 * (1.0 + 1e-9),
        };
        match c.focal_roots() {
            FocalRoots::Two(a, b) => {
                assert!((a - 1.0).abs() < 1e-15);
                assert!((b - 1e-9).abs() < 1e-24);
            }
            other => panic!("{other:?}"),
        }
    }
}
