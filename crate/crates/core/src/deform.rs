//! Parallel and focal surfaces of helicoidal surfaces and the plane-curve
//! deformations they induce.
//!
//! Offsetting a helicoidal surface along its normal by a constant `λ`, or by
//! a root `λ(t)` of `K_F λ² − 2 H_F λ + J_F = 0`, gives another helicoidal
//! surface with the same slant, generated by the space curve
//!
//! ```text
//! x1 = x (1 + λ cos φ / ξ),   x2 = −c λ sin φ / ξ,   x3 = z + λ x sin φ / ξ.
//! ```
//!
//! Rotating each point of that curve back into the profile plane turns it
//! into a plane curve `(X, Z)`; as `c` varies this is a one-parameter
//! deformation of the parallel curve (`γ_{λ,c}`) or of the evolute (`δ_c`).
//!
//! Everything is computed in axis coordinates (see [`AxisPoint`]), so the
//! x-axis case needs no separate formulas. `X` is always the coordinate
//! orthogonal to the axis and `Z` the one along it.

use std::f64::consts::PI;

use thiserror::Error;

use crate::expr::ExprError;
use crate::framed::FramedCurvature;
use crate::helicoid::{Axis, AxisPoint, HelicoidError, HelicoidalSurface};
use crate::legendre::{LegendreCurve, LegendreError, Vertices};
use crate::numerics::{continue_root, find_roots, linspace, Branch, NumericsError, RootConfig};
use crate::vec3::Vec3;

/// `|x1|`, `|x2|` below this count as zero when choosing a case of the
/// piecewise plane profile.
pub const AXIS_TOL: f64 = 1e-12;

const CHECK_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Curve(#[from] LegendreError),
    #[error(transparent)]
    Surface(#[from] HelicoidError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("x1 vanishes at t = {t} (umbilic obstruction)")]
    X1Vanishes { t: f64 },
    #[error("the focal profile meets the axis at t = {t}")]
    XbarVanishes { t: f64 },
    #[error("the focal profile meets the plane y = 0 at t = {t}; the second form is undefined there")]
    YbarVanishes { t: f64 },
    #[error("complex focal points at t = {t}: H² − JK = {discriminant:e}")]
    DiscriminantNegative { t: f64, discriminant: f64 },
    #[error("the selected focal branch is infinite at t = {t} (K_F = 0)")]
    FocalInfinite { t: f64 },
    #[error("hypotheses of the persistence theorem fail: {0}")]
    Hypothesis(String),
}

/// Which root of the focal quadratic to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FocalBranch {
    /// `λ⁺ = (H + √(H² − JK))/K`.
    Plus,
    /// `λ⁻ = (H − √(H² − JK))/K`.
    Minus,
    /// At each `t` the root `λ^σ` whose focal profile satisfies
    /// `sgn x̄ = −σ`. At `c = 0` this is `λ₁ = −sgn(x) β/ℓ`, the evolute
    /// branch. When both or neither root qualify the smaller one is used.
    Auto,
    /// The root not chosen by `Auto` (`λ₂ = −sgn(x) x / cos φ` at `c = 0`).
    Complement,
}

impl FocalBranch {
    pub fn name(self) -> &'static str {
        match self {
            FocalBranch::Plus => "plus",
            FocalBranch::Minus => "minus",
            FocalBranch::Auto => "auto",
            FocalBranch::Complement => "complement",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Parallel {
        lambda: f64,
    },
    Focal {
        branch: FocalBranch,
    },
    /// A focal branch with the sign `σ` of `λ^σ` fixed once for the whole
    /// curve.
    FocalSigned {
        sigma: f64,
    },
}

/// Closed-form `(J_F, K_F, H_F)` of the z-axis helicoid of slant `c`.
pub fn curvature_at(p: &AxisPoint, c: f64) -> FramedCurvature {
    let (x, b, l, cp, sp) = (p.r, p.beta, p.ell, p.cr, p.sr);
    let c2 = c * c;
    let xi2 = c2 * sp * sp + x * x;
    let xi = xi2.sqrt();
    FramedCurvature {
        j: -b * xi,
        k: (c2 * b * sp.powi(4) - x.powi(3) * l * cp) / (xi2 * xi),
        h: (b * (xi2 + c2 * sp * sp) * cp + x * l * (c2 + x * x)) / (2.0 * xi2),
    }
}

/// Both focal roots `(λ⁺, λ⁻)`, either of which may be infinite.
///
/// Uses `q = H + sgn(H)√D`: the root on the side of `sgn H` is `q/K`, the
/// other is `J/q`, so neither suffers cancellation.
pub fn focal_roots_signed(cf: &FramedCurvature, t: f64) -> Result<(f64, f64), DeformError> {
    let (j, k, h) = (cf.j, cf.k, cf.h);
    let mut d = h * h - j * k;
    if d < 0.0 {
        if d >= -1e-10 * (h * h + (j * k).abs()) {
            d = 0.0;
        } else {
            return Err(DeformError::DiscriminantNegative { t, discriminant: d });
        }
    }
    let sgn = if h >= 0.0 { 1.0 } else { -1.0 };
    let q = h + sgn * d.sqrt();
    if q == 0.0 {
        // H = 0 and JK = 0: a double root at zero or a vanishing K
        let other = if k == 0.0 { f64::INFINITY } else { 0.0 };
        return Ok((0.0, other));
    }
    let near = j / q;
    let far = q / k;
    Ok(if sgn > 0.0 { (far, near) } else { (near, far) })
}

/// `x̄` of the offset by `λ`: `x (1 + λ cos φ / ξ)`.
fn offset_radial(p: &AxisPoint, lambda: f64) -> f64 {
    p.r * (1.0 + lambda * p.cr / p.xi)
}

/// `(x1, x2, x3)` for the offset by `λ`.
pub fn offset_profile(p: &AxisPoint, c: f64, lambda: f64) -> [f64; 3] {
    [
        offset_radial(p, lambda),
        -c * lambda * p.sr / p.xi,
        p.h + lambda * p.r * p.sr / p.xi,
    ]
}

fn select_focal(p: &AxisPoint, c: f64, branch: FocalBranch) -> Result<f64, DeformError> {
    let cf = curvature_at(p, c);
    let (plus, minus) = focal_roots_signed(&cf, p.t)?;
    let lambda = match branch {
        FocalBranch::Plus => plus,
        FocalBranch::Minus => minus,
        FocalBranch::Auto | FocalBranch::Complement => {
            let ok = |l: f64, sigma: f64| {
                let xb = offset_radial(p, l);
                l.is_finite() && xb.abs() > AXIS_TOL && xb.signum() == -sigma
            };
            let smaller = if plus.abs() <= minus.abs() { plus } else { minus };
            let auto = match (ok(plus, 1.0), ok(minus, -1.0)) {
                (true, false) => plus,
                (false, true) => minus,
                _ => smaller,
            };
            if branch == FocalBranch::Auto {
                auto
            } else if auto == plus {
                minus
            } else {
                plus
            }
        }
    };
    if lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(DeformError::FocalInfinite { t: p.t })
    }
}

fn signed_focal(p: &AxisPoint, c: f64, sigma: f64) -> Result<f64, DeformError> {
    let branch = if sigma > 0.0 {
        FocalBranch::Plus
    } else {
        FocalBranch::Minus
    };
    select_focal(p, c, branch)
}

/// The space curve generating a parallel or focal helicoid, in axis
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceProfile {
    profile: LegendreCurve,
    axis: Axis,
    c: f64,
    pub provenance: Provenance,
}

impl SpaceProfile {
    fn new(h: &HelicoidalSurface, c: f64, provenance: Provenance) -> Self {
        SpaceProfile {
            profile: h.profile().clone(),
            axis: h.axis(),
            c,
            provenance,
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn slant(&self) -> f64 {
        self.c
    }

    pub fn domain(&self) -> (f64, f64) {
        self.profile.domain()
    }

    fn axis_point(&self, t: f64) -> Result<AxisPoint, DeformError> {
        Ok(self.axis.adapt(&self.profile.point(t)?, self.c))
    }

    /// The offset `λ` used at `t`.
    pub fn lambda(&self, t: f64) -> Result<f64, DeformError> {
        let p = self.axis_point(t)?;
        self.lambda_at(&p)
    }

    fn lambda_at(&self, p: &AxisPoint) -> Result<f64, DeformError> {
        match self.provenance {
            Provenance::Parallel { lambda } => Ok(lambda),
            Provenance::Focal { branch } => select_focal(p, self.c, branch),
            Provenance::FocalSigned { sigma } => signed_focal(p, self.c, sigma),
        }
    }

    /// `(x1, x2, x3)` at `t`.
    pub fn point(&self, t: f64) -> Result<[f64; 3], DeformError> {
        let p = self.axis_point(t)?;
        let lambda = self.lambda_at(&p)?;
        Ok(offset_profile(&p, self.c, lambda))
    }

    /// The point of the generated helicoid at `(t, θ)`, in world
    /// coordinates.
    pub fn surface_point(&self, t: f64, theta: f64) -> Result<Vec3, DeformError> {
        let [x1, x2, x3] = self.point(t)?;
        let (s, c) = theta.sin_cos();
        Ok(self
            .axis
            .to_world([x1 * c - x2 * s, x1 * s + x2 * c, self.c * theta + x3]))
    }
}

/// Which piece of the piecewise plane profile applies at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileCase {
    /// `x1 x2 > 0`.
    Positive,
    /// `x1 x2 < 0`.
    Negative,
    /// `x1 = 0 ≠ x2`.
    RadialZero,
    /// `x2 = 0 ≠ x1`.
    TangentialZero,
    /// `x1 = x2 = 0`: the point lies on the axis.
    OnAxis,
}

impl ProfileCase {
    fn of(x1: f64, x2: f64) -> ProfileCase {
        let scale = 1.0 + x1.abs() + x2.abs();
        let z1 = x1.abs() <= AXIS_TOL * scale;
        let z2 = x2.abs() <= AXIS_TOL * scale;
        match (z1, z2) {
            (true, true) => ProfileCase::OnAxis,
            (true, false) => ProfileCase::RadialZero,
            (false, true) => ProfileCase::TangentialZero,
            (false, false) if x1 * x2 > 0.0 => ProfileCase::Positive,
            _ => ProfileCase::Negative,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileCase::Positive => "x1x2>0",
            ProfileCase::Negative => "x1x2<0",
            ProfileCase::RadialZero => "x1=0",
            ProfileCase::TangentialZero => "x2=0",
            ProfileCase::OnAxis => "on-axis",
        }
    }
}

/// How a space curve is rotated into the profile plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneForm {
    /// Piecewise: `X = sgn(x2)√(x1²+x2²)`, `Z = x3 − c·atan(x2/x1)`, plus
    /// `cπ` when `x1x2 < 0`; `(x2, x3 − cπ/2)` when `x1 = 0`; `(x1, x3)`
    /// when `x2 = 0`. Defined everywhere.
    Piecewise,
    /// `(sgn(x1)√(x1²+x2²), x3 − c·atan(x2/x1))`; needs `x1 ≠ 0`.
    Radial,
    /// `(sgn(x2)√(x1²+x2²), x3 + c·atan(x1/x2) − cπ/2)`; needs `x2 ≠ 0`.
    Tangential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub t: f64,
    /// Coordinate orthogonal to the axis.
    pub x: f64,
    /// Coordinate along the axis.
    pub z: f64,
    pub case: ProfileCase,
}

impl PlanePoint {
    /// The point in the `(x, z)` coordinates of the original profile plane:
    /// `(X, Z)` around the z-axis, `(Z, X)` around the x-axis.
    pub fn in_profile_plane(&self, axis: Axis) -> [f64; 2] {
        match axis {
            Axis::Z => [self.x, self.z],
            Axis::X => [self.z, self.x],
        }
    }
}

/// A run of consecutive samples that use the same case. `shift` is the
/// constant added to `Z` in that case (`cπ` when `x1x2 < 0`, `−cπ/2` when
/// `x1 = 0`); pieces with different shifts are related by the isometry
/// `(x, z) ↦ (−x, z + cπ)` rather than joined continuously.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub case: ProfileCase,
    pub shift: f64,
    pub points: Vec<PlanePoint>,
}

impl Segment {
    pub fn t_range(&self) -> (f64, f64) {
        (self.points[0].t, self.points[self.points.len() - 1].t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cusp {
    pub t: f64,
    pub point: [f64; 2],
    /// Cosine of the angle between the unit tangents just before and after.
    pub reversal: f64,
}

/// A plane profile `(X, Z)` obtained from a space profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneProfile {
    pub space: SpaceProfile,
    pub form: PlaneForm,
}

impl PlaneProfile {
    pub fn domain(&self) -> (f64, f64) {
        self.space.domain()
    }

    pub fn axis(&self) -> Axis {
        self.space.axis
    }

    pub fn slant(&self) -> f64 {
        self.space.c
    }

    pub fn point(&self, t: f64) -> Result<PlanePoint, DeformError> {
        let [x1, x2, x3] = self.space.point(t)?;
        Ok(to_plane(x1, x2, x3, self.space.c, self.form, t))
    }

    /// `(X, Z)` as an array.
    pub fn xz(&self, t: f64) -> Result<[f64; 2], DeformError> {
        let p = self.point(t)?;
        Ok([p.x, p.z])
    }

    /// `n` uniform samples over the domain.
    pub fn sample(&self, n: usize) -> Result<Vec<PlanePoint>, DeformError> {
        let (a, b) = self.domain();
        linspace(a, b, n).into_iter().map(|t| self.point(t)).collect()
    }

    /// `n` uniform samples split into runs of equal case.
    pub fn segments(&self, n: usize) -> Result<Vec<Segment>, DeformError> {
        let c = self.space.c;
        let shift = |case: ProfileCase| match (self.form, case) {
            (PlaneForm::Piecewise, ProfileCase::Negative) => c * PI,
            (PlaneForm::Piecewise, ProfileCase::RadialZero) => -c * PI / 2.0,
            (PlaneForm::Tangential, _) => -c * PI / 2.0,
            _ => 0.0,
        };
        let mut out: Vec<Segment> = Vec::new();
        for p in self.sample(n)? {
            match out.last_mut() {
                Some(s) if s.case == p.case => s.points.push(p),
                _ => out.push(Segment {
                    case: p.case,
                    shift: shift(p.case),
                    points: vec![p],
                }),
            }
        }
        Ok(out)
    }

    /// Velocity `(X', Z')` by central differences.
    pub fn velocity(&self, t: f64) -> Result<[f64; 2], DeformError> {
        let h = 1e-6 * (1.0 + t.abs());
        let a = self.xz(t - h)?;
        let b = self.xz(t + h)?;
        Ok([(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h)])
    }

    pub fn speed(&self, t: f64) -> Result<f64, DeformError> {
        let v = self.velocity(t)?;
        Ok(v[0].hypot(v[1]))
    }

    /// Zeros of the speed: local minima of `|(X', Z')|` on an `n`-point grid,
    /// refined, that fall below `1e-6` times the median speed.
    pub fn singular_points(&self, n: usize) -> Vec<f64> {
        let f = |t: f64| self.xz(t).ok();
        speed_minima(&f, self.domain(), n, 1e-6)
    }

    /// Cusps on an `n`-point grid; see [`detect_cusps`].
    pub fn cusps(&self, n: usize) -> Vec<Cusp> {
        detect_cusps(|t| self.xz(t).ok(), self.domain(), n)
    }
}

fn to_plane(x1: f64, x2: f64, x3: f64, c: f64, form: PlaneForm, t: f64) -> PlanePoint {
    let case = ProfileCase::of(x1, x2);
    let rho = x1.hypot(x2);
    let (x, z) = match form {
        PlaneForm::Radial => (x1.signum() * rho, x3 - c * (x2 / x1).atan()),
        PlaneForm::Tangential => (x2.signum() * rho, x3 + c * (x1 / x2).atan() - c * PI / 2.0),
        PlaneForm::Piecewise => match case {
            ProfileCase::Positive => (x2.signum() * rho, x3 - c * (x2 / x1).atan()),
            ProfileCase::Negative => (x2.signum() * rho, x3 - c * (x2 / x1).atan() + c * PI),
            ProfileCase::RadialZero => (x2, x3 - c * PI / 2.0),
            ProfileCase::TangentialZero => (x1, x3),
            ProfileCase::OnAxis => (0.0, x3),
        },
    };
    PlanePoint { t, x, z, case }
}

/// Reduce a space profile to a plane profile with the piecewise rule, which
/// is defined at every `t`. Points with `x1 = x2 = 0` are reported with
/// [`ProfileCase::OnAxis`] and `X = 0`.
pub fn space_to_plane(p: SpaceProfile) -> PlaneProfile {
    PlaneProfile {
        space: p,
        form: PlaneForm::Piecewise,
    }
}

// First t on the domain where `f` vanishes: a root, or a grid sample with
// |f| below the tolerance.
fn first_zero(f: impl Fn(f64) -> f64, domain: (f64, f64)) -> Option<f64> {
    let cfg = RootConfig {
        bracket_samples: CHECK_SAMPLES,
        ..RootConfig::default()
    };
    // a sign change across a pole is not a zero
    let mut hits: Vec<f64> = find_roots(&f, domain, &cfg)
        .into_iter()
        .filter(|&t| f(t).abs() <= 1e-6)
        .collect();
    hits.extend(
        linspace(domain.0, domain.1, CHECK_SAMPLES)
            .into_iter()
            .filter(|&t| f(t).abs() <= AXIS_TOL),
    );
    hits.into_iter().min_by(|a, b| a.partial_cmp(b).unwrap())
}

fn rebuild(h: &HelicoidalSurface, c: f64) -> Result<HelicoidalSurface, DeformError> {
    if c == h.slant() {
        return Ok(h.clone());
    }
    Ok(HelicoidalSurface::build(h.profile().clone(), h.axis(), c)?)
}

/// The space profile of the parallel surface at distance `λ`, with the
/// slant of `h`.
pub fn parallel_space_profile(h: &HelicoidalSurface, lambda: f64) -> SpaceProfile {
    SpaceProfile::new(h, h.slant(), Provenance::Parallel { lambda })
}

/// The space profile of a focal surface of `h`. Fails at the first sample
/// where the discriminant is negative or the chosen root is infinite.
pub fn focal_space_profile(h: &HelicoidalSurface, branch: FocalBranch) -> Result<SpaceProfile, DeformError> {
    let sp = SpaceProfile::new(h, h.slant(), Provenance::Focal { branch });
    let (a, b) = sp.domain();
    for t in linspace(a, b, CHECK_SAMPLES) {
        sp.lambda(t)?;
    }
    Ok(sp)
}

/// The deformation `γ_{λ,c}` of the parallel curve: the radial-form plane
/// profile of the parallel surface at distance `λ` of the helicoid with
/// profile `h.profile()` and slant `c`.
pub fn gamma_lambda_c(h: &HelicoidalSurface, lambda: f64, c: f64) -> Result<PlaneProfile, DeformError> {
    let h = rebuild(h, c)?;
    let sp = parallel_space_profile(&h, lambda);
    if let Some(t) = first_zero(|t| sp.point(t).map(|p| p[0]).unwrap_or(f64::NAN), sp.domain()) {
        return Err(DeformError::X1Vanishes { t });
    }
    Ok(PlaneProfile {
        space: sp,
        form: PlaneForm::Radial,
    })
}

/// The deformation `δ_c` of the evolute: the radial-form plane profile of
/// the focal surface for `branch` at slant `c`.
pub fn delta_c(h: &HelicoidalSurface, branch: FocalBranch, c: f64) -> Result<PlaneProfile, DeformError> {
    let h = rebuild(h, c)?;
    let sp = focal_space_profile(&h, branch)?;
    if let Some(t) = first_zero(|t| sp.point(t).map(|p| p[0]).unwrap_or(f64::NAN), sp.domain()) {
        return Err(DeformError::XbarVanishes { t });
    }
    Ok(PlaneProfile {
        space: sp,
        form: PlaneForm::Radial,
    })
}

/// The second planar profile of a focal surface,
/// `(sgn(ȳ)√(x̄²+ȳ²), z̄ + c·atan(x̄/ȳ) − cπ/2)`.
///
/// With `allow_axis` the check `ȳ ≠ 0` is skipped and the piecewise form is
/// used instead, so that the degenerate `c = 0` curve on the axis (the
/// [`FocalBranch::Complement`] root) can be inspected.
pub fn delta_c_second(
    h: &HelicoidalSurface,
    branch: FocalBranch,
    c: f64,
    allow_axis: bool,
) -> Result<PlaneProfile, DeformError> {
    let h = rebuild(h, c)?;
    let sp = focal_space_profile(&h, branch)?;
    if allow_axis {
        return Ok(space_to_plane(sp));
    }
    if let Some(t) = first_zero(|t| sp.point(t).map(|p| p[1]).unwrap_or(f64::NAN), sp.domain()) {
        return Err(DeformError::YbarVanishes { t });
    }
    Ok(PlaneProfile {
        space: sp,
        form: PlaneForm::Tangential,
    })
}

/// `Φ(c, t)`: for `x(t) ≠ 0`, `γ_{λ,c}` is singular at `t` iff `Φ = 0`.
///
/// ```text
/// Φ = β [c²(c² − λ²) sin⁴φ + (2ξ² − x²)(x² + λ ξ cos φ)]
///     + λ x ℓ [(c² + x²) ξ + λ x² cos φ]
/// ```
pub fn phi(h: &HelicoidalSurface, lambda: f64, c: f64, t: f64) -> Result<f64, DeformError> {
    let p = h.axis().adapt(&h.profile().point(t)?, c);
    Ok(phi_at(&p, lambda, c))
}

pub fn phi_at(p: &AxisPoint, lambda: f64, c: f64) -> f64 {
    let (x, b, l, cp, sp, xi) = (p.r, p.beta, p.ell, p.cr, p.sr, p.xi);
    let c2 = c * c;
    let x2 = x * x;
    b * (c2 * (c2 - lambda * lambda) * sp.powi(4) + (2.0 * xi * xi - x2) * (x2 + lambda * xi * cp))
        + lambda * x * l * ((c2 + x2) * xi + lambda * x2 * cp)
}

/// Hypothesis checks of the parallel persistence theorem at a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelHypotheses {
    /// `β(t0) ≠ 0`.
    pub regular: bool,
    /// `β'ℓ − βℓ'` does not vanish at `t0`.
    pub no_vertex: bool,
    /// `x(t0) ≠ 0`.
    pub off_axis: bool,
    /// `x1(t0) ≠ 0` at the first grid value of `c`.
    pub not_umbilic: bool,
    pub beta: f64,
    pub vertex_function: f64,
    pub x: f64,
    pub x1: f64,
}

impl ParallelHypotheses {
    pub fn all_hold(&self) -> bool {
        self.regular && self.no_vertex && self.off_axis && self.not_umbilic
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.regular {
            v.push("profile is singular at t0");
        }
        if !self.no_vertex {
            v.push("t0 is a vertex of the profile");
        }
        if !self.off_axis {
            v.push("profile meets the axis at t0");
        }
        if !self.not_umbilic {
            v.push("x1(t0) = 0 (umbilic)");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelTrack {
    pub branch: Branch,
    /// `|Φ(c, t)|` at each branch point.
    pub residuals: Vec<f64>,
    pub hypotheses: ParallelHypotheses,
}

const HYP_TOL: f64 = 1e-8;

/// Follow the singular point of `γ_{λ,c}` that starts at `t0` for `c` along
/// `c_grid`, by continuation of the zero of `Φ(c, ·)`. Hypothesis
/// violations are reported, not fatal.
pub fn track_parallel_singularity(
    h: &HelicoidalSurface,
    lambda: f64,
    t0: f64,
    c_grid: &[f64],
    cfg: &RootConfig,
) -> Result<ParallelTrack, DeformError> {
    let c0 = c_grid.first().copied().ok_or(NumericsError::EmptyGrid)?;
    let profile = h.profile();
    let q = profile.point(t0)?;
    let p0 = h.axis().adapt(&q, c0);
    let v = profile.vertex_function().eval(t0)?;
    let vscale = 1.0 + (p0.beta * p0.ell).abs();
    let x1 = offset_radial(&p0, lambda);
    let hypotheses = ParallelHypotheses {
        regular: p0.beta.abs() > HYP_TOL,
        no_vertex: v.abs() > HYP_TOL * vscale,
        off_axis: p0.r.abs() > HYP_TOL,
        not_umbilic: x1.abs() > HYP_TOL,
        beta: p0.beta,
        vertex_function: v,
        x: p0.r,
        x1,
    };
    let axis = h.axis();
    let f = |c: f64, t: f64| match profile.point(t) {
        Ok(q) => phi_at(&axis.adapt(&q, c), lambda, c),
        Err(_) => f64::NAN,
    };
    let branch = continue_root(f, t0, c_grid, cfg)?;
    let residuals = branch.points.iter().map(|&(c, t)| f(c, t).abs()).collect();
    Ok(ParallelTrack {
        branch,
        residuals,
        hypotheses,
    })
}

/// Five-point central difference of `g` at `t` with step `h`.
fn five_point(g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (g(t - 2.0 * h) - 8.0 * g(t - h) + 8.0 * g(t + h) - g(t + 2.0 * h)) / (12.0 * h)
}

/// `dλ/dt` of the focal root `λ^σ` at slant `c`, by a five-point difference
/// whose step scales with the local size of `λ`.
pub fn focal_lambda_rate(h: &HelicoidalSurface, sigma: f64, c: f64, t: f64) -> Result<f64, DeformError> {
    let axis = h.axis();
    let profile = h.profile();
    let lam = |s: f64| -> Result<f64, DeformError> { signed_focal(&axis.adapt(&profile.point(s)?, c), c, sigma) };
    let l0 = lam(t)?;
    let step = 1e-3 * (1.0 + t.abs()) / (1.0 + l0.abs()).sqrt();
    for k in [-2.0, -1.0, 1.0, 2.0] {
        lam(t + k * step)?;
    }
    let g = |s: f64| lam(s).unwrap_or(f64::NAN);
    Ok(five_point(&g, t, step))
}

/// Seed data and hypothesis checks of the focal persistence theorem.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalHypotheses {
    /// The vertex of the profile the seed was snapped to.
    pub t0: f64,
    pub ordinary_vertex: bool,
    pub x: f64,
    pub xbar: f64,
    /// Sign `σ = −sgn x̄(t0)` of the tracked root `λ^σ`.
    pub sigma: f64,
    /// `K_F(t0)` at the first grid value of `c`. The theorem asks for
    /// `K_F ≠ 0` at `c = 0`; tracking only needs the chosen root finite.
    pub k_f: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl FocalHypotheses {
    /// `Δ₁` and `Δ₂` do not vanish together at the seed.
    pub fn deltas_separate(&self) -> bool {
        self.delta1.abs() > HYP_TOL || self.delta2.abs() > HYP_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalTrack {
    pub branch: Branch,
    /// `|dλ_c/dt|` at each branch point.
    pub residuals: Vec<f64>,
    pub hypotheses: FocalHypotheses,
}

/// `Δ₁ = λξ² + x²(−λ sin²φ + ξ cos φ)` and
/// `Δ₂ = sin φ (c²ξ + x²(λ cos φ + ξ))`.
pub fn deltas(p: &AxisPoint, c: f64, lambda: f64) -> (f64, f64) {
    let (x, cp, sp, xi) = (p.r, p.cr, p.sr, p.xi);
    let x2 = x * x;
    (
        lambda * xi * xi + x2 * (-lambda * sp * sp + xi * cp),
        sp * (c * c * xi + x2 * (lambda * cp + xi)),
    )
}

/// Follow the singular point of `δ_c` born at the ordinary vertex `t0`, by
/// continuation of the zero of `t ↦ dλ_c/dt` where `λ_c = λ_c^σ` with the
/// sign `σ = −sgn x̄(t0)` fixed at the seed.
pub fn track_focal_singularity(
    h: &HelicoidalSurface,
    t0: f64,
    c_grid: &[f64],
    cfg: &RootConfig,
) -> Result<FocalTrack, DeformError> {
    let c0 = c_grid.first().copied().ok_or(NumericsError::EmptyGrid)?;
    let profile = h.profile();
    let vertex = match profile.vertices()? {
        Vertices::DegenerateEverywhere => {
            return Err(DeformError::Hypothesis(
                "every point of the profile is a vertex; no ordinary vertex".into(),
            ))
        }
        Vertices::Isolated(vs) => vs
            .into_iter()
            .filter(|v| (v.t - t0).abs() <= 1e-4 * (1.0 + t0.abs()))
            .min_by(|a, b| (a.t - t0).abs().partial_cmp(&(b.t - t0).abs()).unwrap()),
    };
    let Some(vertex) = vertex else {
        return Err(DeformError::Hypothesis(format!(
            "t0 = {t0} is not a vertex of the profile"
        )));
    };
    if !vertex.ordinary {
        return Err(DeformError::Hypothesis(format!(
            "the vertex at t = {} is not ordinary",
            vertex.t
        )));
    }
    let t0 = vertex.t;
    let axis = h.axis();
    let p = axis.adapt(&profile.point(t0)?, c0);
    if p.r.abs() <= HYP_TOL {
        return Err(DeformError::Hypothesis(format!(
            "the profile meets the axis at t0 = {t0}"
        )));
    }
    let auto = select_focal(&p, c0, FocalBranch::Auto)?;
    let xbar = offset_radial(&p, auto);
    if xbar.abs() <= HYP_TOL {
        return Err(DeformError::Hypothesis(format!(
            "the focal profile meets the axis at t0 = {t0} (umbilic)"
        )));
    }
    let sigma = -xbar.signum();
    let lambda = signed_focal(&p, c0, sigma)?;
    let (delta1, delta2) = deltas(&p, c0, lambda);
    let hypotheses = FocalHypotheses {
        t0,
        ordinary_vertex: true,
        x: p.r,
        xbar,
        sigma,
        k_f: curvature_at(&p, c0).k,
        delta1,
        delta2,
    };
    let f = |c: f64, t: f64| focal_lambda_rate(h, sigma, c, t).unwrap_or(f64::NAN);
    let branch = continue_root(f, t0, c_grid, cfg)?;
    let residuals = branch.points.iter().map(|&(c, t)| f(c, t).abs()).collect();
    Ok(FocalTrack {
        branch,
        residuals,
        hypotheses,
    })
}

// Golden-section minimisation of `g` on [a, b].
fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..120 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

fn velocity_of(f: &dyn Fn(f64) -> Option<[f64; 2]>, t: f64, h: f64) -> Option<[f64; 2]> {
    let a = f(t - h)?;
    let b = f(t + h)?;
    Some([(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h)])
}

fn median(mut v: Vec<f64>) -> f64 {
    v.retain(|x| x.is_finite());
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn speed_minima(f: &dyn Fn(f64) -> Option<[f64; 2]>, domain: (f64, f64), n: usize, rel: f64) -> Vec<f64> {
    let ts = linspace(domain.0, domain.1, n.max(3));
    let dt = ts[1] - ts[0];
    let h = 1e-6 * (1.0 + domain.0.abs().max(domain.1.abs()));
    let speed = |t: f64| velocity_of(f, t, h).map_or(f64::NAN, |v| v[0].hypot(v[1]));
    let s: Vec<f64> = ts.iter().map(|&t| speed(t)).collect();
    let med = median(s.clone());
    let mut out: Vec<f64> = Vec::new();
    for i in 1..ts.len() - 1 {
        if !(s[i] <= s[i - 1] && s[i] <= s[i + 1]) {
            continue;
        }
        let t = golden_min(&|t| speed(t), ts[i - 1], ts[i + 1]);
        if speed(t) <= rel * med && out.last().map_or(true, |&l| t - l > dt) {
            out.push(t);
        }
    }
    out
}

/// Cusps of a plane curve: zeros of the speed across which the unit
/// tangent reverses (cosine between the tangents `2Δt` before and after
/// below −0.9). Speed minima are located on an `n`-point grid and refined
/// by golden-section search; samples where `f` is undefined are skipped.
pub fn detect_cusps(f: impl Fn(f64) -> Option<[f64; 2]>, domain: (f64, f64), n: usize) -> Vec<Cusp> {
    let ts = linspace(domain.0, domain.1, n.max(3));
    let dt = ts[1] - ts[0];
    let h = 1e-6 * (1.0 + domain.0.abs().max(domain.1.abs()));
    let f = &f as &dyn Fn(f64) -> Option<[f64; 2]>;
    let mut out = Vec::new();
    for t in speed_minima(f, domain, n, 1e-3) {
        let (Some(a), Some(b), Some(p)) = (velocity_of(f, t - 2.0 * dt, h), velocity_of(f, t + 2.0 * dt, h), f(t))
        else {
            continue;
        };
        let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
        let cos = (a[0] * b[0] + a[1] * b[1]) / (na * nb);
        if cos < -0.9 {
            out.push(Cusp {
                t,
                point: p,
                reversal: cos,
            });
        }
    }
    out
}
