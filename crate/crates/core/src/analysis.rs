//! Gaussian and mean curvature of a helicoidal surface near a singular
//! point of its profile.
//!
//! Write `β = t^m β̄` with `β̄(t0) ≠ 0`. On the regular part
//!
//! ```text
//! K = −c² sin⁴φ / ξ⁴ + x³ ℓ cos φ / (β ξ⁴)
//! H = −[β (ξ² + c² sin²φ) cos φ + x ℓ (c² + x²)] / (2 β ξ³)
//! ```
//!
//! so `K` is bounded iff `x³ ℓ cos φ = O(t^m)` and `H` iff
//! `x ℓ (c² + x²) = O(t^m)`. Since `x' = −β sin φ` and `φ' = ℓ`, these reduce
//! to conditions on `m`, `x(t0)`, `cos φ(t0)`, `ℓ(t0)` and the order of
//! `φ − φ(t0)`, which [`classify_k`] and [`classify_h`] evaluate as a
//! decision tree. [`boundedness_probe`] measures the same thing numerically.

use std::fmt;

use thiserror::Error;

use crate::expr::ExprError;
use crate::helicoid::{Axis, HelicoidalSurface};
use crate::legendre::ZERO_TOL;
use crate::numerics::{find_roots, vanishing_order, NumericsError, RootConfig};

/// Largest order of vanishing examined.
pub const ORDER_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("t0 = {t0} is not a singular point: β(t0) = {beta:e}")]
    NotSingular { t0: f64, beta: f64 },
    #[error("the singular point t0 = {t0} is not isolated (another zero of β at t = {other})")]
    NotIsolated { t0: f64, other: f64 },
    #[error("β vanishes to order greater than {ORDER_CAP} at t0 = {t0}")]
    OrderExceedsCap { t0: f64 },
    #[error("rule {row} needs the order of φ − φ(t0), which could not be computed")]
    NeedsPhiOrder { row: &'static str },
}

/// Order of vanishing of `φ − φ(t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiOrder {
    Exact(usize),
    /// All derivatives up to [`ORDER_CAP`] vanish.
    AtLeast(usize),
}

impl PhiOrder {
    /// `φ − φ(t0) = O(t^k)`.
    pub fn is_at_least(self, k: usize) -> bool {
        match self {
            PhiOrder::Exact(n) => n >= k,
            PhiOrder::AtLeast(n) => n >= k,
        }
    }
}

impl fmt::Display for PhiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiOrder::Exact(n) => write!(f, "{n}"),
            PhiOrder::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// Local data at a singular point, in axis coordinates: `x0` is the
/// distance coordinate and `cos_phi0` the matching normal component (for
/// the x-axis these are `z(t0)` and `sin φ(t0)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPointProfile {
    pub t0: f64,
    /// Order of `β` at `t0`.
    pub m: usize,
    /// `ℓ(t0) ≠ 0`.
    pub is_front: bool,
    pub x0: f64,
    pub cos_phi0: f64,
    pub phi_order: Option<PhiOrder>,
    /// `m > 1`.
    pub degenerate: bool,
}

const ISOLATION_WINDOW: f64 = 0.05;

/// Order and local data of the isolated zero of `β` at `t0`.
pub fn profile_at_singularity(h: &HelicoidalSurface, t0: f64) -> Result<SingularPointProfile, AnalysisError> {
    let profile = h.profile();
    let beta = profile.beta_expr();
    let m = match vanishing_order(beta, t0, ORDER_CAP)? {
        None => return Err(AnalysisError::OrderExceedsCap { t0 }),
        Some(0) => {
            return Err(AnalysisError::NotSingular {
                t0,
                beta: beta.eval(t0)?,
            })
        }
        Some(m) => m,
    };
    let (d0, d1) = profile.domain();
    let w = ISOLATION_WINDOW * (d1 - d0);
    let window = ((t0 - w).max(d0), (t0 + w).min(d1));
    let f = |t: f64| beta.eval(t).unwrap_or(f64::NAN);
    let tol = 1e-6 * (1.0 + t0.abs());
    if let Some(&other) = find_roots(f, window, &RootConfig::default())
        .iter()
        .find(|&&r| (r - t0).abs() > tol)
    {
        return Err(AnalysisError::NotIsolated { t0, other });
    }
    let q = profile.point(t0)?;
    let p = h.axis().adapt(&q, h.slant());
    // sin(φ − φ0) has the same order as φ − φ0
    let (a0, b0) = (q.cos_phi, q.sin_phi);
    let rot = profile.sin_phi_expr().clone() * crate::expr::Expr::num(a0)
        - profile.cos_phi_expr().clone() * crate::expr::Expr::num(b0);
    let phi_order = match vanishing_order(&rot, t0, ORDER_CAP) {
        Ok(Some(n)) => Some(PhiOrder::Exact(n)),
        Ok(None) => Some(PhiOrder::AtLeast(ORDER_CAP + 1)),
        Err(_) => None,
    };
    Ok(SingularPointProfile {
        t0,
        m,
        is_front: p.ell.abs() > ZERO_TOL,
        x0: p.r,
        cos_phi0: p.cr,
        phi_order,
        degenerate: m > 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub bounded: bool,
    /// Tag of the table row that decided.
    pub row: &'static str,
    pub rule: String,
}

fn is_zero(v: f64) -> bool {
    v.abs() <= 1e-9
}

fn need(p: &SingularPointProfile, row: &'static str) -> Result<PhiOrder, AnalysisError> {
    p.phi_order.ok_or(AnalysisError::NeedsPhiOrder { row })
}

/// Boundedness of the Gaussian curvature at a singular point.
///
/// For `m > 1`, non-front, `x(t0) ≠ 0`, `cos φ(t0) = 0` the required order
/// of `φ − φ(t0)` is `⌈(m+1)/2⌉`: then `ℓ cos φ` has order `2n − 1 ≥ m`.
pub fn classify_k(p: &SingularPointProfile) -> Result<Verdict, AnalysisError> {
    let x0 = is_zero(p.x0);
    let c0 = is_zero(p.cos_phi0);
    let v = |bounded: bool, row: &'static str, rule: String| Ok(Verdict { bounded, row, rule });
    match (p.m == 1, p.is_front) {
        (true, true) => v(
            x0 || c0,
            "K:m=1:front",
            format!(
                "m = 1, front: bounded iff x(t0) cos φ(t0) = 0 (x = {:e}, cos φ = {:e})",
                p.x0, p.cos_phi0
            ),
        ),
        (true, false) => v(true, "K:m=1:non-front", "m = 1, non-front: bounded".into()),
        (false, true) => v(
            x0,
            "K:m>1:front",
            format!("m = {}, front: bounded iff x(t0) = 0 (x = {:e})", p.m, p.x0),
        ),
        (false, false) if x0 => v(
            true,
            "K:m>1:non-front:x=0",
            format!("m = {}, non-front, x(t0) = 0: bounded", p.m),
        ),
        (false, false) if !c0 => {
            let row = "K:m>1:non-front:x.cos!=0";
            let n = need(p, row)?;
            v(
                n.is_at_least(p.m + 1),
                row,
                format!(
                    "m = {}, non-front, x cos φ ≠ 0: bounded iff φ − φ(t0) = O(t^{}) (order {n})",
                    p.m,
                    p.m + 1
                ),
            )
        }
        (false, false) => {
            let row = "K:m>1:non-front:cos=0";
            let n = need(p, row)?;
            let k = (p.m + 2) / 2;
            v(
                n.is_at_least(k),
                row,
                format!(
                    "m = {}, non-front, x ≠ 0, cos φ = 0: bounded iff φ − φ(t0) = O(t^{k}) (order {n})",
                    p.m
                ),
            )
        }
    }
}

/// Boundedness of the mean curvature at a singular point.
pub fn classify_h(p: &SingularPointProfile) -> Result<Verdict, AnalysisError> {
    let x0 = is_zero(p.x0);
    if p.is_front {
        let row = if p.m == 1 { "H:m=1:front" } else { "H:m>1:front" };
        return Ok(Verdict {
            bounded: x0,
            row,
            rule: format!("front: bounded iff x(t0) = 0 (x = {:e})", p.x0),
        });
    }
    if x0 {
        return Ok(Verdict {
            bounded: true,
            row: "H:non-front:x=0",
            rule: "non-front, x(t0) = 0: bounded".into(),
        });
    }
    let row = "H:non-front:x!=0";
    let n = need(p, row)?;
    Ok(Verdict {
        bounded: n.is_at_least(p.m + 1),
        row,
        rule: format!(
            "non-front, x(t0) ≠ 0: bounded iff φ − φ(t0) = O(t^{}) (order {n})",
            p.m + 1
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curvature {
    K,
    H,
}

impl Curvature {
    pub fn name(self) -> &'static str {
        match self {
            Curvature::K => "K",
            Curvature::H => "H",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeVerdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn name(self) -> &'static str {
        match self {
            ProbeVerdict::Bounded => "bounded",
            ProbeVerdict::Unbounded => "unbounded",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSample {
    pub offset: f64,
    /// `|K|` or `|H|` at `t0 − offset`.
    pub left: f64,
    /// `|K|` or `|H|` at `t0 + offset`.
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    /// Least-squares slope of `log max(left, right)` against `log offset`.
    pub slope: f64,
    pub samples: Vec<ProbeSample>,
}

const PROBE_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=8;

/// Evaluate `|K|` or `|H|` at `t0 ± 10^{-k}`, `k = 2..8`, and read the
/// growth rate off a log-log fit. A slope below −0.1 with values growing by
/// more than a factor 10 means unbounded; a slope above −0.1 with no growth
/// means bounded; anything else is inconclusive.
pub fn boundedness_probe(h: &HelicoidalSurface, t0: f64, which: Curvature) -> ProbeReport {
    let value = |t: f64| -> f64 {
        match h.curvature_closed_form(t) {
            Ok(cf) => match which {
                Curvature::K => (cf.k / cf.j).abs(),
                Curvature::H => (cf.h / cf.j).abs(),
            },
            Err(_) => f64::NAN,
        }
    };
    let samples: Vec<ProbeSample> = PROBE_EXPONENTS
        .map(|k| {
            let d = 10f64.powi(-k);
            ProbeSample {
                offset: d,
                left: value(t0 - d),
                right: value(t0 + d),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.offset.ln(), s.left.max(s.right))).collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return ProbeReport {
            verdict: ProbeVerdict::Inconclusive,
            slope: f64::NAN,
            samples,
        };
    }
    let floor = 1e-300;
    let ys: Vec<f64> = pts.iter().map(|p| p.1.max(floor).ln()).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = pts.iter().zip(&ys).map(|(p, y)| (p.0 - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let first = pts[0].1;
    let last = pts[pts.len() - 1].1;
    let growing = last > 10.0 * first.max(floor);
    let tail_max = pts[pts.len() - 3..].iter().map(|p| p.1).fold(0.0, f64::max);
    let head_max = pts[..3].iter().map(|p| p.1).fold(0.0, f64::max);
    let verdict = if slope < -0.1 && growing {
        ProbeVerdict::Unbounded
    } else if slope >= -0.1 && tail_max <= 2.0 * head_max + 1e-12 {
        ProbeVerdict::Bounded
    } else {
        ProbeVerdict::Inconclusive
    };
    ProbeReport {
        verdict,
        slope,
        samples,
    }
}

/// Signed area density `Λ = −ξβ` restricted to `t`, and whether the
/// singular point `t0` is non-degenerate in the sense `Λ_t(t0) ≠ 0`.
pub fn nondegenerate_by_area_density(h: &HelicoidalSurface, t0: f64) -> Result<bool, AnalysisError> {
    let (_, lt) = h.signed_area_density(t0)?;
    Ok(lt.abs() > 1e-9)
}

/// Name of the axis coordinate playing the role of `x` in the tables.
pub fn radial_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Z => "x",
        Axis::X => "z",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(m: usize, front: bool, x0: f64, c0: f64, n: usize) -> SingularPointProfile {
        SingularPointProfile {
            t0: 0.0,
            m,
            is_front: front,
            x0,
            cos_phi0: c0,
            phi_order: Some(PhiOrder::Exact(n)),
            degenerate: m > 1,
        }
    }

    #[test]
    fn gaussian_table_rows() {
        assert!(classify_k(&sp(1, true, 1.0, 0.0, 1)).unwrap().bounded);
        assert!(classify_k(&sp(1, true, 0.0, 0.5, 1)).unwrap().bounded);
        assert!(!classify_k(&sp(1, true, 1.0, 0.5, 1)).unwrap().bounded);
        assert!(classify_k(&sp(1, false, 1.0, 0.5, 2)).unwrap().bounded);
        assert!(!classify_k(&sp(3, true, 1.0, 0.0, 1)).unwrap().bounded);
        assert!(classify_k(&sp(3, true, 0.0, 1.0, 1)).unwrap().bounded);
        assert!(classify_k(&sp(3, false, 1.0, 1.0, 4)).unwrap().bounded);
        assert!(!classify_k(&sp(3, false, 1.0, 1.0, 3)).unwrap().bounded);
        assert!(classify_k(&sp(3, false, 1.0, 0.0, 2)).unwrap().bounded);
        assert!(!classify_k(&sp(2, false, 1.0, 0.0, 1)).unwrap().bounded);
        assert!(classify_k(&sp(2, false, 1.0, 0.0, 2)).unwrap().bounded);
    }

    #[test]
    fn mean_table_rows() {
        assert!(!classify_h(&sp(1, true, 1.0, 0.0, 1)).unwrap().bounded);
        assert!(classify_h(&sp(2, true, 0.0, 0.0, 1)).unwrap().bounded);
        assert!(classify_h(&sp(2, false, 0.0, 0.0, 2)).unwrap().bounded);
        assert!(classify_h(&sp(2, false, 1.0, 0.0, 3)).unwrap().bounded);
        assert!(!classify_h(&sp(2, false, 1.0, 0.0, 2)).unwrap().bounded);
    }

    #[test]
    fn missing_phi_order_is_an_error() {
        let mut p = sp(2, false, 1.0, 0.5, 2);
        p.phi_order = None;
        assert_eq!(
            classify_h(&p),
            Err(AnalysisError::NeedsPhiOrder {
                row: "H:non-front:x!=0"
            })
        );
        assert!(classify_h(&sp(1, true, 1.0, 0.0, 1)).is_ok());
    }
}
