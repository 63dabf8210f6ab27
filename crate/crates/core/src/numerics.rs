//! Finite differences, bracketed root finding, parameter continuation,
//! angle unwrapping and order of vanishing.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::expr::{Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid root configuration: {0}")]
    InvalidConfig(String),
    #[error("seed is not a root: |F| = {residual:e} exceeds {tol:e}")]
    SeedNotRoot { residual: f64, tol: f64 },
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("angle grid too coarse: jump of {jump} rad between samples {index} and {}", index + 1)]
    GridTooCoarse { index: usize, jump: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Accept `t` once `|f(t)|` falls below this.
    pub abs_tol: f64,
    /// Accept `t` once the Newton or bisection step falls below this.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Number of scan points used to bracket sign changes.
    pub bracket_samples: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            abs_tol: 1e-12,
            step_tol: 1e-10,
            max_iter: 100,
            bracket_samples: 512,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.step_tol > 0.0) {
            return Err(NumericsError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(NumericsError::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.bracket_samples < 2 {
            return Err(NumericsError::InvalidConfig(
                "bracket_samples must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

fn central(f: &dyn Fn(f64) -> f64, t: f64, order: u32, h: f64) -> f64 {
    match order {
        1 => (f(t + h) - f(t - h)) / (2.0 * h),
        2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
        _ => (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h),
    }
}

/// Central difference of the given order with one Richardson step from `h`
/// to `h/2`.
pub fn derivative_with_step(f: impl Fn(f64) -> f64, t: f64, order: u32, h: f64) -> f64 {
    let d1 = central(&f, t, order, h);
    let d2 = central(&f, t, order, h / 2.0);
    (4.0 * d2 - d1) / 3.0
}

/// Derivative of order 1, 2 or 3 by Richardson-extrapolated central
/// differences.
pub fn derivative(f: impl Fn(f64) -> f64, t: f64, order: u32) -> f64 {
    assert!((1..=3).contains(&order), "derivative order must be 1, 2 or 3");
    let base = match order {
        1 => 1e-5,
        2 => 1e-3,
        _ => 1e-2,
    };
    derivative_with_step(f, t, order, base * (1.0 + t.abs()))
}

/// Safeguarded Newton iteration on a bracket `[lo, hi]` with `f(lo)` and
/// `f(hi)` of opposite signs.
fn solve_bracket(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, cfg: &RootConfig) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    // a few bisections first, then Newton inside the bracket
    let mut x = 0.5 * (lo + hi);
    for iter in 0..cfg.max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if fx.abs() <= cfg.abs_tol && (hi - lo).abs() <= 1e3 * cfg.step_tol {
            return x;
        }
        let mid = 0.5 * (lo + hi);
        let next = if iter < 4 {
            mid
        } else {
            let h = 1e-7 * (1.0 + x.abs()).min((hi - lo).abs().max(1e-9));
            let d = (f(x + h) - f(x - h)) / (2.0 * h);
            let step = fx / d;
            let cand = x - step;
            if d.is_finite() && d != 0.0 && cand.is_finite() && cand > lo.min(hi) && cand < lo.max(hi) {
                if step.abs() <= cfg.step_tol {
                    return polish(f, cand, lo, hi);
                }
                cand
            } else {
                mid
            }
        };
        if (hi - lo).abs() <= cfg.step_tol * 1e-3 || next == x {
            return next;
        }
        x = next;
    }
    x
}

// One last Newton step restricted to the bracket; keeps whichever point has
// the smaller residual.
fn polish(f: &dyn Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
    let fx = f(x);
    let h = 1e-7 * (1.0 + x.abs());
    let d = (f(x + h) - f(x - h)) / (2.0 * h);
    if d == 0.0 || !d.is_finite() {
        return x;
    }
    let y = x - fx / d;
    if y > lo.min(hi) && y < lo.max(hi) && f(y).abs() < fx.abs() {
        y
    } else {
        x
    }
}

// Golden-section minimisation of |f| on [a, b].
fn min_abs(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c).abs();
    let mut fd = f(d).abs();
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d).abs();
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

/// All roots of `f` on `[a, b]`, sorted and deduplicated.
///
/// Sign changes on a uniform scan are refined by bisection and Newton.
/// Touching zeros (even multiplicity) are picked up from local minima of
/// `|f|` that fall below `cfg.abs_tol`.
pub fn find_roots(f: impl Fn(f64) -> f64, interval: (f64, f64), cfg: &RootConfig) -> Vec<f64> {
    let (a, b) = interval;
    let n = cfg.bracket_samples.max(2);
    let ts: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let f = &f as &dyn Fn(f64) -> f64;
    let mut roots = Vec::new();
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(ts[i]);
            continue;
        }
        if i + 1 < n
            && fs[i + 1] != 0.0
            && fs[i].is_finite()
            && fs[i + 1].is_finite()
            && fs[i].signum() != fs[i + 1].signum()
        {
            roots.push(solve_bracket(f, ts[i], ts[i + 1], cfg));
        }
    }
    for i in 1..n - 1 {
        let (l, m, r) = (fs[i - 1].abs(), fs[i].abs(), fs[i + 1].abs());
        if !(m <= l && m <= r) || fs[i] == 0.0 {
            continue;
        }
        if fs[i - 1].signum() != fs[i].signum() || fs[i + 1].signum() != fs[i].signum() {
            continue;
        }
        let t = min_abs(f, ts[i - 1], ts[i + 1]);
        if f(t).abs() <= cfg.abs_tol {
            roots.push(t);
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for r in roots {
        match out.last() {
            Some(&last) if (r - last).abs() < 10.0 * cfg.step_tol => {}
            _ => out.push(r),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContinuationStatus {
    Complete,
    /// Newton and the local bracket search both failed at `c`; the branch
    /// probably turns back there.
    FoldDetected {
        c: f64,
        last: (f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub points: Vec<(f64, f64)>,
    pub status: ContinuationStatus,
    /// `∂F/∂t` at the seed; close to zero means the implicit function
    /// theorem does not apply there.
    pub seed_slope: f64,
}

impl Branch {
    pub fn is_complete(&self) -> bool {
        self.status == ContinuationStatus::Complete
    }
}

fn newton_local(g: &dyn Fn(f64) -> f64, mut t: f64, cfg: &RootConfig, max_move: f64) -> Option<f64> {
    let start = t;
    for _ in 0..cfg.max_iter {
        let gt = g(t);
        if !gt.is_finite() {
            return None;
        }
        let h = 1e-6 * (1.0 + t.abs());
        let d = (g(t + h) - g(t - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let step = gt / d;
        t -= step;
        if (t - start).abs() > max_move {
            return None;
        }
        if step.abs() <= cfg.step_tol {
            return Some(t);
        }
    }
    None
}

/// Follow a root of `F(c, ·)` along `c_grid`, starting from `t0` at
/// `c_grid[0]`.
///
/// Each step warm-starts Newton from a secant predictor. When Newton fails
/// or jumps, the nearest sign change within a window around the previous
/// point is bisected instead; when that fails too the branch stops with
/// [`ContinuationStatus::FoldDetected`].
pub fn continue_root(
    f: impl Fn(f64, f64) -> f64,
    t0: f64,
    c_grid: &[f64],
    cfg: &RootConfig,
) -> Result<Branch, NumericsError> {
    cfg.validate()?;
    let Some(&c0) = c_grid.first() else {
        return Err(NumericsError::EmptyGrid);
    };
    let g0 = |t: f64| f(c0, t);
    let slope = derivative(g0, t0, 1);
    let residual = f(c0, t0).abs();
    let tol = 100.0 * cfg.abs_tol * (1.0 + slope.abs() * (1.0 + t0.abs()));
    if !(residual <= tol) {
        return Err(NumericsError::SeedNotRoot { residual, tol });
    }
    // polish the seed without letting it wander
    let t_seed = newton_local(&g0, t0, cfg, 1e-6 * (1.0 + t0.abs())).unwrap_or(t0);
    let t_seed = if f(c0, t_seed).abs() <= residual { t_seed } else { t0 };
    let mut points = vec![(c0, t_seed)];
    for k in 1..c_grid.len() {
        let c = c_grid[k];
        let (c_prev, t_prev) = points[points.len() - 1];
        // tangent predictor from the implicit function theorem
        let h = 1e-6 * (1.0 + t_prev.abs());
        let hc = 1e-6 * (1.0 + c_prev.abs());
        let ft = (f(c_prev, t_prev + h) - f(c_prev, t_prev - h)) / (2.0 * h);
        let fc = (f(c_prev + hc, t_prev) - f(c_prev - hc, t_prev)) / (2.0 * hc);
        let dtdc = if ft != 0.0 && (fc / ft).is_finite() {
            -fc / ft
        } else {
            0.0
        };
        let predictor = t_prev + dtdc * (c - c_prev);
        let g = |t: f64| f(c, t);
        let window = 0.1 * (1.0 + t_prev.abs()) + 2.0 * (predictor - t_prev).abs();
        let mut next = newton_local(&g, predictor, cfg, window);
        if next.map_or(true, |t| (t - predictor).abs() > window) {
            next = bracket_near(&g, predictor, window, cfg);
        }
        match next {
            Some(t) => points.push((c, t)),
            None => {
                return Ok(Branch {
                    status: ContinuationStatus::FoldDetected {
                        c,
                        last: (c_prev, t_prev),
                    },
                    points,
                    seed_slope: slope,
                })
            }
        }
    }
    Ok(Branch {
        points,
        status: ContinuationStatus::Complete,
        seed_slope: slope,
    })
}

// Nearest sign change to `t` within `t ± w`, solved on its bracket.
fn bracket_near(g: &dyn Fn(f64) -> f64, t: f64, w: f64, cfg: &RootConfig) -> Option<f64> {
    let n = 64;
    let step = w / n as f64;
    let mut best: Option<f64> = None;
    for side in [1.0, -1.0] {
        let mut a = t;
        let mut fa = g(a);
        if fa == 0.0 {
            return Some(a);
        }
        for i in 1..=n {
            let b = t + side * step * i as f64;
            let fb = g(b);
            if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
                let r = solve_bracket(g, a.min(b), a.max(b), cfg);
                if best.map_or(true, |x| (r - t).abs() < (x - t).abs()) {
                    best = Some(r);
                }
                break;
            }
            a = b;
            fa = fb;
        }
    }
    best
}

/// A continuous angle function sampled on a grid, with cubic interpolation
/// between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnwrappedAngle {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl UnwrappedAngle {
    /// Cubic Lagrange interpolation through the four nearest nodes.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.ts.len();
        if n == 1 {
            return self.values[0];
        }
        let i = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let width = 4.min(n);
        let start = i.saturating_sub(2).min(n - width);
        let idx = start..start + width;
        let mut acc = 0.0;
        for j in idx.clone() {
            let mut w = 1.0;
            for k in idx.clone() {
                if k != j {
                    w *= (t - self.ts[k]) / (self.ts[j] - self.ts[k]);
                }
            }
            acc += w * self.values[j];
        }
        acc
    }
}

/// Lift unit vectors to a continuous angle: each raw `atan2` is shifted by a
/// multiple of 2π so consecutive differences lie in (−π, π].
pub fn unwrap_angle(samples: &[(f64, [f64; 2])]) -> Result<UnwrappedAngle, NumericsError> {
    let mut ts = Vec::with_capacity(samples.len());
    let mut values: Vec<f64> = Vec::with_capacity(samples.len());
    for (i, (t, v)) in samples.iter().enumerate() {
        let raw = v[1].atan2(v[0]);
        let value = match values.last() {
            None => raw,
            Some(&prev) => {
                let mut d = (raw - prev).rem_euclid(TAU);
                if d > PI {
                    d -= TAU;
                }
                if d.abs() >= FRAC_PI_2 {
                    return Err(NumericsError::GridTooCoarse { index: i - 1, jump: d });
                }
                // snap to the representative of `raw`, not `prev + d`, so the
                // 2π multiple stays exact
                raw + TAU * ((prev + d - raw) / TAU).round()
            }
        };
        ts.push(*t);
        values.push(value);
    }
    Ok(UnwrappedAngle { ts, values })
}

/// Smallest `m ≤ m_max` with `|f^(m)(t0)| > 1e-8 · (1 + max_{j<m} |f^(j)(t0)|)`,
/// or `None` when all of `f, ..., f^(m_max)` vanish at `t0`.
///
/// Derivatives come from the Taylor expansion of the expression, never from
/// finite differences.
pub fn vanishing_order(f: &Expr, t0: f64, m_max: usize) -> Result<Option<usize>, NumericsError> {
    if m_max > 8 {
        return Err(NumericsError::InvalidConfig("m_max must not exceed 8".into()));
    }
    let d = f.derivatives(t0, m_max)?;
    let mut scale = 0.0f64;
    for (m, v) in d.iter().enumerate() {
        if v.abs() > 1e-8 * (scale + 1.0) {
            return Ok(Some(m));
        }
        scale = scale.max(v.abs());
    }
    Ok(None)
}

/// `n` evenly spaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
