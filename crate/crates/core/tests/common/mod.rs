// Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use helicoid_core::expr::{parse, Expr};
use helicoid_core::helicoid::HelicoidalSurface;
use helicoid_core::legendre::{LegendreCurve, NuSource};
use helicoid_core::numerics::derivative_with_step;
use helicoid_core::vec3::{cross, dot, norm, Vec3};

pub fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

pub fn curve(x: &str, z: &str, nu: NuSource, domain: (f64, f64)) -> LegendreCurve {
    LegendreCurve::build(e(x), e(z), nu, domain).unwrap()
}

/// `|a − b| ≤ tol · max(1, |a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

pub fn parabola(domain: (f64, f64)) -> LegendreCurve {
    curve("t + 2", "t^2/2", NuSource::Auto, domain)
}

pub fn circle(domain: (f64, f64)) -> LegendreCurve {
    curve("sin(t)", "2 - cos(t)", NuSource::Auto, domain)
}

pub fn ellipse(domain: (f64, f64)) -> LegendreCurve {
    curve("2 + cos(t)", "1.5 + 0.5*sin(t)", NuSource::Auto, domain)
}

/// `(t²/2 + 1, t³/3)` with `ν = (t, −1)/√(1+t²)`; a cusp at `t = 0`.
pub fn cuspidal_edge(domain: (f64, f64)) -> LegendreCurve {
    curve(
        "t^2/2 + 1",
        "t^3/3",
        NuSource::Explicit {
            a: e("t/sqrt(1 + t^2)"),
            b: e("-1/sqrt(1 + t^2)"),
        },
        domain,
    )
}

/// A frontal with `β = t`, `ℓ = 1`, `x(0) = 0`.
pub fn frontal_example(domain: (f64, f64)) -> LegendreCurve {
    curve(
        "((t + 1)*cos(t) + (t - 1)*sin(t) - 1)/sqrt(2)",
        "((1 - t)*cos(t) + (1 + t)*sin(t) - 1)/sqrt(2)",
        NuSource::Phi(e("t - pi/4")),
        domain,
    )
}

pub struct TestProfile {
    pub name: &'static str,
    pub build: fn((f64, f64)) -> LegendreCurve,
    /// Domain on which ξ ≠ 0 around the z-axis for every c ≠ 0.
    pub z_domain: (f64, f64),
    /// Same around the x-axis.
    pub x_domain: (f64, f64),
}

pub fn test_profiles() -> Vec<TestProfile> {
    vec![
        TestProfile {
            name: "parabola",
            build: parabola,
            z_domain: (-1.5, 1.5),
            x_domain: (0.2, 1.5),
        },
        TestProfile {
            name: "circle",
            build: circle,
            z_domain: (0.3, 2.8),
            x_domain: (0.0, 6.2),
        },
        TestProfile {
            name: "cuspidal-edge",
            build: cuspidal_edge,
            z_domain: (-0.8, 0.8),
            x_domain: (0.2, 1.0),
        },
        TestProfile {
            name: "frontal",
            build: frontal_example,
            z_domain: (-1.0, 1.0),
            x_domain: (-1.0, 1.0),
        },
        TestProfile {
            name: "ellipse",
            build: ellipse,
            z_domain: (0.0, 6.2),
            x_domain: (0.0, 6.2),
        },
    ]
}

fn poly(terms: &[(f64, usize)]) -> String {
    let mut s = String::from("0");
    for &(c, p) in terms {
        if c != 0.0 {
            s.push_str(&format!(" + ({c:?})*t^{p}"));
        }
    }
    s
}

fn integrate(terms: &[(f64, usize)], c0: f64) -> String {
    let mut out = vec![(c0, 0)];
    out.extend(terms.iter().map(|&(c, p)| (c / (p + 1) as f64, p + 1)));
    poly(&out)
}

/// A frontal built from the frame equations with prescribed data at `t = 0`:
/// `β = t^m (1 + u²)` and `φ = 2 atan(u)` for `u = u0 + k tⁿ`, so that `β`
/// has order `m`, `φ − φ(0)` has order `n` and `ℓ = 2u'/(1 + u²)`.
///
/// The normal is the rational `ν = (1 − u², 2u)/(1 + u²)`, which makes
/// `γ' = t^m (−2u, 1 − u²)` polynomial and `γ` exact. `u0 = 0` gives
/// `ν(0) = (1, 0)`, `u0 = 1` gives `ν(0) = (0, 1)`; `x(0) = x0`, `z(0) = 0`.
pub fn constructed(m: usize, n: usize, u0: f64, k: f64, x0: f64, domain: (f64, f64)) -> LegendreCurve {
    // γ' = (−2 t^m u, t^m (1 − u²)) expanded in powers of t
    let dx = [(-2.0 * u0, m), (-2.0 * k, m + n)];
    let dz = [(1.0 - u0 * u0, m), (-2.0 * u0 * k, m + n), (-k * k, m + 2 * n)];
    let x = integrate(&dx, x0);
    let z = integrate(&dz, 0.0);
    let u = format!("({u0:?} + ({k:?})*t^{n})");
    let one_minus_u2 = poly(&[(1.0 - u0 * u0, 0), (-2.0 * u0 * k, n), (-k * k, 2 * n)]);
    let a = format!("({one_minus_u2})/(1 + {u}^2)");
    let b = format!("2*{u}/(1 + {u}^2)");
    curve(&x, &z, NuSource::Explicit { a: e(&a), b: e(&b) }, domain)
}

fn d_t(h: &HelicoidalSurface, t: f64, th: f64, step: f64) -> Vec3 {
    let c = |i: usize| derivative_with_step(|s| h.position(s, th).unwrap()[i], t, 1, step);
    [c(0), c(1), c(2)]
}

fn d_th(h: &HelicoidalSurface, t: f64, th: f64, step: f64) -> Vec3 {
    let c = |i: usize| derivative_with_step(|s| h.position(t, s).unwrap()[i], th, 1, step);
    [c(0), c(1), c(2)]
}

/// Gaussian and mean curvature from the first and second fundamental forms
/// of the position map alone, using `x_t × x_θ` as normal; `H` is then
/// re-signed to the orientation of `n`.
pub fn classical_curvatures(h: &HelicoidalSurface, t: f64, th: f64, n: Vec3) -> (f64, f64) {
    let step = 1e-3;
    let xt = d_t(h, t, th, step);
    let xs = d_th(h, t, th, step);
    let second = |f: &dyn Fn(f64, f64) -> Vec3| -> [Vec3; 3] {
        let c2 = |g: &dyn Fn(f64) -> f64, at: f64| derivative_with_step(g, at, 2, step);
        let tt = [0, 1, 2].map(|i| c2(&|s| f(s, th)[i], t));
        let ss = [0, 1, 2].map(|i| c2(&|s| f(t, s)[i], th));
        let ts = [0, 1, 2].map(|i| derivative_with_step(|s| d_th(h, s, th, step)[i], t, 1, step));
        [tt, ts, ss]
    };
    let [xtt, xts, xss] = second(&|a, b| h.position(a, b).unwrap());
    let nn = cross(xt, xs);
    let unit = {
        let l = norm(nn);
        [nn[0] / l, nn[1] / l, nn[2] / l]
    };
    let (ee, ff, gg) = (dot(xt, xt), dot(xt, xs), dot(xs, xs));
    let (l, m, nv) = (dot(xtt, unit), dot(xts, unit), dot(xss, unit));
    let det = ee * gg - ff * ff;
    let k = (l * nv - m * m) / det;
    let hm = (ee * nv - 2.0 * ff * m + gg * l) / (2.0 * det);
    let sign = dot(unit, n).signum();
    (k, sign * hm)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |p: &[[f64; 2]], q: &[[f64; 2]]| {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| (x[0] - y[0]).hypot(x[1] - y[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// One constructed profile per row of the two boundedness tables, with the
/// expected `(K bounded, H bounded)` verdicts.
pub struct TableCase {
    pub name: &'static str,
    pub m: usize,
    pub n: usize,
    pub u0: f64,
    pub x0: f64,
    pub k_bounded: bool,
    pub h_bounded: bool,
}

pub fn table_cases() -> Vec<TableCase> {
    let c = |name, m, n, u0, x0, k_bounded, h_bounded| TableCase {
        name,
        m,
        n,
        u0,
        x0,
        k_bounded,
        h_bounded,
    };
    vec![
        c("m=1 front cos=0", 1, 1, 1.0, 1.0, true, false),
        c("m=1 front x=0", 1, 1, 1.0, 0.0, true, true),
        c("m=1 front x.cos!=0", 1, 1, 0.0, 1.0, false, false),
        c("m=1 non-front", 1, 2, 0.0, 1.0, true, true),
        c("m=1 non-front phi=O(t)", 1, 2, 1.0, 1.0, true, true),
        c("m=2 front x!=0", 2, 1, 0.0, 1.0, false, false),
        c("m=3 front x!=0 cos=0", 3, 1, 1.0, 1.0, false, false),
        c("m=2 front x=0", 2, 1, 1.0, 0.0, true, true),
        c("m=2 non-front x=0", 2, 2, 1.0, 0.0, true, true),
        c("m=2 non-front x.cos!=0 phi=O(t^3)", 2, 3, 0.0, 1.0, true, true),
        c("m=2 non-front x.cos!=0 phi=O(t^2)", 2, 2, 0.0, 1.0, false, false),
        c("m=3 non-front x.cos!=0 phi=O(t^4)", 3, 4, 0.0, 1.0, true, true),
        c("m=2 non-front cos=0 phi=O(t^2)", 2, 2, 1.0, 1.0, true, false),
        c("m=3 non-front cos=0 phi=O(t^2)", 3, 2, 1.0, 1.0, true, false),
        c("m=3 non-front cos=0 phi=O(t^4)", 3, 4, 1.0, 1.0, true, true),
        c("m=4 non-front cos=0 phi=O(t^2)", 4, 2, 1.0, 1.0, false, false),
        c("m=4 non-front cos=0 phi=O(t^3)", 4, 3, 1.0, 1.0, true, false),
    ]
}
