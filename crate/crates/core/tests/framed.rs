mod common;

use common::*;
use helicoid_core::framed::{FocalRoots, FramedSurface};
use helicoid_core::helicoid::{Axis, HelicoidalSurface};
use helicoid_core::legendre::NuSource;
use helicoid_core::numerics::linspace;
use helicoid_core::vec3::{add, dot, norm, scale};
use proptest::prelude::*;

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
    let x = |u: f64, v: f64| [u.cos() * v.cos(), u.cos() * v.sin(), u.sin()];
    FramedSurface::new(
        x,
        x,
        |u: f64, v: f64| [-u.sin() * v.cos(), -u.sin() * v.sin(), u.cos()],
        (-1.4, 1.4),
        (0.0, 6.0),
    )
}

#[test]
fn plane_invariants() {
    let p = plane();
    let near = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-10);
    for (u, v) in [(0.0, 0.0), (0.3, -0.7)] {
        assert!(near(
            &p.basic_invariants(u, v).as_array(),
            &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        ));
        assert!(near(&p.curvature(u, v).as_array(), &[1.0, 0.0, 0.0]));
        assert!(near(&p.concomitant(u, v), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(near(&p.integrability_residual(u, v), &[0.0; 6]));
        let c = p.classify(u, v);
        assert!(c.regular && c.legendre_immersion && c.framed_immersion);
        assert_eq!(p.focal_lambdas(u, v), FocalRoots::None);
    }
    let lifted = p.parallel_surface(1.0);
    assert_eq!(lifted.position(0.2, 0.3), [0.2, 0.3, 1.0]);
    assert!(near(
        &lifted.basic_invariants(0.2, 0.3).as_array(),
        &p.basic_invariants(0.2, 0.3).as_array()
    ));
}

#[test]
fn sphere_curvature() {
    let s = sphere();
    for (u, v) in [(0.3, 1.0), (-0.8, 4.0), (1.1, 0.2)] {
        let c = s.curvature(u, v);
        assert!((c.j.abs() - u.cos()).abs() < 1e-8);
        assert!((c.gaussian() - 1.0).abs() < 1e-8);
        assert!((c.mean().abs() - 1.0).abs() < 1e-8);
        assert!(s.integrability_residual(u, v).iter().all(|r| r.abs() <= 1e-8));
        match s.focal_lambdas(u, v) {
            FocalRoots::Two(a, b) => assert!((a.abs() - 1.0).abs() < 1e-6 && (a - b).abs() < 1e-6, "{a} {b}"),
            other => panic!("{other:?}"),
        }
        let centre = s.parallel_surface(-1.0);
        assert!(norm(centre.position(u, v)) < 1e-12);
        assert!(centre.curvature(u, v).j.abs() < 1e-8);
    }
}

#[test]
fn sphere_frame_membership() {
    let s = sphere();
    for u in linspace(-1.2, 1.2, 7) {
        for v in linspace(0.0, 6.0, 7) {
            assert!(s.frame_residual(u, v) <= 1e-9);
            let b = s.basic_invariants(u, v);
            let (sv, tv) = (s.s_vec(u, v), s.t_vec(u, v));
            let xu = s.x_u(u, v);
            let recon = add(scale(sv, b.a1), scale(tv, b.b1));
            assert!((0..3).all(|i| (recon[i] - xu[i]).abs() <= 1e-8));
        }
    }
}

#[test]
fn torus_curvature() {
    let g = curve("2 + cos(t)", "sin(t)", NuSource::Auto, (0.0, 6.2));
    let h = HelicoidalSurface::build(g, Axis::Z, 0.0).unwrap();
    let f = h.as_framed_surface();
    for t in linspace(0.1, 6.1, 100) {
        let k = f.curvature(t, 0.7 * t).gaussian();
        assert!(rel_close(k, t.cos() / (2.0 + t.cos()), 1e-7), "{t}: {k}");
    }
}

#[test]
fn helicoid_oracle_matches_closed_form() {
    let h = HelicoidalSurface::build(circle((0.2, 3.0)), Axis::Z, 2.0).unwrap();
    let f = h.as_framed_surface();
    for (t, th) in [(0.5, 0.1), (1.3, 4.0), (2.7, -2.0)] {
        let a = h.invariants_closed_form(t).unwrap().as_array();
        let b = f.basic_invariants(t, th).as_array();
        assert!(a.iter().zip(&b).all(|(x, y)| rel_close(*x, *y, 1e-7)), "{a:?} {b:?}");
        let a = h.concomitant_closed_form(t).unwrap();
        let b = f.concomitant(t, th);
        assert!(a.iter().zip(&b).all(|(x, y)| rel_close(*x, *y, 1e-7)));
    }
}

#[test]
fn example_frontal_classification_at_its_singular_point() {
    let h = HelicoidalSurface::build(frontal_example((-1.0, 1.0)), Axis::Z, 1.0).unwrap();
    let f = h.as_framed_surface();
    let i = f.concomitant(0.0, 0.4);
    assert!(i[..3].iter().all(|v| v.abs() < 1e-10), "{i:?}");
    let c = f.classify(0.0, 0.4);
    // c ℓ sin φ ≠ 0 in the tail keeps the frame an immersion
    assert!(!c.regular && !c.legendre_immersion && c.framed_immersion);
    assert_eq!(c, h.classify_point(0.0).unwrap());
}

#[test]
fn cuspidal_edge_of_revolution() {
    let h = HelicoidalSurface::build(cuspidal_edge((-0.8, 0.8)), Axis::Z, 0.0).unwrap();
    let c = h.as_framed_surface().classify(0.0, 1.0);
    assert!(!c.regular && c.legendre_immersion && c.framed_immersion);
}

#[test]
fn circle_helicoid_has_two_focal_roots() {
    let h = HelicoidalSurface::build(circle((-0.5, 0.5)), Axis::Z, 2.0).unwrap();
    match h.as_framed_surface().focal_lambdas(0.0, 0.0) {
        FocalRoots::Two(a, b) => assert!((a - b).abs() > 1e-3, "{a} {b}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn focal_root_edge_cases() {
    use helicoid_core::framed::FramedCurvature;
    let c = |j, k, h| FramedCurvature { j, k, h };
    assert_eq!(c(1.0, 0.0, 0.5).focal_roots(), FocalRoots::One(1.0));
    assert_eq!(c(1.0, 0.0, 0.0).focal_roots(), FocalRoots::None);
    assert_eq!(c(0.0, 0.0, 0.0).focal_roots(), FocalRoots::Indeterminate);
    assert_eq!(c(1.0, 1.0, 0.0).focal_roots(), FocalRoots::None);
}

fn sample_surface() -> impl Strategy<Value = (HelicoidalSurface, f64, f64)> {
    (
        0usize..5,
        any::<bool>(),
        prop::sample::select(vec![0.5, -0.5, 1.0, -2.0]),
        0.0..1.0f64,
        -3.0..3.0f64,
    )
        .prop_map(|(i, z, c, s, th)| {
            let p = &test_profiles()[i];
            let (axis, dom) = if z {
                (Axis::Z, p.z_domain)
            } else {
                (Axis::X, p.x_domain)
            };
            let h = HelicoidalSurface::build((p.build)(dom), axis, c).unwrap();
            let t = dom.0 + s * (dom.1 - dom.0);
            (h, t, th)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_compatibility((h, t, th) in sample_surface()) {
        let xi = h.xi(t).unwrap();
        // the finite-difference oracle needs ξ resolved by its step
        prop_assume!(xi > 0.2);
        let f = h.as_framed_surface();
        prop_assert!(f.frame_compatibility_residual(t, th) <= 1e-6);
    }

    #[test]
    fn oracle_curvature_is_classical((h, t, th) in sample_surface()) {
        let p = h.axis_point(t).unwrap();
        prop_assume!((p.beta * p.xi).abs() > 1e-2 && p.xi > 0.2);
        let f = h.as_framed_surface();
        let c = f.curvature(t, th);
        let (k, hm) = classical_curvatures(&h, t, th, f.normal(t, th));
        prop_assert!(rel_close(c.gaussian(), k, 1e-6), "{} vs {k}", c.gaussian());
        prop_assert!(rel_close(c.mean(), hm, 1e-6), "{} vs {hm}", c.mean());
    }

    #[test]
    fn reciprocal_focal_roots_are_principal((h, t, _th) in sample_surface()) {
        let c = h.curvature_closed_form(t).unwrap();
        prop_assume!(c.j.abs() > 1e-3);
        let (k, hm) = (c.gaussian(), c.mean());
        if let FocalRoots::Two(a, b) = c.focal_roots() {
            for lam in [a, b] {
                let r = 1.0 / lam;
                let res = r * r - 2.0 * hm * r + k;
                prop_assert!(res.abs() <= 1e-6 * (1.0 + r * r + k.abs()), "{res}");
            }
        }
    }

    #[test]
    fn classification_flags_are_monotone((h, t, th) in sample_surface(), snap in any::<bool>()) {
        // snap onto a singular point of the profile when there is one
        let t = if snap { h.profile().singular_points().first().copied().unwrap_or(t) } else { t };
        let f = h.as_framed_surface();
        for c in [f.classify(t, th), h.classify_point(t).unwrap()] {
            prop_assert!(!c.regular || c.legendre_immersion);
            prop_assert!(!c.legendre_immersion || c.framed_immersion);
        }
    }

    #[test]
    fn membership_in_the_frame_bundle((h, t, th) in sample_surface()) {
        let f = h.as_framed_surface();
        let (n, s) = (f.normal(t, th), f.s_vec(t, th));
        prop_assert!((norm(n) - 1.0).abs() <= 1e-9 && (norm(s) - 1.0).abs() <= 1e-9 && dot(n, s).abs() <= 1e-9);
        prop_assert!(f.frame_residual(t, th) <= 1e-8);
    }
}
