use std::f64::consts::PI;

use helicoid_core::expr::{parse, Expr, ExprError, Func};
use helicoid_core::numerics::{derivative, derivative_with_step};
use proptest::prelude::*;

fn at(s: &str, t: f64) -> f64 {
    parse(s).unwrap().eval(t).unwrap()
}

#[test]
fn grammar_examples() {
    assert_eq!(at("t^2/2", 2.0), 2.0);
    assert_eq!(at("sin(t)*cos(t)", 0.0), 0.0);
    assert_eq!(at("t+2", 0.0), 2.0);
    assert!((at("atan2(-1, t)", 1.0) + PI / 4.0).abs() < 1e-15);
    assert_eq!(at("-t^2", 3.0), -9.0);
    assert_eq!(at("2^3^2", 0.0), 512.0);
    assert!((at("pi + e", 0.0) - (PI + std::f64::consts::E)).abs() < 1e-15);
}

#[test]
fn unbalanced_paren_reports_offset() {
    match parse("(t+1") {
        Err(ExprError::Syntax { offset, expected, .. }) => {
            assert_eq!(offset, 4);
            assert!(expected.iter().any(|s| s.contains(')')), "{expected:?}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_identifier() {
    assert!(matches!(parse("foo(t)"), Err(ExprError::UnknownIdentifier { .. })));
    assert!(matches!(parse("t + y"), Err(ExprError::UnknownIdentifier { .. })));
}

#[test]
fn domain_errors_are_not_nan() {
    for (s, t) in [("sqrt(t)", -1.0), ("1/t", 0.0), ("log(t)", 0.0), ("log(t)", -2.0)] {
        assert!(
            matches!(parse(s).unwrap().eval(t), Err(ExprError::Domain { .. })),
            "{s} at {t}"
        );
    }
}

#[test]
fn derivative_examples() {
    assert_eq!(parse("sin(t)").unwrap().diff().eval(0.0).unwrap(), 1.0);
    assert!((parse("t^3/3").unwrap().diff_n(2).eval(1.0).unwrap() - 2.0).abs() < 1e-15);
    let atan = parse("atan(t)").unwrap();
    let fd = derivative(|t| atan.eval(t).unwrap(), 0.0, 1);
    let exact = atan.diff().eval(0.0).unwrap();
    assert_eq!(exact, 1.0);
    assert!((exact - fd).abs() < 1e-9);
}

#[test]
fn atan2_derivative_is_the_angle_rate() {
    let e = parse("atan2(sin(t), cos(t) + 2)").unwrap();
    let d = e.diff();
    for t in [-1.0, 0.3, 2.0] {
        let fd = derivative(|s| e.eval(s).unwrap(), t, 1);
        assert!((d.eval(t).unwrap() - fd).abs() < 1e-9);
    }
}

#[test]
fn abs_and_sign_are_flagged_at_zero() {
    let e = parse("abs(t)").unwrap();
    assert!(matches!(e.check_smooth_at(0.0), Err(ExprError::NonSmooth { .. })));
    assert!(e.check_smooth_at(0.5).is_ok());
    assert!(parse("sign(t - 1)").unwrap().check_smooth_at(1.0).is_err());
}

// Random smooth expressions: every node is defined and analytic on ℝ.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::t()),
        (-2.0..2.0f64).prop_map(|v| Expr::num((v * 100.0).round() / 100.0)),
        Just(Expr::Pi),
    ];
    leaf.prop_recursive(6, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| { Expr::div(a, Expr::add(Expr::num(1.5), Expr::pow(b, Expr::num(2.0)))) }),
            (inner.clone(), 0u8..4).prop_map(|(a, k)| Expr::pow(a, Expr::num(k as f64))),
            inner.clone().prop_map(|a| Expr::neg(a)),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(|a| Expr::call(Func::Atan, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Exp, Expr::sin(a))),
            inner
                .clone()
                .prop_map(|a| Expr::sqrt(Expr::add(Expr::num(1.0), Expr::pow(a, Expr::num(2.0))))),
            (inner.clone(), inner)
                .prop_map(|(y, x)| { Expr::atan2(y, Expr::add(Expr::num(2.0), Expr::pow(x, Expr::num(2.0)))) }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbolic_derivative_matches_finite_difference(
        e in smooth_expr(),
        ts in proptest::collection::vec(-2.0..2.0f64, 10),
    ) {
        let d = e.diff();
        for t in ts {
            let exact = d.eval(t).unwrap();
            let fd = derivative_with_step(|s| e.eval(s).unwrap(), t, 1, 1e-4 * (1.0 + t.abs()));
            prop_assert!(
                (exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()),
                "{e}: {exact} vs {fd} at {t}"
            );
        }
    }

    #[test]
    fn print_then_parse_evaluates_identically(
        e in smooth_expr(),
        ts in proptest::collection::vec(-2.0..2.0f64, 10),
    ) {
        let back = parse(&e.to_string()).unwrap();
        let again = parse(&back.to_string()).unwrap();
        for t in ts {
            let a = e.eval(t).unwrap();
            prop_assert_eq!(a, back.eval(t).unwrap(), "{}", e);
            prop_assert_eq!(a, again.eval(t).unwrap());
        }
    }
}
