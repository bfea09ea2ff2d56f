//! Structural invariants checked over randomized scales, expressions,
//! and orders rather than hand-picked instances.

use proptest::prelude::*;

use tsfrac::{frac_integral, Expr, Func, TimeScale};

/// Scales whose points can all be enumerated.
fn discrete_scale() -> impl Strategy<Value = TimeScale> {
    prop_oneof![
        (1i64..5, 2i64..12).prop_map(|(lo, len)| TimeScale::integers(lo, lo + len).unwrap()),
        (0usize..3, 3usize..9).prop_map(|(si, count)| {
            let step = [0.25, 0.5, 1.5][si];
            TimeScale::uniform(1.0, step, count).unwrap()
        }),
        (2u32..4, 0i32..3, 4i32..7).prop_map(|(q, k0, k1)| {
            TimeScale::geometric(q as f64, k0, k1).unwrap()
        }),
        prop::collection::btree_set(1..200u32, 2..9).prop_map(|ks| {
            TimeScale::finite_set(ks.into_iter().map(|k| k as f64 / 8.0).collect()).unwrap()
        }),
    ]
}

/// Discrete scales, intervals, and unions of the two.
fn any_scale() -> impl Strategy<Value = TimeScale> {
    prop_oneof![
        discrete_scale(),
        (1u32..7, 2u32..8).prop_map(|(lo, w)| {
            TimeScale::interval(lo as f64 / 4.0, lo as f64 / 4.0 + w as f64 / 2.0).unwrap()
        }),
        (discrete_scale(), 1u32..5).prop_map(|(d, lo)| {
            let gap = d.max() + 1.0;
            let iv = TimeScale::interval(gap + lo as f64, gap + lo as f64 + 2.0).unwrap();
            TimeScale::union_of(&[d, iv]).unwrap()
        }),
    ]
}

/// All enumerable points plus a few interior samples of each interval.
fn members(ts: &TimeScale) -> Vec<f64> {
    ts.sample_grid(ts.min(), ts.max(), 5)
}

proptest! {
    #[test]
    fn jump_operators_are_consistent(ts in any_scale(), idx in any::<prop::sample::Index>()) {
        let pts = members(&ts);
        let t = pts[idx.index(pts.len())];

        let sigma = ts.sigma(t).unwrap();
        let rho = ts.rho(t).unwrap();
        let mu = ts.mu(t).unwrap();

        prop_assert!(sigma >= t);
        prop_assert!(rho <= t);
        prop_assert_eq!(mu, sigma - t);
        prop_assert!(mu >= 0.0);

        // Jumps land on scale points.
        prop_assert_eq!(ts.canonical(sigma).unwrap(), sigma);
        prop_assert_eq!(ts.canonical(rho).unwrap(), rho);

        // Extremes are fixed points.
        prop_assert_eq!(ts.sigma(ts.max()).unwrap(), ts.max());
        prop_assert_eq!(ts.rho(ts.min()).unwrap(), ts.min());

        // Jumping forward to an isolated neighbor and back returns to t.
        if mu > 0.0 {
            prop_assert_eq!(ts.rho(sigma).unwrap(), t);
        }
    }

    #[test]
    fn scattered_iteration_partitions_the_range(
        ts in any_scale(),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let pts = members(&ts);
        let (mut a, mut b) = (pts[i.index(pts.len())], pts[j.index(pts.len())]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let (scattered, pieces) = ts.iterate_scattered(a, b).unwrap();
        let total: f64 = scattered.iter().map(|(_, m)| m).sum::<f64>()
            + pieces.iter().map(|(lo, hi)| hi - lo).sum::<f64>();
        prop_assert!(
            (total - (b - a)).abs() <= 1e-12 * (1.0 + (b - a).abs()),
            "covered {total}, span {}", b - a
        );
        for (p, m) in &scattered {
            prop_assert!(*p >= a && *p < b && *m > 0.0);
        }
        for (lo, hi) in &pieces {
            prop_assert!(*lo >= a && *hi <= b && lo < hi);
        }
    }

    #[test]
    fn scale_text_round_trips(ts in any_scale()) {
        let text = ts.to_string();
        let back: TimeScale = text.parse().unwrap();
        prop_assert_eq!(back.segments(), ts.segments(), "through {}", text);
    }

    #[test]
    fn integral_is_linear_and_oriented(
        ts in discrete_scale(),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        ai in 0usize..3,
        c1 in -3i32..4,
        c2 in -3i32..4,
    ) {
        let alpha = [0.25, 0.75, 1.0][ai];
        let pts = members(&ts);
        let (mut a, mut b) = (pts[i.index(pts.len())], pts[j.index(pts.len())]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let f = Func::from_text("t").unwrap();
        let g = Func::from_text("exp(t/8)").unwrap();
        let combo =
            Func::from_text(&format!("{c1}*t + {c2}*exp(t/8)")).unwrap();

        let int_f = frac_integral(&f, &ts, a, b, alpha).unwrap().value;
        let int_g = frac_integral(&g, &ts, a, b, alpha).unwrap().value;
        let int_combo = frac_integral(&combo, &ts, a, b, alpha).unwrap().value;
        let parts = (c1 as f64 * int_f, c2 as f64 * int_g);
        let expect = parts.0 + parts.1;
        // Scaled by the addends, not the sum: the combination may cancel.
        prop_assert!(
            (int_combo - expect).abs() <= 1e-11 * (1.0 + parts.0.abs() + parts.1.abs()),
            "combo {int_combo}, parts {expect}"
        );

        let reversed = frac_integral(&f, &ts, b, a, alpha).unwrap().value;
        prop_assert_eq!(reversed, -int_f);
    }
}

/// Expressions built from a bounded grammar; exponents stay small and
/// constant so every generated tree is parseable back from its text.
fn expr_tree() -> impl Strategy<Value = Expr> {
    // Negative values are spelled with unary minus in the text form, so
    // the parser never produces a negative literal; generate likewise.
    let leaf = prop_oneof![
        (0i32..5).prop_map(|k| Expr::Const(k as f64)),
        Just(Expr::Var),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 1u32..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k as f64)),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.prop_map(|a| Expr::Abs(Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn expression_text_round_trips(e in expr_tree()) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "through {}", text);
    }

    #[test]
    fn derivative_matches_finite_differences(
        ci in prop::collection::vec(-3i32..4, 3),
        t in 0.5f64..2.5,
    ) {
        // A mixed but well-conditioned family: cubic + sine + growth.
        let text = format!(
            "{}*t^3 + {}*sin(t) + {}*exp(t/4)",
            ci[0], ci[1], ci[2]
        );
        let e = Expr::parse(&text).unwrap();
        let d = e.diff().unwrap();

        let h = 1e-5;
        let fd = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
        let sym = d.eval(t).unwrap();
        prop_assert!(
            (sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()),
            "symbolic {sym}, finite difference {fd} for {text}"
        );
    }

    #[test]
    fn differentiation_is_linear(
        a in -3i32..4,
        b in -3i32..4,
        t in 0.5f64..2.5,
    ) {
        let f = Expr::parse("t^2").unwrap();
        let g = Expr::parse("sin(t)").unwrap();
        let combo = Expr::parse(&format!("{a}*t^2 + {b}*sin(t)")).unwrap();
        let lhs = combo.diff().unwrap().eval(t).unwrap();
        let rhs = a as f64 * f.diff().unwrap().eval(t).unwrap()
            + b as f64 * g.diff().unwrap().eval(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}
