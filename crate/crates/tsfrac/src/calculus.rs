//! Fractional derivative and integral of order `alpha` in `(0, 1]` on a
//! time scale.
//!
//! At a right-scattered point the derivative of order `alpha` is the
//! weighted forward quotient
//!
//! ```text
//! (f(sigma(t)) - f(t)) * t^(1-alpha) / mu(t)
//! ```
//!
//! and at a right-dense point it is `t^(1-alpha) * f'(t)`. At `alpha = 1`
//! this is exactly the delta derivative; the order-zero operator is the
//! identity. At `t = 0` the derivative is defined as the limit from the
//! right, computed here by linear extrapolation along the three smallest
//! positive scale points with a loud failure when the extrapolants do
//! not settle.
//!
//! The integral of order `alpha` over `[a, b)` is the delta integral of
//! `f(t) * t^(alpha-1)`: a plain left-to-right sum over right-scattered
//! points plus adaptive quadrature over continuous pieces, graded toward
//! any endpoint near zero where the weight is singular.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Func;
use crate::quad::{self, QuadCfg};
use crate::timescale::{PointClass, TimeScale};

/// Absolute tolerance for each fractional integral.
pub const INTEGRAL_TOL: f64 = 1e-10;
/// Subdivision budget for one fractional integral.
const MAX_SUBDIVISIONS: usize = 1 << 20;
/// Relative agreement required of successive extrapolants at `t = 0`.
const ZERO_LIMIT_TOL: f64 = 1e-6;
/// Neighborhood start radius for pointwise checks at right-dense points.
pub(crate) const DENSE_NEIGHBORHOOD_RADIUS: f64 = 1e-2;
/// Step bound for dense-point finite differences.
const FD_STEP: f64 = 1e-6;

/// How a derivative value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivMethod {
    ScatteredQuotient,
    SymbolicDense,
    FiniteDifferenceDense,
    LimitAtZero,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FracDerivResult {
    pub value: f64,
    pub alpha: f64,
    pub point_class: PointClass,
    pub method: DerivMethod,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FracIntegralResult {
    pub value: f64,
    pub discrete_part: f64,
    pub continuous_part: f64,
    pub abs_error_estimate: f64,
}

/// `t^(alpha-1)`, exactly 1 when `alpha = 1` so first-order results
/// reduce bit-for-bit to the unweighted calculus.
pub(crate) fn frac_weight(t: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        1.0
    } else {
        t.powf(alpha - 1.0)
    }
}

/// `t^(1-alpha)`, exactly 1 when `alpha = 1`.
pub(crate) fn frac_weight_inv(t: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        1.0
    } else {
        t.powf(1.0 - alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    Ok(())
}

/// Delta (Hilger) derivative: forward quotient at right-scattered
/// points, ordinary derivative at right-dense points.
pub fn delta_derivative(f: &Func, ts: &TimeScale, t: f64) -> Result<f64> {
    Ok(delta_with_method(f, ts, t)?.0)
}

fn delta_with_method(f: &Func, ts: &TimeScale, t: f64) -> Result<(f64, DerivMethod)> {
    let t = ts.canonical(t)?;
    let sigma = ts.sigma(t)?;
    let mu = sigma - t;
    if mu > 0.0 {
        let q = (f.eval(sigma)? - f.eval(t)?) / mu;
        return Ok((q, DerivMethod::ScatteredQuotient));
    }
    if t == ts.max() {
        let cls = ts.classify(t)?;
        if cls.left == crate::timescale::Density::Scattered || t == ts.min() {
            return Err(Error::LeftScatteredMaximum { point: t });
        }
    }
    match f {
        Func::Tabulated(_) => Err(Error::NotDifferentiable(
            "tabulated function at a right-dense point".into(),
        )),
        Func::Expr(e) if !e.contains_abs() => {
            let d = e.diff()?;
            Ok((d.eval(t)?, DerivMethod::SymbolicDense))
        }
        Func::Expr(e) => {
            // Differentiable only numerically; step stays inside the
            // containing interval, one-sided at its endpoints.
            let (lo, hi) = ts.containing_interval(t).ok_or_else(|| {
                Error::NotDifferentiable(format!("no continuous neighborhood at {t}"))
            })?;
            let room_l = t - lo;
            let room_r = hi - t;
            let v = if room_l > 0.0 && room_r > 0.0 {
                let h = FD_STEP.min(room_l).min(room_r);
                (e.eval(t + h)? - e.eval(t - h)?) / (2.0 * h)
            } else if room_r > 0.0 {
                let h = FD_STEP.min(room_r / 2.0);
                (-3.0 * e.eval(t)? + 4.0 * e.eval(t + h)? - e.eval(t + 2.0 * h)?) / (2.0 * h)
            } else {
                let h = FD_STEP.min(room_l / 2.0);
                (3.0 * e.eval(t)? - 4.0 * e.eval(t - h)? + e.eval(t - 2.0 * h)?) / (2.0 * h)
            };
            Ok((v, DerivMethod::FiniteDifferenceDense))
        }
    }
}

/// Fractional derivative of order `alpha` in `(0, 1]` at `t`.
pub fn frac_derivative(f: &Func, ts: &TimeScale, t: f64, alpha: f64) -> Result<FracDerivResult> {
    check_alpha(alpha)?;
    let t = ts.canonical(t)?;
    let point_class = ts.classify(t)?;

    if alpha == 1.0 {
        let (value, method) = delta_with_method(f, ts, t)?;
        return Ok(FracDerivResult { value, alpha, point_class, method });
    }
    if t < 0.0 {
        return Err(Error::NegativePointWithFractionalAlpha { point: t, alpha });
    }
    if t == 0.0 {
        let value = limit_at_zero(f, ts, alpha)?;
        return Ok(FracDerivResult {
            value,
            alpha,
            point_class,
            method: DerivMethod::LimitAtZero,
        });
    }
    let (d, method) = delta_with_method(f, ts, t)?;
    Ok(FracDerivResult {
        value: frac_weight_inv(t, alpha) * d,
        alpha,
        point_class,
        method,
    })
}

/// The order-zero operator is the identity.
pub fn frac_derivative_order_zero(f: &Func, t: f64) -> Result<f64> {
    f.eval(t)
}

/// Extrapolates derivative values along the three smallest positive
/// scale points to zero; fails when successive extrapolants disagree.
fn limit_at_zero(f: &Func, ts: &TimeScale, alpha: f64) -> Result<f64> {
    let pts = if ts.mu(0.0)? > 0.0 {
        let t1 = ts.sigma(0.0)?;
        let t2 = ts.sigma(t1)?;
        let t3 = ts.sigma(t2)?;
        if !(t1 > 0.0 && t2 > t1 && t3 > t2) {
            return Err(Error::ZeroLimitUndetermined { spread: f64::INFINITY });
        }
        [t1, t2, t3]
    } else {
        // Zero is right-dense: take a dyadic triple inside the interval.
        let (_, hi) = ts
            .containing_interval(0.0)
            .ok_or(Error::ZeroLimitUndetermined { spread: f64::INFINITY })?;
        let eps = FD_STEP.min(hi / 4.0);
        [eps, 2.0 * eps, 4.0 * eps]
    };
    let mut ys = [0.0; 3];
    for (y, p) in ys.iter_mut().zip(pts) {
        *y = frac_derivative(f, ts, p, alpha)?.value;
    }
    let extrap = |t1: f64, y1: f64, t2: f64, y2: f64| (t2 * y1 - t1 * y2) / (t2 - t1);
    let l12 = extrap(pts[0], ys[0], pts[1], ys[1]);
    let l23 = extrap(pts[1], ys[1], pts[2], ys[2]);
    let spread = (l12 - l23).abs();
    if spread > ZERO_LIMIT_TOL * (1.0 + l12.abs()) {
        return Err(Error::ZeroLimitUndetermined { spread });
    }
    Ok(l12)
}

/// Fractional integral over `[a, b)` of a pointwise-evaluable function.
/// Shared by the public entry point and the inequality integrands.
pub(crate) fn frac_integral_fn<F>(
    f: &F,
    ts: &TimeScale,
    a: f64,
    b: f64,
    alpha: f64,
) -> Result<FracIntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    check_alpha(alpha)?;
    let a = ts.canonical(a)?;
    let b = ts.canonical(b)?;
    if a == b {
        return Ok(FracIntegralResult {
            value: 0.0,
            discrete_part: 0.0,
            continuous_part: 0.0,
            abs_error_estimate: 0.0,
        });
    }
    if a > b {
        let r = frac_integral_fn(f, ts, b, a, alpha)?;
        return Ok(FracIntegralResult {
            value: -r.value,
            discrete_part: -r.discrete_part,
            continuous_part: -r.continuous_part,
            abs_error_estimate: r.abs_error_estimate,
        });
    }
    if alpha < 1.0 && a <= 0.0 {
        return Err(Error::NonpositivePointWithFractionalAlpha { point: a, alpha });
    }

    let (scattered, pieces) = ts.iterate_scattered(a, b)?;

    // Plain left-to-right summation; no reordering or compensation, so
    // discrete scales reproduce a naive reference sum bit-for-bit.
    let mut discrete_part = 0.0;
    for (p, mu) in scattered {
        discrete_part += f(p)? * frac_weight(p, alpha) * mu;
    }

    let mut continuous_part = 0.0;
    let mut abs_error_estimate = 0.0;
    if !pieces.is_empty() {
        let cfg = QuadCfg {
            abs_tol: INTEGRAL_TOL / pieces.len() as f64,
            max_intervals: MAX_SUBDIVISIONS,
            max_depth: 60,
            fail_on_budget: true,
            grade_near_zero: alpha < 1.0,
        };
        for (lo, hi) in pieces {
            let out = quad::adaptive(&|x| Ok(f(x)? * frac_weight(x, alpha)), lo, hi, &cfg)?;
            continuous_part += out.value;
            abs_error_estimate += out.abs_error;
        }
    }

    Ok(FracIntegralResult {
        value: discrete_part + continuous_part,
        discrete_part,
        continuous_part,
        abs_error_estimate,
    })
}

/// Fractional integral of order `alpha` over `[a, b)`; `a > b` flips the
/// sign, `a = b` is zero.
pub fn frac_integral(
    f: &Func,
    ts: &TimeScale,
    a: f64,
    b: f64,
    alpha: f64,
) -> Result<FracIntegralResult> {
    frac_integral_fn(&|x| f.eval(x), ts, a, b, alpha)
}

/// Residual of `f(sigma(t)) = f(t) + mu(t) * t^(alpha-1) * D_alpha f(t)`.
/// Zero exactly at right-dense points; at right-scattered points it
/// cancels to rounding error by construction.
pub fn verify_sigma_formula(f: &Func, ts: &TimeScale, t: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let t = ts.canonical(t)?;
    let mu = ts.mu(t)?;
    if alpha < 1.0 && t == 0.0 && mu > 0.0 {
        return Err(Error::Domain(
            "the jump formula needs t > 0 at fractional order".into(),
        ));
    }
    let deriv = frac_derivative(f, ts, t, alpha)?.value;
    let sigma = ts.sigma(t)?;
    Ok(f.eval(sigma)? - f.eval(t)? - mu * frac_weight(t, alpha) * deriv)
}

/// Tests `candidate` against the defining inequality of the fractional
/// derivative on progressively smaller scale neighborhoods of `t`:
///
/// ```text
/// |(f(sigma(t)) - f(s)) * t^(1-alpha) - candidate * (sigma(t) - s)|
///     <= epsilon * |sigma(t) - s|
/// ```
///
/// The radius starts at `mu(t)` (or 1e-2 at a right-dense point) and
/// halves `samples` times; the verdict is that of the smallest
/// neighborhood, since the definition only requires the bound to hold
/// sufficiently close to `t`. The point `s = t` is always sampled, so an
/// offset candidate is rejected at every radius.
pub fn verify_epsilon_delta(
    f: &Func,
    ts: &TimeScale,
    t: f64,
    alpha: f64,
    candidate: f64,
    epsilon: f64,
    samples: usize,
) -> Result<bool> {
    check_alpha(alpha)?;
    if samples == 0 || !(epsilon > 0.0) {
        return Err(Error::Domain(
            "epsilon must be positive and samples at least 1".into(),
        ));
    }
    let t = ts.canonical(t)?;
    let sigma = ts.sigma(t)?;
    let mu = sigma - t;
    let w = frac_weight_inv(t, alpha);
    let f_sigma = f.eval(sigma)?;
    let r0 = if mu > 0.0 { mu } else { DENSE_NEIGHBORHOOD_RADIUS };
    shrinking_neighborhood_check(ts, t, r0, samples, |s| {
        let lhs = ((f_sigma - f.eval(s)?) * w - candidate * (sigma - s)).abs();
        Ok(lhs <= epsilon * (sigma - s).abs())
    })
}

/// Runs `check` on scale points drawn from neighborhoods of `t` whose
/// radius halves `samples` times; returns the verdict of the smallest
/// neighborhood. Each round samples `t` itself plus the nearest scale
/// points strictly within radius on either side.
pub(crate) fn shrinking_neighborhood_check<C>(
    ts: &TimeScale,
    t: f64,
    r0: f64,
    samples: usize,
    check: C,
) -> Result<bool>
where
    C: Fn(f64) -> Result<bool>,
{
    let mut last = false;
    for k in 0..samples {
        let r = r0 / (1u64 << k.min(62)) as f64;
        let mut pass = check(t)?;
        for cand in [t - r, t + r] {
            let s = ts.nearest_point(cand);
            if s != t && (s - t).abs() < r {
                pass = pass && check(s)?;
            }
        }
        last = pass;
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Func;
    use crate::timescale::{Density, TimeScale};

    fn func(text: &str) -> Func {
        Func::from_text(text).unwrap()
    }

    fn z(a: i64, b: i64) -> TimeScale {
        TimeScale::integers(a, b).unwrap()
    }

    /// Independent reference: naive summation of the weighted quotient
    /// definition over the scattered points of [a, b).
    fn oracle_sum(f: &Func, ts: &TimeScale, a: f64, b: f64, alpha: f64) -> f64 {
        let (scattered, pieces) = ts.iterate_scattered(a, b).unwrap();
        assert!(pieces.is_empty(), "oracle only covers discrete scales");
        let mut sum = 0.0;
        for (t, mu) in scattered {
            sum += f.eval(t).unwrap() * t.powf(alpha - 1.0) * mu;
        }
        sum
    }

    #[test]
    fn scattered_quotient_on_integers() {
        let ts = z(1, 10);
        let f = func("t^2");
        let r = frac_derivative(&f, &ts, 4.0, 0.5).unwrap();
        assert!((r.value - 18.0).abs() < 1e-12 * 18.0);
        assert_eq!(r.method, DerivMethod::ScatteredQuotient);
        assert_eq!(r.point_class.right, Density::Scattered);

        let r1 = frac_derivative(&f, &ts, 4.0, 1.0).unwrap();
        assert_eq!(r1.value, 9.0);
        assert_eq!(r1.value, delta_derivative(&f, &ts, 4.0).unwrap());
    }

    #[test]
    fn dense_symbolic_weighting() {
        let ts = TimeScale::interval(1.0, 2.0).unwrap();
        let r = frac_derivative(&func("t"), &ts, 1.44, 0.5).unwrap();
        assert!((r.value - 1.2).abs() < 1e-12);
        assert_eq!(r.method, DerivMethod::SymbolicDense);
        assert_eq!(r.point_class.right, Density::Dense);
    }

    #[test]
    fn dense_abs_falls_back_to_finite_differences() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let f = func("abs(t - 1)");
        let r = frac_derivative(&f, &ts, 1.5, 1.0).unwrap();
        assert_eq!(r.method, DerivMethod::FiniteDifferenceDense);
        assert!((r.value - 1.0).abs() < 1e-6);
        // One-sided at the interval endpoints.
        let r = frac_derivative(&func("t^2"), &ts, 0.0, 1.0).unwrap();
        assert_eq!(r.method, DerivMethod::SymbolicDense);
        assert!(r.value.abs() < 1e-12);
        let r = frac_derivative(&f, &ts, 2.0, 1.0).unwrap();
        assert_eq!(r.method, DerivMethod::FiniteDifferenceDense);
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tabulated_works_scattered_fails_dense() {
        let ts = z(1, 4);
        let f = Func::tabulated(vec![(1.0, 1.0), (2.0, 4.0), (3.0, 9.0), (4.0, 16.0)]).unwrap();
        assert_eq!(delta_derivative(&f, &ts, 2.0).unwrap(), 5.0);
        let dense = TimeScale::interval(1.0, 2.0).unwrap();
        let g = Func::tabulated(vec![(1.0, 1.0), (2.0, 4.0)]).unwrap();
        assert!(matches!(
            delta_derivative(&g, &dense, 1.5),
            Err(Error::NotDifferentiable(_))
        ));
    }

    #[test]
    fn left_scattered_maximum_is_rejected() {
        let ts = z(1, 5);
        assert!(matches!(
            delta_derivative(&func("t"), &ts, 5.0),
            Err(Error::LeftScatteredMaximum { .. })
        ));
        // A left-dense maximum is fine.
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        assert!((delta_derivative(&func("t^2"), &ts, 1.0).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_validation_and_sign_rules() {
        let ts = z(-3, 3);
        let f = func("t");
        assert!(matches!(
            frac_derivative(&f, &ts, 1.0, 0.0),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            frac_derivative(&f, &ts, 1.0, 1.5),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            frac_derivative(&f, &ts, -2.0, 0.5),
            Err(Error::NegativePointWithFractionalAlpha { .. })
        ));
        // Order one is insensitive to sign.
        assert_eq!(frac_derivative(&f, &ts, -2.0, 1.0).unwrap().value, 1.0);
        assert!(matches!(
            frac_derivative(&f, &ts, 7.0, 0.5),
            Err(Error::PointNotInScale { .. })
        ));
    }

    #[test]
    fn order_zero_is_identity() {
        let f = func("exp(t)");
        assert_eq!(frac_derivative_order_zero(&f, 1.3).unwrap(), 1.3_f64.exp());
    }

    #[test]
    fn zero_limit_extrapolates_or_fails_loudly() {
        // f(t) = 2*sqrt(t) has fractional derivative identically 1 for
        // alpha = 1/2 on a dense neighborhood of zero.
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let r = frac_derivative(&func("2*t^0.5"), &ts, 0.0, 0.5).unwrap();
        assert_eq!(r.method, DerivMethod::LimitAtZero);
        assert!((r.value - 1.0).abs() < 1e-5, "value {}", r.value);

        // Constants extrapolate to zero from any side.
        let r = frac_derivative(&func("3"), &z(0, 10), 0.0, 0.5).unwrap();
        assert_eq!(r.value, 0.0);

        // On the integers the weighted quotients of t^2 do not settle.
        assert!(matches!(
            frac_derivative(&func("t^2"), &z(0, 10), 0.0, 0.5),
            Err(Error::ZeroLimitUndetermined { .. })
        ));
    }

    #[test]
    fn integral_matches_naive_sum_bitwise() {
        let ts = z(1, 4);
        let f = func("1");
        let r = frac_integral(&f, &ts, 1.0, 4.0, 0.5).unwrap();
        let expected = 1.0 + 2.0_f64.powf(-0.5) + 3.0_f64.powf(-0.5);
        assert!((r.value - 2.28445705).abs() < 1e-8);
        assert_eq!(r.value, expected);
        assert_eq!(r.value, oracle_sum(&f, &ts, 1.0, 4.0, 0.5));
        assert_eq!(r.continuous_part, 0.0);
        assert_eq!(r.abs_error_estimate, 0.0);

        let g = func("t^2 - t");
        let r = frac_integral(&g, &ts, 1.0, 4.0, 0.75).unwrap();
        assert_eq!(r.value, oracle_sum(&g, &ts, 1.0, 4.0, 0.75));
    }

    #[test]
    fn integral_on_geometric_lattice() {
        let ts = TimeScale::geometric(2.0, 0, 3).unwrap();
        let f = func("t");
        // sum of t * mu over {1, 2, 4}: 1*1 + 2*2 + 4*4 = 21
        let r = frac_integral(&f, &ts, 1.0, 8.0, 1.0).unwrap();
        assert_eq!(r.value, 21.0);
        let r = frac_integral(&f, &ts, 1.0, 8.0, 0.5).unwrap();
        assert_eq!(r.value, oracle_sum(&f, &ts, 1.0, 8.0, 0.5));
    }

    #[test]
    fn integral_quadrature_on_intervals() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let r = frac_integral(&func("t^2"), &ts, 0.0, 1.0, 1.0).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-10);
        assert_eq!(r.discrete_part, 0.0);
        assert!(r.abs_error_estimate < 1e-10);

        // Fractional weight: integral of t * t^(-1/2) over [0.25, 1]
        // is 2/3 * (1 - 0.125).
        let ts = TimeScale::interval(0.25, 1.0).unwrap();
        let r = frac_integral(&func("t"), &ts, 0.25, 1.0, 0.5).unwrap();
        assert!((r.value - 2.0 / 3.0 * (1.0 - 0.125)).abs() < 1e-10);
    }

    #[test]
    fn integral_near_zero_uses_graded_mesh() {
        // integral of t^(-1/2) over [1e-6, 1) = 2(1 - 1e-3)
        let ts = TimeScale::interval(1e-6, 1.0).unwrap();
        let r = frac_integral(&func("1"), &ts, 1e-6, 1.0, 0.5).unwrap();
        assert!((r.value - 2.0 * (1.0 - 1e-3)).abs() < 1e-9);
    }

    #[test]
    fn integral_on_mixed_scale_partitions() {
        let ts: TimeScale = "union(R:0..1; set:{2,3})".parse().unwrap();
        let r = frac_integral(&func("1"), &ts, 0.0, 3.0, 1.0).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.discrete_part - 2.0).abs() < 1e-12);
        assert!((r.continuous_part - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integral_orientation_and_degeneracy() {
        let ts = z(1, 5);
        let f = func("t^2");
        let fwd = frac_integral(&f, &ts, 1.0, 5.0, 0.5).unwrap();
        let bwd = frac_integral(&f, &ts, 5.0, 1.0, 0.5).unwrap();
        assert_eq!(bwd.value, -fwd.value);
        let zero = frac_integral(&f, &ts, 3.0, 3.0, 0.5).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn integral_additivity_over_ranges() {
        let ts: TimeScale = "union(R:0.5..1.5; set:{2,2.5,3})".parse().unwrap();
        let f = func("exp(t/4)");
        for alpha in [0.3, 1.0] {
            let whole = frac_integral(&f, &ts, 0.5, 3.0, alpha).unwrap().value;
            let left = frac_integral(&f, &ts, 0.5, 2.0, alpha).unwrap().value;
            let right = frac_integral(&f, &ts, 2.0, 3.0, alpha).unwrap().value;
            assert!((whole - (left + right)).abs() < 1e-10);
        }
    }

    #[test]
    fn integral_rejects_nonpositive_points_at_fractional_order() {
        let ts = z(0, 3);
        assert!(matches!(
            frac_integral(&func("1"), &ts, 0.0, 3.0, 0.5),
            Err(Error::NonpositivePointWithFractionalAlpha { .. })
        ));
        // Order one has no positivity requirement.
        let ts = z(-3, 3);
        let r = frac_integral(&func("t"), &ts, -3.0, 3.0, 1.0).unwrap();
        assert_eq!(r.value, -3.0 - 2.0 - 1.0 + 0.0 + 1.0 + 2.0);
    }

    #[test]
    fn sigma_formula_residuals() {
        let ts = z(1, 10);
        let f = func("t^2");
        for alpha in [0.25, 0.5, 1.0] {
            for t in [1.0, 3.0, 7.0] {
                let r = verify_sigma_formula(&f, &ts, t, alpha).unwrap();
                let scale = 1.0 + f.eval(ts.sigma(t).unwrap()).unwrap().abs();
                assert!(r.abs() <= 1e-9 * scale, "residual {r} at t={t}, alpha={alpha}");
            }
        }
        // Dense points cancel exactly.
        let dense = TimeScale::interval(1.0, 2.0).unwrap();
        assert_eq!(verify_sigma_formula(&f, &dense, 1.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_delta_accepts_true_value_and_rejects_offsets() {
        let ts = z(1, 10);
        let f = func("t^2");
        let good = frac_derivative(&f, &ts, 4.0, 0.5).unwrap().value;
        assert!(verify_epsilon_delta(&f, &ts, 4.0, 0.5, good, 1e-8, 5).unwrap());
        assert!(!verify_epsilon_delta(&f, &ts, 4.0, 0.5, 17.0, 1e-8, 5).unwrap());

        // Dense point: the Taylor remainder shrinks below epsilon once
        // the neighborhood is small enough.
        let dense = TimeScale::interval(0.25, 2.0).unwrap();
        let cand = frac_derivative(&f, &dense, 0.5, 0.5).unwrap().value;
        assert!(verify_epsilon_delta(&f, &dense, 0.5, 0.5, cand, 1e-4, 8).unwrap());
        assert!(!verify_epsilon_delta(&f, &dense, 0.5, 0.5, cand + 0.1, 1e-4, 8).unwrap());
    }
}
