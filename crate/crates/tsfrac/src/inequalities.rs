//! Weighted integral inequalities for the fractional integral.
//!
//! All six checkers integrate over `[a, b)` of one scale with one
//! fractional order, bundled in an [`InequalityContext`]. Five of them
//! (Holder, Cauchy-Schwarz, reversed Holder, Minkowski, Jensen) weight
//! every integrand by `|h|`; Hermite-Hadamard instead uses a
//! nonnegative weight `w` as-is and bounds the weighted mean of `f`
//! from both sides.
//!
//! Each checker reports both sides, the signed `slack` (nonnegative
//! when the inequality holds, oriented so that is true for concave /
//! reversed variants too), and a `satisfied` flag. The flag tolerates
//! rounding: `slack >= -(SLACK_REL_TOL * (1 + |lhs| + |rhs|) + e)`
//! where `e` is the propagated quadrature error, so exact equality
//! cases count as satisfied and a genuine violation of the reversed
//! variants is still detected.

use serde::Serialize;

use crate::calculus::frac_integral_fn;
use crate::error::{Error, Result};
use crate::expr::Func;
use crate::timescale::{Density, TimeScale};

/// Relative slack tolerance; scaled by `1 + |lhs| + |rhs|` and widened
/// by the propagated quadrature error so the flag never depends on the
/// quadrature's luck.
const SLACK_REL_TOL: f64 = 1e-12;
/// Functions raised to negative powers must clear this on the sample
/// grid, else the integral is treated as divergent.
const VANISHING_TOL: f64 = 1e-12;
/// Weights may dip this far below zero before being rejected.
const WEIGHT_TOL: f64 = 1e-12;
/// Interior samples per continuous segment used by the grid checks and
/// by convexity detection.
const GRID_SAMPLES: usize = 128;
/// Second differences with mixed signs beyond this (relative) level
/// make automatic convexity detection refuse to guess.
const SHAPE_TOL: f64 = 1e-9;

/// Which inequality a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Holder,
    CauchySchwarz,
    ReversedHolder,
    Minkowski,
    Jensen,
    HermiteHadamard,
}

/// Curvature of the function driving Jensen or Hermite-Hadamard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Convex,
    Concave,
}

/// Scale, integration range `[a, b)`, and fractional order shared by
/// one inequality check.
#[derive(Debug, Clone, Copy)]
pub struct InequalityContext<'a> {
    pub ts: &'a TimeScale,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

/// The three-term Hermite-Hadamard chain around the weighted mean.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HhChain {
    /// `f` at the weighted center (the smallest term when `f` is convex).
    pub lower: f64,
    /// Weighted mean of `f`.
    pub mid: f64,
    /// Chord bound through `f(a)` and `f(b)`.
    pub upper: f64,
    /// Weighted center of the range.
    pub center: f64,
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    /// Oriented so the inequality predicts `slack >= 0`.
    pub slack: f64,
    pub satisfied: bool,
    /// Quadrature error propagated through the powers and quotients of
    /// the final comparison; zero on fully discrete ranges.
    pub quadrature_error: f64,
    /// Curvature used by Jensen and Hermite-Hadamard.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    /// Present on Hermite-Hadamard reports only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<HhChain>,
}

impl InequalityReport {
    fn new(kind: InequalityKind, lhs: f64, rhs: f64, slack: f64, quad_err: f64) -> Self {
        InequalityReport {
            kind,
            lhs,
            rhs,
            slack,
            satisfied: slack >= -(SLACK_REL_TOL * (1.0 + lhs.abs() + rhs.abs()) + quad_err),
            quadrature_error: quad_err,
            shape: None,
            chain: None,
        }
    }

    fn degenerate(kind: InequalityKind) -> Self {
        InequalityReport::new(kind, 0.0, 0.0, 0.0, 0.0)
    }
}

impl<'a> InequalityContext<'a> {
    /// Canonicalizes the range and rejects reversed ranges, which have
    /// no inequality semantics (unlike integrals, which flip sign).
    fn validated(&self) -> Result<(f64, f64)> {
        let a = self.ts.canonical(self.a)?;
        let b = self.ts.canonical(self.b)?;
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        Ok((a, b))
    }

    fn integral<F>(&self, f: F) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let r = frac_integral_fn(&f, self.ts, self.a, self.b, self.alpha)?;
        Ok((r.value, r.abs_error_estimate))
    }

    /// Scale points and interval samples the grid checks look at: all
    /// of `[a, b)`, plus `b` itself when it is approached continuously
    /// (a left-dense endpoint contributes to the integral; an isolated
    /// one does not).
    fn check_grid(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let mut grid = self.ts.sample_grid(a, b, GRID_SAMPLES);
        if let Some(&last) = grid.last() {
            if last == b && self.ts.classify(b)?.left != Density::Dense {
                grid.pop();
            }
        }
        Ok(grid)
    }
}

/// First-order error of `base^exponent` given an error on `base`,
/// using the subadditive bound `err^exponent` when the exponent is in
/// `(0, 1]` and the derivative bound otherwise.
fn pow_err(base: f64, exponent: f64, base_err: f64) -> f64 {
    if base_err == 0.0 {
        return 0.0;
    }
    let deriv = exponent.abs() * base.powf(exponent - 1.0) * base_err;
    if exponent > 0.0 && exponent <= 1.0 {
        let subadd = base_err.powf(exponent);
        if deriv.is_finite() {
            deriv.min(subadd)
        } else {
            subadd
        }
    } else if deriv.is_finite() {
        deriv
    } else {
        base_err
    }
}

fn check_exponent(p: f64, want_greater_than_one: bool) -> Result<f64> {
    let ok = p.is_finite() && if want_greater_than_one { p > 1.0 } else { p < 0.0 };
    if !ok {
        return Err(Error::InvalidExponent { p });
    }
    Ok(p / (p - 1.0))
}

/// Holder: `int |f g| |h| <= (int |f|^p |h|)^(1/p) * (int |g|^q |h|)^(1/q)`
/// with `1/p + 1/q = 1`, `p > 1`.
pub fn holder(
    f: &Func,
    g: &Func,
    h: &Func,
    p: f64,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    let q = check_exponent(p, true)?;
    let (a, b) = cx.validated()?;
    if a == b {
        return Ok(InequalityReport::degenerate(InequalityKind::Holder));
    }
    let (lhs, e_lhs) = cx.integral(|x| Ok((f.eval(x)? * g.eval(x)? * h.eval(x)?).abs()))?;
    let (fa, e_fa) = cx.integral(|x| Ok(f.eval(x)?.abs().powf(p) * h.eval(x)?.abs()))?;
    let (gb, e_gb) = cx.integral(|x| Ok(g.eval(x)?.abs().powf(q) * h.eval(x)?.abs()))?;
    let fa_pow = fa.powf(1.0 / p);
    let gb_pow = gb.powf(1.0 / q);
    let rhs = fa_pow * gb_pow;
    let quad_err =
        e_lhs + pow_err(fa, 1.0 / p, e_fa) * gb_pow + fa_pow * pow_err(gb, 1.0 / q, e_gb);
    Ok(InequalityReport::new(
        InequalityKind::Holder,
        lhs,
        rhs,
        rhs - lhs,
        quad_err,
    ))
}

/// Cauchy-Schwarz: Holder at `p = 2`, with the right side in its
/// customary `sqrt(A * B)` form.
pub fn cauchy_schwarz(
    f: &Func,
    g: &Func,
    h: &Func,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    let (a, b) = cx.validated()?;
    if a == b {
        return Ok(InequalityReport::degenerate(InequalityKind::CauchySchwarz));
    }
    let (lhs, e_lhs) = cx.integral(|x| Ok((f.eval(x)? * g.eval(x)? * h.eval(x)?).abs()))?;
    let (fa, e_fa) = cx.integral(|x| {
        let v = f.eval(x)?;
        Ok(v * v * h.eval(x)?.abs())
    })?;
    let (gb, e_gb) = cx.integral(|x| {
        let v = g.eval(x)?;
        Ok(v * v * h.eval(x)?.abs())
    })?;
    let rhs = (fa * gb).sqrt();
    let quad_err = e_lhs + pow_err(fa * gb, 0.5, e_fa * gb.abs() + fa.abs() * e_gb);
    Ok(InequalityReport::new(
        InequalityKind::CauchySchwarz,
        lhs,
        rhs,
        rhs - lhs,
        quad_err,
    ))
}

/// Reversed Holder: for `p < 0` (so `q = p/(p-1)` lies in `(0, 1)`)
/// and `|f|` bounded away from zero, the Holder comparison flips:
/// `int |f g| |h| >= (int |f|^p |h|)^(1/p) * (int |g|^q |h|)^(1/q)`.
pub fn reversed_holder(
    f: &Func,
    g: &Func,
    h: &Func,
    p: f64,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    let q = check_exponent(p, false)?;
    let (a, b) = cx.validated()?;
    if a == b {
        return Ok(InequalityReport::degenerate(InequalityKind::ReversedHolder));
    }
    for x in cx.check_grid(a, b)? {
        if f.eval(x)?.abs() < VANISHING_TOL {
            return Err(Error::FunctionVanishes { at: x });
        }
    }
    let (lhs, e_lhs) = cx.integral(|x| Ok((f.eval(x)? * g.eval(x)? * h.eval(x)?).abs()))?;
    let (fa, e_fa) = cx.integral(|x| Ok(f.eval(x)?.abs().powf(p) * h.eval(x)?.abs()))?;
    let (gb, e_gb) = cx.integral(|x| Ok(g.eval(x)?.abs().powf(q) * h.eval(x)?.abs()))?;
    if !(fa > 0.0) {
        // |f| clears the grid check, so a vanishing integral means the
        // weight contributes nothing anywhere.
        return Err(Error::ZeroWeightMass);
    }
    let fa_pow = fa.powf(1.0 / p);
    let gb_pow = gb.powf(1.0 / q);
    let rhs = fa_pow * gb_pow;
    let quad_err =
        e_lhs + pow_err(fa, 1.0 / p, e_fa) * gb_pow + fa_pow * pow_err(gb, 1.0 / q, e_gb);
    Ok(InequalityReport::new(
        InequalityKind::ReversedHolder,
        lhs,
        rhs,
        lhs - rhs,
        quad_err,
    ))
}

/// Minkowski: `(int |f+g|^p |h|)^(1/p) <= (int |f|^p |h|)^(1/p) +
/// (int |g|^p |h|)^(1/p)` for `p > 1`.
pub fn minkowski(
    f: &Func,
    g: &Func,
    h: &Func,
    p: f64,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    check_exponent(p, true)?;
    let (a, b) = cx.validated()?;
    if a == b {
        return Ok(InequalityReport::degenerate(InequalityKind::Minkowski));
    }
    let (sum, e_sum) = cx.integral(|x| {
        Ok((f.eval(x)? + g.eval(x)?).abs().powf(p) * h.eval(x)?.abs())
    })?;
    let (fa, e_fa) = cx.integral(|x| Ok(f.eval(x)?.abs().powf(p) * h.eval(x)?.abs()))?;
    let (gb, e_gb) = cx.integral(|x| Ok(g.eval(x)?.abs().powf(p) * h.eval(x)?.abs()))?;
    let lhs = sum.powf(1.0 / p);
    let rhs = fa.powf(1.0 / p) + gb.powf(1.0 / p);
    let quad_err = pow_err(sum, 1.0 / p, e_sum)
        + pow_err(fa, 1.0 / p, e_fa)
        + pow_err(gb, 1.0 / p, e_gb);
    Ok(InequalityReport::new(
        InequalityKind::Minkowski,
        lhs,
        rhs,
        rhs - lhs,
        quad_err,
    ))
}

/// Detects the curvature of `phi` on `[lo, hi]` from centered second
/// differences at `GRID_SAMPLES` interior points. Mixed signs beyond
/// the tolerance refuse to guess. The tolerance is relative to the
/// largest observed difference (narrow windows make all of them tiny
/// without making the sign pattern less meaningful), plus a rounding
/// floor so an exactly linear function counts as convex rather than
/// noise. A degenerate window also counts as convex: every comparison
/// it feeds is an equality there.
fn detect_shape(phi: &Func, lo: f64, hi: f64) -> Result<Shape> {
    if !(hi > lo) {
        return Ok(Shape::Convex);
    }
    let delta = (hi - lo) / (4.0 * (GRID_SAMPLES + 1) as f64);
    let mut diffs = Vec::with_capacity(GRID_SAMPLES);
    let mut d2_scale = 0.0_f64;
    let mut phi_scale = 0.0_f64;
    for i in 1..=GRID_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / (GRID_SAMPLES + 1) as f64;
        let (vl, vc, vr) = (phi.eval(x - delta)?, phi.eval(x)?, phi.eval(x + delta)?);
        let d2 = vl - 2.0 * vc + vr;
        d2_scale = d2_scale.max(d2.abs());
        phi_scale = phi_scale.max(vl.abs()).max(vc.abs()).max(vr.abs());
        diffs.push(d2);
    }
    let thr = SHAPE_TOL * d2_scale + 32.0 * f64::EPSILON * phi_scale;
    if diffs.iter().all(|&d| d >= -thr) {
        Ok(Shape::Convex)
    } else if diffs.iter().all(|&d| d <= thr) {
        Ok(Shape::Concave)
    } else {
        Err(Error::ShapeIndeterminate)
    }
}

/// Jensen: with weight `|h|` of positive mass, a convex `phi` satisfies
/// `phi(mean of g) <= mean of phi(g)`; a concave `phi` reverses it.
/// `shape` of `None` detects the curvature of `phi` over the sampled
/// range of `g` and fails loudly when it is mixed.
pub fn jensen(
    g: &Func,
    h: &Func,
    phi: &Func,
    shape: Option<Shape>,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    let (a, b) = cx.validated()?;
    if a == b {
        return Err(Error::ZeroWeightMass);
    }
    let (mass, e_mass) = cx.integral(|x| Ok(h.eval(x)?.abs()))?;
    if !(mass > 0.0) {
        return Err(Error::ZeroWeightMass);
    }
    let (num, e_num) = cx.integral(|x| Ok(g.eval(x)? * h.eval(x)?.abs()))?;
    let mean = num / mass;

    let shape = match shape {
        Some(s) => s,
        None => {
            let mut lo = mean;
            let mut hi = mean;
            for x in cx.check_grid(a, b)? {
                let v = g.eval(x)?;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            detect_shape(phi, lo, hi)?
        }
    };

    let lhs = phi.eval(mean)?;
    let (int_phi, e_phi) = cx.integral(|x| Ok(phi.eval(g.eval(x)?)? * h.eval(x)?.abs()))?;
    let rhs = int_phi / mass;

    // First-order error budget: the mean moves by (e_num + |mean| *
    // e_mass) / mass, and phi amplifies that by its local slope.
    let e_mean = (e_num + mean.abs() * e_mass) / mass;
    let dm = 1e-8 * (1.0 + mean.abs());
    let slope = match (phi.eval(mean + dm), phi.eval(mean - dm)) {
        (Ok(up), Ok(dn)) => ((up - dn) / (2.0 * dm)).abs(),
        _ => 1.0,
    };
    let quad_err = slope * e_mean + (e_phi + rhs.abs() * e_mass) / mass;

    let slack = match shape {
        Shape::Convex => rhs - lhs,
        Shape::Concave => lhs - rhs,
    };
    let mut report = InequalityReport::new(InequalityKind::Jensen, lhs, rhs, slack, quad_err);
    report.shape = Some(shape);
    Ok(report)
}

/// Hermite-Hadamard: with a nonnegative weight `w` of positive mass
/// and convex `f`, the weighted mean of `f` is pinched between `f` at
/// the weighted center and the chord through `(a, f(a))`, `(b, f(b))`:
///
/// ```text
/// f(c) <= (int f w) / W <= ((b - c) f(a) + (c - a) f(b)) / (b - a),
/// c = (int t w) / W,  W = int w.
/// ```
///
/// A concave `f` reverses both bounds. The report's `lhs`/`rhs` are the
/// outer chain terms; `slack` is the smaller of the two gaps.
pub fn hermite_hadamard(
    f: &Func,
    w: &Func,
    shape: Option<Shape>,
    cx: &InequalityContext,
) -> Result<InequalityReport> {
    let (a, b) = cx.validated()?;
    if a == b {
        return Err(Error::ZeroWeightMass);
    }
    for x in cx.check_grid(a, b)? {
        let v = w.eval(x)?;
        if v < -WEIGHT_TOL {
            return Err(Error::NegativeWeight { at: x, value: v });
        }
    }
    let (mass, e_mass) = cx.integral(|x| w.eval(x))?;
    if !(mass > 0.0) {
        return Err(Error::ZeroWeightMass);
    }
    let (num, e_num) = cx.integral(|x| Ok(x * w.eval(x)?))?;
    let center = num / mass;
    let (int_f, e_f) = cx.integral(|x| Ok(f.eval(x)? * w.eval(x)?))?;

    let shape = match shape {
        Some(s) => s,
        None => detect_shape(f, a, b)?,
    };

    let lower = f.eval(center)?;
    let mid = int_f / mass;
    let upper = ((b - center) * f.eval(a)? + (center - a) * f.eval(b)?) / (b - a);

    let e_center = (e_num + center.abs() * e_mass) / mass;
    let dc = 1e-8 * (1.0 + center.abs());
    let slope = match (f.eval(center + dc), f.eval(center - dc)) {
        (Ok(up), Ok(dn)) => ((up - dn) / (2.0 * dc)).abs(),
        _ => 1.0,
    };
    let e_mid = (e_f + mid.abs() * e_mass) / mass;
    let e_upper = e_center * (f.eval(a)?.abs() + f.eval(b)?.abs()) / (b - a);
    let quad_err = slope * e_center + e_mid + e_upper;

    let slack = match shape {
        Shape::Convex => (mid - lower).min(upper - mid),
        Shape::Concave => (lower - mid).min(mid - upper),
    };
    let mut report =
        InequalityReport::new(InequalityKind::HermiteHadamard, lower, upper, slack, quad_err);
    report.shape = Some(shape);
    report.chain = Some(HhChain {
        lower,
        mid,
        upper,
        center,
    });
    Ok(report)
}
