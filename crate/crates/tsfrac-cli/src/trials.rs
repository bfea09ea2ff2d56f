//! Seeded random instances for `verify all`.
//!
//! Each trial draws a scale, a subrange, an order, exponents, and
//! functions from a fixed pool, then runs all six inequality checkers
//! (Jensen twice: once convex, once concave). The pool contains only
//! functions that are positive and bounded away from zero on every
//! generated scale, so a `satisfied = false` report — or any error —
//! indicates a bug in the checkers, never an unlucky draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tsfrac::{
    cauchy_schwarz, hermite_hadamard, holder, jensen, minkowski, reversed_holder, Func,
    InequalityContext, InequalityReport, Result, TimeScale,
};

/// Safe in every slot: positive, nonvanishing, and mild enough that no
/// integral overflows on the bounded scales the generator produces.
pub const POOL: [&str; 4] = ["t", "t^2", "exp(t/4)", "2*t + 1"];

/// Functions for the Hermite-Hadamard slot; `ln(t)` exercises the
/// concave branch (every generated scale point is at least 1/4).
pub const HH_POOL: [&str; 3] = ["t^2", "exp(t/4)", "ln(t)"];

/// Everything one trial depends on, reconstructible from (seed, trial).
#[derive(Debug, Clone, Serialize)]
pub struct TrialDraw {
    pub trial: u64,
    pub scale: String,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub p: f64,
    pub p_reversed: f64,
    pub f: &'static str,
    pub g: &'static str,
    pub h: &'static str,
    pub hh_f: &'static str,
}

/// One checker's outcome within a trial.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledReport {
    pub check: &'static str,
    #[serde(flatten)]
    pub report: InequalityReport,
}

fn spread(seed: u64, trial: u64) -> u64 {
    // Distinct, deterministic stream per trial; the odd multiplier keeps
    // neighboring trial indices far apart in seed space.
    seed.wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// In `(0, 1]`: the unit draw is in `[0, 1)`, so its reflection covers
/// the half-open interval from the other end.
fn unit_open_low(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn scale_text(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => {
            let lo = rng.gen_range(1..=4);
            let hi = lo + rng.gen_range(3..=8);
            format!("Z:{lo}..{hi}")
        }
        1 => {
            let step = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
            let start = 0.25 * rng.gen_range(1..=8) as f64;
            let count = rng.gen_range(5..=12);
            let last = start + step * (count - 1) as f64;
            format!("h:{step}:{start}..{last}")
        }
        2 => {
            let first = rng.gen_range(0..=1);
            let last = first + rng.gen_range(2..=4);
            format!("q:2:{first}..{last}")
        }
        3 => {
            let mut points: Vec<f64> = (0..rng.gen_range(4..=9))
                .map(|_| rng.gen_range(0.5..10.0))
                .collect();
            points.sort_by(f64::total_cmp);
            points.dedup_by(|next, kept| *next - *kept < 0.05);
            while points.len() < 2 {
                points.push(points[points.len() - 1] + 1.0);
            }
            let body: Vec<String> = points.iter().map(|p| p.to_string()).collect();
            format!("set:{{{}}}", body.join(","))
        }
        4 => {
            let lo = rng.gen_range(0.5..3.0);
            let hi = lo + rng.gen_range(1.0..3.0);
            format!("R:{lo}..{hi}")
        }
        _ => {
            let lo = 5.0 + rng.gen_range(0.0..2.0);
            let hi = lo + 1.5;
            format!("union(Z:1..4; R:{lo}..{hi})")
        }
    }
}

/// Regenerates the inputs of trial `trial` under `seed`.
pub fn draw(seed: u64, trial: u64) -> TrialDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(spread(seed, trial));
    let scale = scale_text(&mut rng);
    let ts: TimeScale = scale.parse().expect("generated scale text is well formed");
    let grid = ts.sample_grid(ts.min(), ts.max(), 3);
    let i = rng.gen_range(0..grid.len());
    let j = rng.gen_range(0..grid.len());
    let (a, b) = if grid[i] == grid[j] {
        (ts.min(), ts.max())
    } else {
        (grid[i].min(grid[j]), grid[i].max(grid[j]))
    };
    TrialDraw {
        trial,
        scale,
        a,
        b,
        alpha: unit_open_low(&mut rng),
        p: 1.0 + 4.0 * unit_open_low(&mut rng),
        p_reversed: rng.gen_range(-5.0..-1.0),
        f: POOL[rng.gen_range(0..POOL.len())],
        g: POOL[rng.gen_range(0..POOL.len())],
        h: POOL[rng.gen_range(0..POOL.len())],
        hh_f: HH_POOL[rng.gen_range(0..HH_POOL.len())],
    }
}

/// Runs the seven checks of one trial.
pub fn run_trial(draw: &TrialDraw) -> Result<Vec<LabeledReport>> {
    let ts: TimeScale = draw.scale.parse()?;
    let cx = InequalityContext { ts: &ts, a: draw.a, b: draw.b, alpha: draw.alpha };
    let f = Func::from_text(draw.f)?;
    let g = Func::from_text(draw.g)?;
    let h = Func::from_text(draw.h)?;
    let hh_f = Func::from_text(draw.hh_f)?;
    let convex_phi = Func::from_text("exp(t/4)")?;
    let concave_phi = Func::from_text("ln(t)")?;

    Ok(vec![
        LabeledReport { check: "holder", report: holder(&f, &g, &h, draw.p, &cx)? },
        LabeledReport { check: "cauchy-schwarz", report: cauchy_schwarz(&f, &g, &h, &cx)? },
        LabeledReport {
            check: "reversed-holder",
            report: reversed_holder(&f, &g, &h, draw.p_reversed, &cx)?,
        },
        LabeledReport { check: "minkowski", report: minkowski(&f, &g, &h, draw.p, &cx)? },
        LabeledReport { check: "jensen-convex", report: jensen(&g, &h, &convex_phi, None, &cx)? },
        LabeledReport {
            check: "jensen-concave",
            report: jensen(&g, &h, &concave_phi, None, &cx)?,
        },
        LabeledReport { check: "hermite-hadamard", report: hermite_hadamard(&hh_f, &h, None, &cx)? },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let a = draw(42, 17);
        let b = draw(42, 17);
        assert_eq!(a.scale, b.scale);
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.p, b.p);
        assert_ne!(draw(42, 18).alpha, a.alpha);
    }

    #[test]
    fn generated_scales_parse_and_stay_positive() {
        for trial in 0..60 {
            let d = draw(7, trial);
            let ts: TimeScale = d.scale.parse().unwrap();
            assert!(ts.min() > 0.0, "trial {trial} drew {}", d.scale);
            assert!(d.a < d.b, "trial {trial}: empty range");
            assert!(d.alpha > 0.0 && d.alpha <= 1.0);
            assert!(d.p > 1.0 && d.p <= 5.0);
            assert!(d.p_reversed < -1.0 && d.p_reversed >= -5.0);
        }
    }

    #[test]
    fn a_trial_produces_seven_satisfied_reports() {
        let reports = run_trial(&draw(3, 5)).unwrap();
        assert_eq!(reports.len(), 7);
        for r in &reports {
            assert!(r.report.satisfied, "{} came back violated", r.check);
        }
    }
}
