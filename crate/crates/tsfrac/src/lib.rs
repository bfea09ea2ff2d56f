//! Fractional calculus on bounded time scales.
//!
//! The crate implements a conformable fractional derivative and integral
//! of order `alpha` in `(0, 1]` on time scales (closed subsets of the
//! reals), together with two chain rules and a family of weighted
//! integral inequalities (Holder, Cauchy-Schwarz, reversed Holder,
//! Minkowski, Jensen, Hermite-Hadamard).
//!
//! Modules:
//! - [`timescale`]: scale representation, jump operators, mini-language
//! - [`expr`]: expression DSL, evaluation, symbolic differentiation
//! - [`calculus`]: fractional derivative and integral, pointwise checks
//! - [`chain`]: chain rules and image scales
//! - [`inequalities`]: weighted integral inequality reports

// Validation sites write `!(x > 0.0)` on purpose: unlike `x <= 0.0`,
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod chain;
pub mod error;
pub mod expr;
pub mod inequalities;
mod quad;
pub mod timescale;

pub use calculus::{
    delta_derivative, frac_derivative, frac_derivative_order_zero, frac_integral,
    verify_epsilon_delta, verify_sigma_formula, DerivMethod, FracDerivResult, FracIntegralResult,
};
pub use chain::{chain_rule_i, chain_rule_ii, check_cr2_hypothesis, image_scale, ChainReport};
pub use error::{Error, Result};
pub use expr::{Expr, Func};
pub use inequalities::{
    cauchy_schwarz, hermite_hadamard, holder, jensen, minkowski, reversed_holder, HhChain,
    InequalityContext, InequalityKind, InequalityReport, Shape,
};
pub use timescale::{Density, PointClass, Segment, TimeScale, MEMBERSHIP_TOL};
