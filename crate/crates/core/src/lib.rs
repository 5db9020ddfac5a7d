//! Exact truncated Hahn series over the rationals and Mahler functional
//! equations `sum_i P_i(x) F(x^(g^i)) = A(x)`.
//!
//! Exponents are formal combinations of monomials in rational or symbolic
//! scales; coefficients are exact rationals. Every comparison between
//! symbolic exponents is decided by interval refinement or reported as an
//! error, never guessed.

pub mod error;
pub mod exponent;
pub mod rational;
pub mod series;
pub mod poly;
pub mod linalg;
pub mod equation;
pub mod solver;
pub mod decompose;
pub mod combine;
pub mod rationality;
pub mod json;

pub use combine::{build_span, combine_bases, guess_equation, ClosureOrder, Combined, SpanBasis};
pub use decompose::{canonical_representative, class_component_preserves_equation, class_count_bound, decompose, rescale_to_lattice, same_class, SupportClass};
pub use equation::{
    admissible_valuations, check_equation, homogenize, invert_base, normalize_leading, shift_equation, Base, FracPoly,
    MahlerEquation, Transformed, Verdict,
};
pub use error::{Error, Result};
pub use exponent::{exp_add, exp_compare, exp_scale_mul, Exponent, Interval, Monomial, RationalScale, Scale, ScaleContext, SymbolicScale};
pub use rational::Rational;
pub use rationality::{
    certify_rational, extract_inner_series, joint_valuation_consistency, lattice_intersection_filter, padic_witness, JointOutcome,
    RationalCertificate, ValuationObstruction,
};
pub use series::{Cutoff, SupportSet, TruncatedHahnSeries};
pub use solver::{solve_equation, solve_laurent, ObstructionReason, SolveOutcome};
