//! Exact phase-space calculus for polynomial observables.
//!
//! Classical observables are Weyl symbols ([`PhasePolynomial`]) over the ring
//! of Gaussian rationals extended by Laurent powers of a formal `hbar`.
//! Quantum observables ([`OperatorPolynomial`]) live in the canonical
//! commutation algebra in standard order. Symmetric (Weyl) quantization and
//! dequantization connect the two, and intertwine the operator product with
//! the star product:
//!
//! ```
//! use weylstar::{dequantize, quantize, star, parse_classical};
//!
//! let q = parse_classical("q0", 1).unwrap();
//! let p = parse_classical("p0", 1).unwrap();
//! let qp = star(&q, &p).unwrap();
//! assert_eq!(qp.to_string(), "q0*p0 + 1/2*i*hbar");
//! assert_eq!(dequantize(&(&quantize(&q) * &quantize(&p))), qp);
//! ```

pub mod classicality;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod phase;
pub mod scalar;
pub mod star;
pub mod syntax;
pub mod weyl;

pub use classicality::{
    classicality_check, consistency_check, error_ket_norm, expectation, gaussian_moment, interval_probability,
    mixed_error_ket_norm, propagate_error, ClassicalDatum, ClassicalityReport, GaussianState, ModeGaussian,
};
pub use dynamics::{
    canonical_invariance_check, conjugate_by_unitary, eom_residual, hamilton_rhs, heisenberg_series, poisson_series,
    unitary_series, EvolutionSeries, UnitarySeries,
};
pub use error::{Error, Result};
pub use operator::{op_heisenberg_series, OperatorPolynomial, OperatorWord, SymmetrizedExpansion};
pub use phase::{Monomial, PhasePolynomial, Var, VarKind};
pub use scalar::{Coefficient, GaussianRational};
pub use star::{janus_power, moyal_bracket, star};
pub use syntax::{parse_classical, parse_operator};
pub use weyl::{dequantize, dequantize_via_star, quantize, taylor_identity_check};
