//! Exact computer algebra for quasi-homogeneous polynomial ODE systems.
//!
//! The crate analyses systems `dxᵢ/dz = fᵢ(x, z) + gᵢ(x, z)` whose principal
//! part `f` is quasi-homogeneous for a weight vector `(p₁,…,p_m, r)`:
//!
//! * [`system`] — the system model, input format and assumption checks;
//! * [`balances`] — leading coefficients of pole-type solutions;
//! * [`kovalevskaya`] — Kovalevskaya matrices and exponents;
//! * [`series`] — Laurent series recursion and Painlevé-test verdicts;
//! * [`charts`] — weighted projective charts and fixed points at infinity;
//! * [`normalform`] — linear preparation, unstable manifolds and
//!   Poincaré–Dulac normal forms at those fixed points;
//! * [`blowup`] — weighted blow-ups, gluing maps and induced cyclic actions;
//! * [`hierarchy`] — the first Painlevé hierarchy and its closed forms;
//! * [`report`] — JSON and plain-text reports of every stage.
//!
//! All algebra is generic over a coefficient [`Field`](scalar::Field);
//! exact work uses [`Rational`] and the radical extensions of
//! [`Surd`](surd::Surd). The aliases below name the common instantiations.

pub mod balances;
pub mod blowup;
pub mod charts;
pub mod error;
pub mod expr;
pub mod hierarchy;
pub mod kovalevskaya;
pub mod lpoly;
pub mod matrix;
pub mod numeric;
pub mod normalform;
pub mod poly;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod surd;
pub mod system;

pub use error::{KovaError, Result};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;
/// Polynomials with rational coefficients.
pub type QPoly = poly::MultiPoly<Rational>;
/// Polynomials with coefficients in a radical extension of ℚ.
pub type SPoly = poly::MultiPoly<surd::Surd>;
/// Exact rational matrices.
pub type QMatrix = matrix::Matrix<Rational>;
/// Matrices over a radical extension of ℚ.
pub type SMatrix = matrix::Matrix<surd::Surd>;
/// Rational root sets.
pub type QRootSet = roots::RootSet<Rational>;
/// Systems with rational coefficients.
pub type QSystem = system::WeightedSystem<Rational>;
