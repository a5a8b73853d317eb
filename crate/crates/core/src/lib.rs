//! Exact Brauer-algebra projectors and trace-form Casimir elements for the
//! orthogonal and symplectic Lie algebras.
//!
//! The crate builds the symmetrizer and anti-symmetrizer of the Brauer
//! algebra, lets them act on tensor powers of the defining representation,
//! forms `tr C (F_1 + u_1) ... (F_m + u_m)` over the universal enveloping
//! algebra, and computes Harish-Chandra images through PBW normal forms.
//! All arithmetic is exact.

pub mod brauer;
pub mod casimir;
pub mod exec;
pub mod liealg;
pub mod ring;
pub mod suites;
pub mod symfun;
pub mod tensor;

pub use brauer::{BrauerElement, Diagram, GenWord, Generator};
pub use casimir::{CasimirSpec, OmegaMode, Projector, Shifts, VerificationReport};
pub use liealg::{LieBasis, Uea};
pub use ring::{MPoly, Poly, RatFunc, Rational, Ring, RingError, Var};
pub use tensor::{ActionConfig, Family, TensorOp};
