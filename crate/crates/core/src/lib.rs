//! Explicit generator matrices for the irreducible finite-dimensional
//! representations `(p, q)` of the quantum algebra `U_t(sl3)`, built in the
//! gauge where the first lowering generator is canonical on every vertical
//! line of the weight diagram, together with relation checkers and
//! independent ground-truth constructions.
//!
//! The crate is `no_std` (it needs `alloc`). All floating-point math goes
//! through [`libm`].
//!
//! Layering, bottom-up:
//!
//! * [`qnum`]: q-brackets and the canonical `sl2` matrix element.
//! * [`diagram`]: the hexagonal weight diagram, multiplicities and strands.
//! * [`primitive`]: closed-form blocks, coefficient families, boundary
//!   columns, and the numeric coefficient solvers.
//! * [`assembly`]: global basis and the six generator matrices.
//! * [`verify`]: residual engine producing [`verify::VerificationReport`]s.
//! * [`oracle`]: Gelfand-Tsetlin counting and the Gram-matrix construction.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod diagram;
mod error;
pub mod linalg;
pub mod oracle;
pub mod primitive;
pub mod qnum;
pub mod sparse;
pub mod verify;

pub use assembly::{assemble, assemble_with, BasisEntry, BasisIndex, GeneratorSet};
pub use diagram::{build_diagram, Diagram, DiagramPoint, Region, RepLabel};
pub use error::{Error, Result};
pub use primitive::Variant;
pub use qnum::QParam;
pub use sparse::SparseMatrix;
