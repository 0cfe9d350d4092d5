//! Zero-module structure of proper rational transfer functions, computed
//! directly from state-space realizations.
//!
//! The crate is organized bottom-up:
//! * [`matrix`], [`svd`], [`qr`], [`schur`], [`solve`] — the dense complex
//!   linear-algebra substrate (rank-revealing factorizations, Sylvester /
//!   Lyapunov / Riccati solvers);
//! * [`subspace`] — the subspace lattice the geometric objects live in;
//! * [`ss`] — realization algebra for `F(z) = D + C (zI - A)^{-1} B`;
//! * [`geometry`] — output-nulling and input-containing invariant subspaces;
//! * [`zeros`] — the zero pencil, kernel structure, indices and the full
//!   zero report (finite zeros, infinite zeros, kernel and image defects);
//! * [`inner`] — kernel inner functions, square inner extensions and the
//!   right/left reductions producing a square invertible function;
//! * [`sample`] — seeded generators for verification batches.

pub mod error;
pub mod geometry;
pub mod inner;
pub mod matrix;
pub mod qr;
pub mod sample;
pub mod schur;
pub mod solve;
pub mod ss;
pub mod subspace;
pub mod svd;
pub mod zeros;

pub use error::{Error, Result};
pub use matrix::{Matrix, Tolerance};
pub use ss::{EvalGrid, StateSpace};
pub use subspace::Subspace;
