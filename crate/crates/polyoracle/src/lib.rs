//! Exact-arithmetic oracle for transfer-function zero structure.
//!
//! Everything here computes over the rationals with no floating point:
//! polynomial matrices, the Smith and Smith-McMillan forms, minimal
//! polynomial bases of kernels (Forney-certified), and exact matrix
//! fractions of rational state-space data. The floating pipeline is checked
//! against these results; nothing in this crate depends on it.

pub mod minbasis;
pub mod poly;
pub mod polymat;
pub mod ratmat;
pub mod smith;
pub mod ss;

pub use minbasis::{degmin, minimal_kernel_basis};
pub use poly::{parse_rat, rat, rat_int, rat_to_f64, Poly, Rat};
pub use polymat::PolyMatrix;
pub use ratmat::RatMatrix;
pub use smith::{factor_roots, smith_form, smith_mcmillan, RootLoc, SmithMcMillan};
pub use ss::{ss_to_rational, RationalStateSpace};
