//! Subelliptic heat kernel of the octonionic anti-de Sitter fibration
//! `S^7 -> AdS^15(O) -> OH^1`.
//!
//! The kernel `p_t(r, eta)` of the radial sub-Laplacian
//!
//! ```text
//! L = d^2/dr^2 + (7 coth r + 7 tanh r) d/dr + tanh^2 r (d^2/d eta^2 + 6 cot eta d/d eta)
//! ```
//!
//! is computed through two independent integral representations (one built on
//! the continued `S^7` kernel and `q_{t,15}`, one on a mode series and
//! `q_{t,9}`), and checked against the heat equation, the invariant measure,
//! and a Monte Carlo simulation of the radial diffusion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fiber;
pub mod hyperbolic;
pub mod mc;
pub mod octonion;
pub mod quadrature;
pub mod special;
pub mod subelliptic;

pub use error::{Error, Result};
pub use fiber::{SeriesControl, SeriesMode};
pub use subelliptic::{KernelPoint, KernelResult, QuadratureSpec};
