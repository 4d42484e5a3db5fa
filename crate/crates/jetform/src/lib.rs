//! Finite-order jet-bundle variational calculus with exact arithmetic.
//!
//! Scalars are polynomials over jet coordinates ([`symexpr`]), forms live in
//! the contact basis `{dx^i, ω^σ_J}` ([`forms`]). On top of that sit the
//! interior Euler and residual operators ([`interior_euler`]), the
//! variational-morphism splittings ([`varmorph`]) and Lepage equivalents
//! ([`lepage`]). [`frontend`] parses, prints and verifies.

pub mod corpus;
pub mod error;
pub mod forms;
pub mod frontend;
pub mod interior_euler;
pub mod lepage;
pub mod multiindex;
pub mod symexpr;
pub mod varmorph;

pub use error::{JetError, Result};
pub use forms::{Covector, Form};
pub use multiindex::{CoefficientTensor, MultiIndex};
pub use symexpr::{BundleContext, Coord, Expr, Q};
