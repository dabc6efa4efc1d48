//! Modeloids, inverse semigroups and free-logic inverse categories, with the derivative
//! operators on each, and an algebraic decision procedure for Ehrenfeucht-Fraïssé
//! equivalence of finite relational structures.

pub mod catmod;
pub mod chain;
pub mod efgames;
pub mod error;
pub mod freecat;
pub mod invsemi;
pub mod modeloid;
pub mod pbij;
pub mod random;
pub mod structfmt;
mod text;

pub use chain::DerivativeChain;
pub use error::{Error, Result};
