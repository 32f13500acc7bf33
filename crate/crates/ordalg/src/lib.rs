//! Order algebras: semiring-weighted linear combinations of finite
//! preordered plays over arenas with permutation groups, and a located
//! piI-calculus whose testing equivalence is decided through them.

pub mod algebra;
pub mod arenas;
pub mod basis;
pub mod error;
pub mod event;
pub mod exponential;
pub mod picalc;
pub mod plays;
pub mod semiring;

pub use error::{Error, Result};
