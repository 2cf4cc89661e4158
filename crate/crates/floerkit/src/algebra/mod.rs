//! Finite groups, words over surface-group generators, and mapping classes
//! acting on π₁(Σ_g).

mod auto;
mod group;
mod word;

pub use auto::SurfaceAutomorphism;
pub use group::{Elem, FiniteGroup, GroupError};
pub use word::{a, b, dehn_reduce, free_conjugate_test, free_conjugator, surface_equal, surface_trivial, Word};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("genus mismatch: expected {expected}, found {found}")]
    GenusMismatch { expected: usize, found: usize },
    #[error("letter {letter} is not a generator at genus {genus}")]
    BadLetter { letter: i32, genus: usize },
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
}
