//! Graph groups (right-angled Artin groups) and the fixed points of their
//! endomorphisms.
//!
//! Elements are canonical reduced traces ([`trace`]), morphisms are given by
//! generator images ([`morphism`]), and [`fixpoint`] ties these together with
//! the abelian ([`abelian`]) and free-group ([`freesub`]) layers to decide,
//! from the independence graph alone, whether every endomorphism has a
//! finitely generated fixed subgroup.

pub mod abelian;
pub mod alphabet;
pub mod error;
pub mod fixpoint;
pub mod freesub;
pub mod morphism;
pub mod trace;

pub use alphabet::{Alphabet, Classification, Gen, GraphGroup, IndependenceRelation};
pub use error::{Error, Result};
pub use morphism::Morphism;
pub use trace::{GroupElement, Letter, Word};
