//! Exact weight calculus on free-group actions: weights and their `F` functional,
//! Markov measures on `A^G`, denominator-n rounding and realization, block-model
//! samplers over permutation tuples, and exact good-model counting.

pub mod alphabet;
pub mod budget;
pub mod census;
pub mod error;
pub mod json;
pub mod markov;
pub mod random;
pub mod rational;
pub mod realize;
pub mod rng;
pub mod sampler;
pub mod weights;
pub mod words;

pub use alphabet::Alphabet;
pub use budget::Budget;
pub use error::{Error, Result};
pub use markov::{MarkovMeasure, Observable, Window};
pub use rational::Q;
pub use weights::{DenominatorNWeight, Weight};
pub use words::{Letter, Subtree, Word};
pub use realize::{BallLabeling, Homomorphism, Labeling};
