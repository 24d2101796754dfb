//! Exact arithmetic in `Q[X]/(f)` together with certified complex embeddings.

pub mod ball;
mod field;
pub mod poly;
pub mod roots;
pub mod sturm;

pub use field::{determinant, EmbeddingSet, FieldElement, FieldExt, NumberField};
pub use poly::{IntPolynomial, RatPolynomial};
