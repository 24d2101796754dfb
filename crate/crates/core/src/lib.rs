pub mod error;
pub mod families;
pub mod forms;
pub mod numfield;
pub mod recurrences;
pub mod solver;
mod serde_util;
pub mod siegel;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{
    admissible_range, check_Ud_recurrence, coefficient_U, evaluate, form_at, BinaryForm,
    TwistedFamily,
};
pub use numfield::{
    EmbeddingSet, FieldElement, FieldExt, IntPolynomial, NumberField, RatPolynomial,
};
pub use families::{BernsteinHasseParams, Descriptor, ShanksParams};
pub use solver::{SearchBox, SearchResult, Solution};
pub use verify::{run_suite, Suite, SuiteReport};
