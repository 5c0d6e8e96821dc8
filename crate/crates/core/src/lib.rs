pub mod ackfun;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod format;
pub mod oracle;
pub mod patterns;
pub mod vcdim;

pub use domain::{
    BlockedSequence, FormationMode, FormationWitness, FunctionMatrix, Matrix01, PermFamily,
    Permutation, PermutationMatrix, RowPartition,
};
pub use error::{Error, Result};
