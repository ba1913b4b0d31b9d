//! Information-theoretic bounds for binary linear block codes and LDPC
//! ensembles transmitted over memoryless binary-input output-symmetric
//! channels: upper bounds on achievable rates, lower bounds on the asymptotic
//! parity-check density and lower bounds on the bit error probability.

pub mod analysis;
pub mod channels;
pub mod ensembles;
pub mod error;
pub mod numerics;
pub mod quantized;
pub mod report;
pub mod unquantized;

pub use error::{Error, Result};
