//! Exact derivation and analysis of H-type magic-state distillation maps
//! built from CSS codes, with a dense-state oracle and a stabilizer
//! reduction procedure for multi-qubit inputs.

pub mod analysis;
pub mod bloch;
pub mod cli;
pub mod codes;
pub mod distill;
pub mod error;
pub mod knownmaps;
pub mod oracle;
pub mod poly;
pub mod stabreduce;

pub use bloch::{BlochVector, ErrorRate, RegionLabel, SingleQubitDensity};
pub use codes::{Bitword, CodewordSet, PairWeightTable};
pub use distill::DistillationMap;
pub use error::{Error, Result};
