pub mod error;
pub mod formats;
pub mod linalg;
pub mod hybrid;
pub mod range;
pub mod search;

pub use error::{Error, Result};
pub use hybrid::{CodeCertificate, CodeOutcome, HybridCode, QuantumChannel};
pub use linalg::{ComplexMatrix, HermitianMatrix, PartialIsometry, Spectrum};
pub use range::{CertificateType, HermitianTuple, NotFound, Outcome, RangeBox, Witness};
pub use search::{SearchOptions, SearchReport};
