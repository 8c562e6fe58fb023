//! Combinatorial configurations for peer-to-peer user-private information
//! retrieval (P2P UPIR): construction and validation, neighborhood anonymity
//! analysis, protocol simulation, and intersection attacks.
//!
//! ```
//! use upir_core::anonymity::{anonymity_partition, Mode};
//! use upir_core::constructions::pappus;
//!
//! let td = pappus().unwrap();
//! let open = anonymity_partition(td.config(), Mode::Open);
//! assert_eq!(open.level, 3);
//! ```

pub mod adversary;
pub mod anonymity;
pub mod cfg_format;
pub mod constructions;
pub mod error;
pub mod field;
pub mod incidence;
pub mod par;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
pub use incidence::{as_configuration, validate, Configuration, IncidenceStructure, Parameters, PointSet};

/// Crate version, stamped into every trace.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
