//! Exact truncated-series engine for deformation quantization on polynomial charts of ℝ^d.

pub mod coeff;
pub mod dgla;
pub mod error;
pub mod fedosov;
pub mod gauge;
pub mod hochschild;
pub mod hseries;
pub mod matrix;
pub mod mono;
pub mod ode;
pub mod polyvector;
pub mod profile;
pub mod random;
pub mod report;
pub mod scenario;
pub mod star;
pub mod suite;
pub mod text;
pub mod weyl;

pub use coeff::CRational;
pub use error::{Error, Result};
pub use hochschild::{DiffAlgebra, PolyDiffOp};
pub use hseries::{HSeries, TruncPoly};
pub use mono::{Exps, GSet};
pub use profile::Profile;
pub use weyl::{WMono, WeylElement};
