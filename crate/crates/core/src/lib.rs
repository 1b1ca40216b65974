//! Wach modules and mod-p reductions of two-dimensional crystalline representations.

pub mod error;
pub mod field;
pub mod literal;
pub mod padic;
pub mod residue;

pub use error::{Error, Result};
pub use field::{Field, FieldParams};
pub use padic::PadicElem;
pub mod resseries;
pub mod series;

pub use resseries::ResidueSeries;
pub use series::{Modulus, TruncSeries};
pub mod matrix;
pub use matrix::{Algebra, Mat};
pub mod phigamma;
pub use phigamma::{PhiGammaPair, Provenance, ResiduePair};
pub mod exec;
pub mod linalg;
pub use exec::Exec;
pub mod cache;
pub mod modp;
pub mod reduce;
pub mod seed;
pub mod wach;
