//! Hard-sphere configuration spaces of finite metric spaces: filtrations,
//! Z/2 persistence, covering cocycles and their characteristic classes,
//! lower bounds for (k,r)-regular maps, and packing queries.

pub mod cli;
pub mod cochain;
pub mod combinatorics;
pub mod complex;
pub mod config;
pub mod covering;
pub mod error;
pub mod export;
pub mod linalg;
pub mod metric;
pub mod obstruction;
pub mod packing;
pub mod persistence;
pub mod regular;
pub mod union_find;

pub use error::{Error, Result};
