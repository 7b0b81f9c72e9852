//! Exact arithmetic over finite valuation rings and brute-force replay of the
//! counting arguments behind sum-product estimates in those rings.

pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod graph;
pub mod ring;
pub mod seed;
pub mod setops;
pub mod verifier;

pub use config::{Caps, Tolerances};
pub use error::{Error, Result};
pub use ring::{Element, Family, Filter, Ring, RingParams};
pub use setops::ElementSet;
