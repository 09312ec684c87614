//! Certified norms of Lip-Linear operators on finite pointed metric spaces.
//!
//! Everything is exact: metric spaces carry rational distances, Banach spaces
//! are polyhedral (given by the vertices of their dual unit ball), and every
//! norm reduces to a linear program or a finite maximum over polytope
//! vertices. Where a quantity is not a finite LP (the `q > 1` summing norms)
//! it is returned as a certified two-sided enclosure.

pub mod cli;
pub mod config;
pub mod error;
pub mod integral;
pub mod linalg;
pub mod lp;
pub mod operators;
pub mod random;
pub mod rational;
pub mod spaces;
pub mod summing;

pub use config::Caps;
pub use error::{Error, Result};
pub use rational::{Bounds, Rational};
