//! Exact avalanche polynomials of the abelian sandpile model.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is exact: grain
//! counts and toppling vectors are machine integers, polynomial coefficients
//! and determinants are arbitrary-precision integers.
//!
//! Two independent routes compute the multivariate avalanche polynomial of a
//! graph:
//!
//! * [`avalanche::avalanche_polynomial`] enumerates every recurrent sandpile
//!   (filtered by the burning test), simulates every principal avalanche and
//!   adds up the resulting monomials;
//! * [`families`] builds the same polynomial in closed form for trees, cycles,
//!   complete graphs and wheels.
//!
//! ```
//! use avalanche_core::{avalanche, families, graph::Graph};
//!
//! let c3 = Graph::cycle(3).unwrap();
//! let brute = avalanche::avalanche_polynomial(&c3, 1_000).unwrap();
//! assert_eq!(brute, families::cycle_poly(3).unwrap());
//! assert_eq!(brute.to_string(), "2*x1*x2 + x1 + x2 + 2");
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod avalanche;
pub mod error;
pub mod families;
pub mod graph;
pub mod matrix;
pub mod parking;
pub mod poly;
pub mod reconstruct;
pub mod sandpile;

pub use error::{Error, Result};
pub use graph::Graph;
pub use poly::{MultiPoly, UniPoly};
pub use sandpile::{Sandpile, TopplingVector};

/// Default guard on the number of stable states an exhaustive enumeration
/// may visit.
pub const DEFAULT_STATE_LIMIT: u64 = 100_000_000;
