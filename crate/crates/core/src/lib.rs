//! Analysis toolkit for chemical reaction networks under mass-action kinetics.
//!
//! The crate is `no_std` (with `alloc`) and purely algorithmic:
//!
//! * [`network`] models reaction networks as Euclidean embedded graphs and
//!   answers combinatorial questions (linkage classes, weak reversibility,
//!   production graphs, bimolecular autocatalysis).
//! * [`geometry`] does exact rational convex geometry over complexes and
//!   decides strong endotacticity from the face lattice of the source hull.
//! * [`poly`] and [`dynamics`] build polynomial vector fields, projectivize
//!   them onto the simplex, construct relative-population networks and search
//!   for weakly reversible realizations.
//! * [`simulate`] integrates the resulting ODEs and probes permanence.
//! * [`families`] generates the named network families and golden fixtures.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod families;
pub mod geometry;
pub mod linalg;
pub mod network;
pub mod poly;
pub mod simulate;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use dynamics::{MassActionSystem, RateSpec};
pub use network::{Complex, Reaction, ReactionNetwork, Species};
pub use poly::{Monomial, PolynomialField, SparsePolynomial};
