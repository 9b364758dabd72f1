//! Iwahori–Hecke algebras of extended affine Weyl groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`ringcore`]: the coefficient ring `Z[v, v^-1]`, `q = v^2`;
//! * [`rootdatum`]: lattices with torsion, roots, the finite Weyl group;
//! * [`affweyl`]: the extended affine Weyl group, lengths, reduced words;
//! * [`hecke`]: the Iwahori–Matsumoto basis and its multiplication;
//! * [`bernstein`]: Bernstein elements, the dot-action and orbit sums;
//! * [`parahoric`]: facet subalgebras, their centers, Satake tables.

pub mod affweyl;
pub mod bernstein;
pub mod bundled;
pub mod error;
pub mod hecke;
pub mod intlin;
pub mod parahoric;
pub mod ringcore;
pub mod rootdatum;

pub use affweyl::ExtWeylElt;
pub use bernstein::{BernsteinElt, GroupAlgElt};
pub use error::{DatumError, Error, Result, RingError};
pub use hecke::{HeckeAlgebra, HeckeElt};
pub use parahoric::{FacetType, SatakeRow, SatakeTable};
pub use ringcore::LaurentPoly;
pub use rootdatum::{Datum, DatumConfig, LatticeElt};
