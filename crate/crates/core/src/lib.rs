//! Point-regular automorphism groups of the Payne derived quadrangle of the
//! symplectic quadrangle W(q): exact field arithmetic, the quadrangles, the
//! group constructions, and their invariants.

pub mod cli;
pub mod closure;
pub mod constructions;
pub mod error;
pub mod gf;
pub mod group;
pub mod invariants;
pub mod linalg;
pub mod linpoly;
pub mod quadrangle;
pub mod report;
pub mod tables;

pub use constructions::{Construction, ConstructionConfig, ConstructionParams, Variant};
pub use error::{Error, Result};
pub use gf::{FieldCtx, FieldElem, Frob};
pub use group::{GroupElem, GroupSpec};
