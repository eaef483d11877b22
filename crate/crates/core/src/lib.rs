//! Nonlinear modal analysis of graphene plates and carbon nanotubes with a
//! rotation-free isogeometric Kirchhoff-Love shell core.
//!
//! The crate combines
//! - an anisotropic hyperelastic membrane + Canham bending constitutive law
//!   for graphene, calibrated to ab-initio data,
//! - NURBS surface discretizations (square plates, circular disks, CNT
//!   cylinders) with full first/second basis derivatives,
//! - static Newton continuation over pre-stretch, compression, and adhesion
//!   load programs,
//! - a symmetric generalized eigensolver for the tangent/mass pencil with
//!   mode tracking across load steps, and
//! - closed-form plate-frequency oracles (rectangular and circular) used for
//!   verification.
//!
//! Units are nm / nN / ps throughout (mass unit nN·ps²/nm = 1e-24 kg), so
//! membrane moduli are in N/m, bending moduli in nN·nm, and frequencies come
//! out directly in THz.

pub mod analytical;
pub mod assembly;
pub mod contact;
pub mod discretization;
pub mod geometry;
pub mod linalg;
pub mod material;
pub mod solvers;

mod error;

pub use error::CoreError;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
