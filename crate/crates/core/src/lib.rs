//! Numerical toolkit for isoperimetric lower bounds of spherically symmetric
//! measures with density proportional to `exp(-phi(|x|))` on R^n.
//!
//! The crate is organized around the objects the bounds are built from:
//!
//! * [`potential`] — the convex radial potential `phi` and its hypothesis classes,
//! * [`radial`] — the radial law with density `r^(n-1) exp(-phi(r))`,
//! * [`profile`] — comparison profiles (`I_phi`, `L_phi`, `L_alpha`, Gaussian),
//! * [`bounds`] — certified lower bounds on the isoperimetric function,
//! * [`witness`] — achievable upper bounds from half-spaces and centered balls,
//! * [`sweep`] — batch experiment driver behind the `isoprof` CLI.

pub mod bounds;
pub mod config;
pub mod error;
pub mod gauss;
pub mod ledger;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod radial;
pub mod rootfind;
pub mod sweep;
pub mod witness;

pub use bounds::{BoundCertificate, Route};
pub use error::{Error, Result};
pub use ledger::{ConstantsLedger, Provenance};
pub use potential::Potential;
pub use profile::{ProfileFn, ProfileKind};
pub use quad::QuadraturePlan;
pub use radial::RadialMeasure;
