pub mod disk;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod quadrature;
mod roots;
pub mod specfun;
pub mod trial;

pub use disk::{DiskEigen, DiskSpectrum};
pub use error::{Error, Result};
pub use fem::{EigenResult, MeshSpec};
pub use geometry::{ArclengthTable, Constraint, DomainShape, GeometrySummary};
pub use specfun::{BesselProvider, Standard as StandardBessel};
pub use trial::{Branch, CriticalCouplingBounds, HypothesisFlags, IsoelasticReport, OrthogonalityResiduals, TrialBoundReport};
