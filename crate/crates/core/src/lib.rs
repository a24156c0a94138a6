//! Closed-geodesic counting on compact hyperbolic surfaces.
//!
//! The geometry layer ([`hyperbolic`], [`group`]) is generic over [`Scalar`];
//! the aliases below fix it to `f64`, which is what the enumeration, counting
//! and measure layers use.

pub mod counting;
pub mod domain;
pub mod enumerate;
pub mod equidist;
pub mod error;
pub mod fit;
pub mod flowbox;
pub mod group;
pub mod hyperbolic;
pub mod measure;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod spectrum;
pub mod sweep;
pub mod tol;
pub mod word;

pub use error::{GeoError, Result};
pub use scalar::Scalar;
pub use word::{canonical_conj_form, primitive_root, ConjClass, Letter, Word};

pub type Point = hyperbolic::Point<f64>;
pub type BoundaryPoint = hyperbolic::BoundaryPoint<f64>;
pub type Isometry = hyperbolic::Isometry<f64>;
pub type GeodesicLine = hyperbolic::GeodesicLine<f64>;
pub type UnitVector = hyperbolic::UnitVector<f64>;
pub type FuchsianRep = group::FuchsianRep<f64>;
