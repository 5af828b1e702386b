//! Spherical tight frames and the spaces built from them.
//!
//! The crate covers frame verification and group actions ([`frames`]), Gram
//! points and Naimark complements ([`grassmann`]), commutant partitions and
//! tangent ranks ([`stratification`]), planar frame paths ([`planar`]) and a
//! small 2-complex engine with the `G(4,2)` graph and `G(5,2)` surface data
//! ([`cellcomplex`]).

pub mod cellcomplex;
pub mod error;
pub mod frames;
pub mod grassmann;
pub mod io;
pub mod planar;
pub mod sampling;
pub mod scalar;
pub mod stratification;

pub use error::{Error, Result};
pub use frames::{AnyFrame, EllipsoidSpec, Frame, FrameBounds};
pub use grassmann::{AnyGram, GramPoint};
pub use scalar::{Field, Scalar};

/// Default relative tolerance for verification routines.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default bound on consecutive samples of a sampled path, in max norm.
pub const DEFAULT_MAX_STEP: f64 = 0.05;
