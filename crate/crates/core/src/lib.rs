//! Desk-scale numerical toolkit for fractional smoothness and planar degree
//! theory: Gagliardo seminorms on domains and circles, distributional
//! Jacobian and curl pairings with sign classification, winding numbers of
//! circle traces with the monotonicity / nonnegativity / sense-preserving /
//! essential-diameter checkers, the appendix radial profiles, and a
//! verification suite that ties them together against frozen calibration
//! constants.
//!
//! The numerical kernels are generic over the scalar type through
//! [`Real`] (f32 or f64); the verification and report layer is concrete
//! f64, and the aliases below fix f64 for everyday use.

// Validation guards are written as `!(x > 0)` so NaN parameters are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxfn;
pub mod calibration;
pub mod degree;
pub mod geom;
pub mod jacobian;
pub mod maps;
pub mod scalar;
pub mod sobolev;
pub mod sum;
pub mod tol;
pub mod verify;

pub use scalar::Real;

/// Planar point/vector at the default scalar.
pub type Point = geom::Vec2<f64>;
/// 2x2 matrix at the default scalar.
pub type Matrix2 = geom::Mat2<f64>;
/// Planar domain at the default scalar.
pub type PlaneDomain = geom::Domain<f64>;
/// Evaluatable map at the default scalar.
pub type Map = maps::MapField<f64>;
/// Smooth bump at the default scalar.
pub type Bump = maps::TestFunction<f64>;
/// Circle trace at the default scalar.
pub type Trace = degree::CircleTrace<f64>;
/// Fractional parameters at the default scalar.
pub type Params = sobolev::FractionalParams<f64>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid too coarse: {0} points per axis, need at least 4")]
    GridTooCoarse(usize),
    #[error("too few circle samples: got {got}, need at least {need}")]
    TooFewCircleSamples { got: usize, need: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("unknown gallery map `{0}`")]
    UnknownMap(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("evaluation at a declared singular point ({x}, {y})")]
    SingularPoint { x: f64, y: f64 },
    #[error("degree undefined: probe ({x}, {y}) lies on the sampled image")]
    DegreeUndefined { x: f64, y: f64 },
    #[error("test-function support is not compactly contained in the domain")]
    SupportNotInterior,
    #[error("sampling produced no interior points")]
    EmptySample,
    #[error("no point pairs survive the diagonal exclusion radius")]
    EmptyPairSet,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
