//! Heisenberg group geometry and explicit Hölder extensions of horizontal curves.
//!
//! * [`group`], [`geodesic`], [`metric`]: group law, dilations, exact
//!   Carnot-Carathéodory distance and geodesics.
//! * [`curve`]: piecewise horizontal curves and lifts of planar polylines.
//! * [`filling`]: the explicit coarse filling of a closed horizontal curve.
//! * [`holder2d`]: recursive extension of a closed horizontal curve over
//!   the unit disc and empirical Hölder exponents.
//! * [`selfsim`]: the scaling/exponent calculus, dilation-invariant grid
//!   skeletons, separated ball layouts and self-similar conjugation.

// `!(x > 0.0)` is how inputs reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod filling;
pub mod geodesic;
pub mod group;
pub mod holder2d;
pub mod metric;
pub mod obj;
pub mod params;
pub mod quad;
pub mod rng;
pub mod selfsim;

mod par;

pub use curve::{HCurve, SegmentMode};
pub use error::{Error, Result};
pub use filling::Filling;
pub use group::{dilate, inv, mul, HPoint, HSim, IDENTITY};
pub use metric::cc_distance;
pub use params::CarnotParams;
