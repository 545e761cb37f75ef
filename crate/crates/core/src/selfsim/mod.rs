//! Scaling and exponent calculus, dilation-invariant grid skeletons,
//! separated ball layouts, similarity fixed points and self-similar maps.
//!
//! The self-similar map is built on the planar extension from
//! [`crate::holder2d`]; it exercises the conjugation and fixed-point
//! mechanics, not a 3D construction.

mod calculus;
mod grid;
mod seed;
mod similarity;
mod skeleton;

pub use calculus::*;
pub use grid::{is_two_separated, separated_grid, Ball};
pub use seed::{approx_check, conjugated_eval, p_analog, ApproxCheck, SeedLayout, SelfSimilarSeed};
pub use similarity::{
    fixed_point_residual, fixed_points, fixed_points_seeded, translation_for_fixed_point, EuclideanSim,
    FixedPoints, HeisenbergSim, SimilarityPair,
};
pub use skeleton::{skeleton_window, Axis, GridPoint, InvarianceReport, SkeletonEdge, SkeletonWindow};
