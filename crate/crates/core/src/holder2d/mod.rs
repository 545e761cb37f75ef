//! Recursive extension of a closed horizontal curve over the unit disc.
//!
//! Each node holds a curve normalized to length `r* = 6L·n_eff` and its
//! coarse filling. The unit disc of a node maps onto the filling's planar
//! polygon by a radial stretch; each triangle contains a round sub-disc
//! that hosts the child built on that triangle's boundary curve, and the
//! rest of the triangle collapses radially onto the triangle boundary.
//! Hölder control of the result is measured, not guaranteed.

mod estimate;
mod io;
mod mesh;
mod tree;

pub use estimate::{
    boundary_lipschitz, empirical_dehn_base, holder_estimate, predicted_exponent_2d, HolderEstimate, Stratum,
};
pub use io::{read_tree_file, write_tree_file, TreeFile};
pub use mesh::{export_mesh, Mesh};
pub use tree::{
    build_tree, build_tree_with, evaluate, DiscAddress, Evaluation, Node, SubdivisionTree, TreeMode, TreeOptions,
    SLIVER_RADIUS, SUBDISC_FACTOR,
};
