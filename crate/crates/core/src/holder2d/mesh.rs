use serde::{Deserialize, Serialize};

use super::tree::{Node, SubdivisionTree};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub polylines: Vec<Vec<[f64; 3]>>,
    /// Number of node curves exported per depth.
    pub per_depth: Vec<usize>,
}

impl Mesh {
    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }
}

/// Node curves down to `depth` as polylines with `samples` points per segment.
///
/// Curves at depth `i + 1` are triangle boundaries of depth-`i` fillings, so
/// only nodes above the last level are materialized.
pub fn export_mesh(tree: &SubdivisionTree, depth: usize, samples: usize, max_curves: usize) -> Result<Mesh> {
    if depth > tree.depth() {
        return invalid(format!("mesh depth {depth} exceeds the tree depth {}", tree.depth()));
    }
    let samples = samples.max(1);
    let mut mesh = Mesh::default();
    let root = tree.root().clone();
    push(&mut mesh, root.curve_absolute().sample_polyline(samples));
    mesh.per_depth.push(1);
    let mut level: Vec<std::sync::Arc<Node>> = vec![root];
    for d in 1..=depth {
        let parents: Vec<_> = level.iter().filter(|n| tree.has_children(n)).cloned().collect();
        let total: usize = parents.iter().map(|n| n.child_count()).sum();
        if mesh.polylines.len() + total > max_curves {
            return invalid(format!("depth {d} would export more than {max_curves} curves"));
        }
        let mut count = 0;
        let mut next = Vec::new();
        for p in &parents {
            let curves = p.filling().triangle_boundary_curves()?;
            let sim = p.to_root();
            for c in curves {
                push(&mut mesh, c.transform(&sim).sample_polyline(samples));
                count += 1;
            }
            if d < depth {
                let kids = crate::par::map_range(p.child_count(), |id| tree.child(p, id));
                for k in kids {
                    next.push(k?);
                }
            }
        }
        mesh.per_depth.push(count);
        level = next;
    }
    Ok(mesh)
}

fn push(mesh: &mut Mesh, pts: Vec<crate::group::HPoint>) {
    mesh.polylines.push(pts.into_iter().map(|p| p.to_array()).collect());
}
