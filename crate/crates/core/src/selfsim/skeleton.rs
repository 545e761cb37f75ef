use serde::{Deserialize, Serialize};

use crate::curve::HCurve;
use crate::curve::SegmentMode;
use crate::error::{invalid, Error, Result};
use crate::group::HPoint;
use crate::metric::cc_distance;

/// Vertices live on the integer grid in units of `h = 2^(−n0)` for x and y
/// and `h²` for z, so every check below is exact integer arithmetic.
pub type GridPoint = [i64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkeletonEdge {
    pub axis: Axis,
    pub start: GridPoint,
}

impl SkeletonEdge {
    /// x-edges keep z; y-edges raise z by `x·Δy`, which is `X` in grid units.
    pub fn end(&self) -> GridPoint {
        let [x, y, z] = self.start;
        match self.axis {
            Axis::X => [x + 1, y, z],
            Axis::Y => [x, y + 1, z + x],
        }
    }
}

/// Reads a pair of grid points as a window edge if it has the edge shape.
fn as_edge(p: GridPoint, q: GridPoint) -> Option<SkeletonEdge> {
    if q == [p[0] + 1, p[1], p[2]] {
        Some(SkeletonEdge { axis: Axis::X, start: p })
    } else if q == [p[0], p[1] + 1, p[2] + p[0]] {
        Some(SkeletonEdge { axis: Axis::Y, start: p })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub edges_checked: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonWindow {
    n0: u32,
    box_size: u32,
    /// Dilation `δ_{2^n}` the window was verified against.
    n: u32,
    pub dilation: InvarianceReport,
    pub lattice: InvarianceReport,
}

pub fn skeleton_window(n0: u32, n: u32, box_size: u32) -> Result<SkeletonWindow> {
    if n0 < 1 || n < n0 {
        return invalid(format!("need n ≥ n0 ≥ 1, got n0={n0}, n={n}"));
    }
    if box_size < 1 {
        return invalid("box must be at least 1");
    }
    if n0 > 10 || n > 20 || box_size > 64 {
        return invalid("window too large");
    }
    let mut w = SkeletonWindow {
        n0,
        box_size,
        n,
        dilation: InvarianceReport { edges_checked: 0, failures: 0 },
        lattice: InvarianceReport { edges_checked: 0, failures: 0 },
    };
    w.dilation = w.check_dilation(n);
    w.lattice = w.check_lattice();
    if w.dilation.failures > 0 || w.lattice.failures > 0 {
        return Err(Error::Construction(format!(
            "skeleton invariance failed: {} dilation and {} lattice edges",
            w.dilation.failures, w.lattice.failures
        )));
    }
    Ok(w)
}

impl SkeletonWindow {
    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn box_size(&self) -> u32 {
        self.box_size
    }

    /// Grid bounds `(B, B_z)`: `0 ≤ X, Y ≤ B` and `0 ≤ Z ≤ B_z`.
    pub fn bounds(&self) -> (i64, i64) {
        let b = (self.box_size as i64) << self.n0;
        (b, (self.box_size as i64) << (2 * self.n0))
    }

    pub fn step(&self) -> f64 {
        (-(self.n0 as f64)).exp2()
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        let (b, bz) = self.bounds();
        (0..=b).contains(&p[0]) && (0..=b).contains(&p[1]) && (0..=bz).contains(&p[2])
    }

    pub fn has_edge(&self, e: &SkeletonEdge) -> bool {
        self.contains(e.start) && self.contains(e.end())
    }

    pub fn vertex_count(&self) -> u64 {
        let (b, bz) = self.bounds();
        ((b + 1) * (b + 1) * (bz + 1)) as u64
    }

    pub fn edge_count(&self) -> u64 {
        let (b, bz) = self.bounds();
        let xe = b * (b + 1) * (bz + 1);
        let ye: i64 = (0..=b).map(|x| b * (bz + 1 - x).max(0)).sum();
        (xe + ye) as u64
    }

    /// Calls `f` on every window edge, one `x` column at a time in parallel;
    /// `None` means the edge was out of scope for the check.
    fn fold_edges(&self, f: impl Fn(&SkeletonEdge) -> Option<bool> + Sync + Send) -> InvarianceReport {
        let (b, bz) = self.bounds();
        let cols = crate::par::map_range((b + 1) as usize, |x| {
            let x = x as i64;
            let (mut n, mut bad) = (0u64, 0u64);
            for y in 0..=b {
                for z in 0..=bz {
                    for axis in [Axis::X, Axis::Y] {
                        let e = SkeletonEdge { axis, start: [x, y, z] };
                        if !self.has_edge(&e) {
                            continue;
                        }
                        if let Some(ok) = f(&e) {
                            n += 1;
                            bad += u64::from(!ok);
                        }
                    }
                }
            }
            (n, bad)
        });
        let (edges_checked, failures) = cols.into_iter().fold((0, 0), |a, c| (a.0 + c.0, a.1 + c.1));
        InvarianceReport { edges_checked, failures }
    }

    /// `δ_{2^n}` sends each edge whose image stays in the box onto a chain of
    /// `2^n` window edges. Image breakpoints are the dilated edge at `t = j/2^n`.
    pub fn check_dilation(&self, n: u32) -> InvarianceReport {
        let s = 1i64 << n;
        self.fold_edges(|e| {
            let [x, y, z] = e.start;
            let image = |j: i64| -> GridPoint {
                match e.axis {
                    Axis::X => [s * x + j, s * y, s * s * z],
                    // z(t) = Z + X·t dilates to s²Z + s²X·t; at t = j/s that is s²Z + sXj
                    Axis::Y => [s * x, s * y + j, s * s * z + s * x * j],
                }
            };
            if !self.contains(image(s)) || !self.contains(image(0)) {
                return None;
            }
            Some((0..s).all(|j| as_edge(image(j), image(j + 1)).is_some_and(|f| self.has_edge(&f))))
        })
    }

    /// Left translation by the generators `(1,0,0)`, `(0,1,0)`, `(0,0,1)`
    /// maps window edges to window edges wherever both lie in the box.
    pub fn check_lattice(&self) -> InvarianceReport {
        let u = 1i64 << self.n0;
        let gens: [fn(GridPoint, i64) -> GridPoint; 3] = [
            |[x, y, z], u| [x + u, y, z + y * u],
            |[x, y, z], u| [x, y + u, z],
            |[x, y, z], u| [x, y, z + u * u],
        ];
        self.fold_edges(|e| {
            let mut any = false;
            for g in &gens {
                let (p, q) = (g(e.start, u), g(e.end(), u));
                if self.contains(p) && self.contains(q) {
                    any = true;
                    if !as_edge(p, q).is_some_and(|f| self.has_edge(&f)) {
                        return Some(false);
                    }
                }
            }
            any.then_some(true)
        })
    }

    pub fn to_point(&self, p: GridPoint) -> HPoint {
        let h = self.step();
        HPoint::raw(p[0] as f64 * h, p[1] as f64 * h, p[2] as f64 * h * h)
    }

    pub fn edge_curve(&self, e: &SkeletonEdge) -> Result<HCurve> {
        HCurve::new(vec![self.to_point(e.start), self.to_point(e.end())], vec![SegmentMode::Straight], false)
    }

    /// All edges, refusing windows with more than `max_edges`.
    pub fn edges(&self, max_edges: u64) -> Result<Vec<SkeletonEdge>> {
        if self.edge_count() > max_edges {
            return invalid(format!("window has {} edges, more than the limit {max_edges}", self.edge_count()));
        }
        let (b, bz) = self.bounds();
        let mut out = Vec::with_capacity(self.edge_count() as usize);
        for x in 0..=b {
            for y in 0..=b {
                for z in 0..=bz {
                    for axis in [Axis::X, Axis::Y] {
                        let e = SkeletonEdge { axis, start: [x, y, z] };
                        if self.has_edge(&e) {
                            out.push(e);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Measured max cell diameter: the largest corner-to-corner `d_c` over
    /// the window's grid cells. It only depends on the cell's x column.
    pub fn measured_mu(&self) -> Result<f64> {
        let (b, _) = self.bounds();
        let mut best = 0.0f64;
        for x in 0..b {
            let corners: Vec<HPoint> = (0..8)
                .map(|k| self.to_point([x + (k & 1), (k >> 1) & 1, (k >> 2) & 1]))
                .collect();
            for i in 0..8 {
                for j in i + 1..8 {
                    best = best.max(cc_distance(corners[i], corners[j], 1e-12)?);
                }
            }
        }
        Ok(best)
    }
}
