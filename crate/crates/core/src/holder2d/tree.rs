use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::curve::{translate_to_origin, HCurve};
use crate::error::{invalid, Error, Result};
use crate::filling::{coarse_filling, EdgeId, Filling};
use crate::group::{dilate_unchecked, inv, HPoint, HSim, IDENTITY};
use crate::params::CarnotParams;

/// Sub-disc radius as a fraction of the triangle's inradius. Hub triangles
/// touch their neighbours' incircles at exactly one half, so the factor
/// stays strictly below it to keep doubled discs disjoint.
pub const SUBDISC_FACTOR: f64 = 0.49;

/// Inradius (in the parent's planar units) below which a child is flagged.
pub const SLIVER_RADIUS: f64 = 1e-4;

const MAX_EAGER_DEPTH: usize = 12;
const MIN_RELATIVE_LENGTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeMode {
    Lazy,
    Eager,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeOptions {
    pub mode: TreeMode,
    /// Node budget for eager materialization.
    pub max_nodes: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { mode: TreeMode::Lazy, max_nodes: 20_000 }
    }
}

/// Where a child sits inside its parent's planar polygon.
#[derive(Debug, Clone, Copy)]
struct Layout {
    center: [f64; 2],
    radius: f64,
    /// Arc fractions of the child curve where its three edges start, and 1.
    breaks: [f64; 4],
}

#[derive(Debug)]
pub struct Node {
    path: Vec<u32>,
    depth: usize,
    filling: Filling,
    to_root: HSim,
    length: f64,
    layout: Option<Layout>,
    sliver: bool,
    children: Mutex<HashMap<u32, Arc<Node>>>,
}

impl Node {
    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn filling(&self) -> &Filling {
        &self.filling
    }

    /// Map from this node's normalized coordinates to absolute ones.
    pub fn to_root(&self) -> HSim {
        self.to_root
    }

    /// Curve length in absolute units.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_sliver(&self) -> bool {
        self.sliver
    }

    pub fn child_count(&self) -> usize {
        self.filling.triangle_count()
    }

    /// The node curve in absolute coordinates.
    pub fn curve_absolute(&self) -> HCurve {
        self.filling.curve().transform(&self.to_root)
    }

    /// Sub-disc of the child on triangle `id`, in this node's polygon coordinates.
    pub fn subdisc(&self, id: usize) -> ([f64; 2], f64, f64) {
        let (o, r_in) = incircle(&self.filling.triangle_planar(id));
        (o, SUBDISC_FACTOR * r_in, r_in)
    }

    /// Radial stretch of the unit disc onto the inscribed M-gon.
    pub fn disc_to_polygon(&self, x: [f64; 2]) -> [f64; 2] {
        let s = polygon_radius(x, self.filling.angular_count());
        [x[0] * s, x[1] * s]
    }

    pub fn polygon_to_disc(&self, y: [f64; 2]) -> [f64; 2] {
        let s = polygon_radius(y, self.filling.angular_count());
        [y[0] / s, y[1] / s]
    }

    /// Triangle edge hit by the ray from the sub-disc center of `id` in
    /// direction `dir`: (edge index, traversal fraction). On boundary edges
    /// the fraction is angular so it matches the curve parametrization.
    fn ray_hit(&self, id: usize, o: [f64; 2], dir: [f64; 2]) -> (usize, f64) {
        let tri = self.filling.triangle_planar(id);
        let mut best = (0usize, 0.0f64, f64::INFINITY);
        for k in 0..3 {
            let p = tri[k];
            let q = tri[(k + 1) % 3];
            let e = [q[0] - p[0], q[1] - p[1]];
            let denom = cross(dir, e);
            if denom.abs() < 1e-300 {
                continue;
            }
            let w = [p[0] - o[0], p[1] - o[1]];
            let t = cross(w, e) / denom;
            let lam = cross(w, dir) / denom;
            if t > 0.0 && (-1e-9..=1.0 + 1e-9).contains(&lam) && t < best.2 {
                best = (k, lam.clamp(0.0, 1.0), t);
            }
        }
        let (k, lam, t) = best;
        let (e, _) = self.filling.triangle_edges(id)[k];
        if self.filling.is_boundary(e) {
            let b = [o[0] + t * dir[0], o[1] + t * dir[1]];
            if let EdgeId::Angular { l, .. } = e {
                return (k, angular_fraction(b, l, self.filling.angular_count()));
            }
        }
        (k, lam)
    }

    /// Skeleton value (normalized coordinates) at edge `k` of triangle `id`.
    fn skeleton_point(&self, id: usize, k: usize, tau: f64) -> Result<HPoint> {
        let (e, fwd) = self.filling.triangle_edges(id)[k];
        let u = if fwd || self.filling.is_boundary(e) { tau } else { 1.0 - tau };
        self.filling.edge_point(e, u)
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn angular_fraction(b: [f64; 2], l: usize, big_m: usize) -> f64 {
    let a0 = 2.0 * PI * l as f64 / big_m as f64;
    let (c, s) = (a0.cos(), a0.sin());
    let rel = (c * b[1] - s * b[0]).atan2(c * b[0] + s * b[1]);
    (rel * big_m as f64 / (2.0 * PI)).clamp(0.0, 1.0)
}

/// Boundary radius of the regular M-gon (vertices on the unit circle) in direction `x`.
fn polygon_radius(x: [f64; 2], big_m: usize) -> f64 {
    if x[0] == 0.0 && x[1] == 0.0 {
        return 1.0;
    }
    let step = 2.0 * PI / big_m as f64;
    let mut psi = x[1].atan2(x[0]);
    if psi < 0.0 {
        psi += 2.0 * PI;
    }
    let l = ((psi / step).floor()).min(big_m as f64 - 1.0);
    let off = psi - (l + 0.5) * step;
    (0.5 * step).cos() / off.cos()
}

fn incircle(t: &[[f64; 2]; 3]) -> ([f64; 2], f64) {
    let d = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    let a = d(t[1], t[2]);
    let b = d(t[2], t[0]);
    let c = d(t[0], t[1]);
    let per = a + b + c;
    let o = [(a * t[0][0] + b * t[1][0] + c * t[2][0]) / per, (a * t[0][1] + b * t[1][1] + c * t[2][1]) / per];
    let area = 0.5 * cross([t[1][0] - t[0][0], t[1][1] - t[0][1]], [t[2][0] - t[0][0], t[2][1] - t[0][1]]).abs();
    (o, 2.0 * area / per)
}

/// A point of the closed disc coded by the child path that contains it and
/// its position in the deepest node's own unit disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscAddress {
    pub path: Vec<u32>,
    pub residual: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: HPoint,
    pub address: DiscAddress,
    /// Nonzero when the descent hit the depth limit inside a sub-disc;
    /// bounds the distance to any deeper refinement.
    pub bound: f64,
    /// True when the descent passed through a flagged child.
    pub sliver: bool,
}

#[derive(Debug)]
pub struct SubdivisionTree {
    gamma: HCurve,
    depth: usize,
    n_eff: u32,
    params: CarnotParams,
    options: TreeOptions,
    r_star: f64,
    gamma_len: f64,
    root: Arc<Node>,
}

/// Lazy tree: children are materialized on first access.
pub fn build_tree(gamma: &HCurve, depth: usize, n_eff: u32, params: &CarnotParams) -> Result<SubdivisionTree> {
    build_tree_with(gamma, depth, n_eff, params, TreeOptions::default())
}

pub fn build_tree_with(
    gamma: &HCurve,
    depth: usize,
    n_eff: u32,
    params: &CarnotParams,
    options: TreeOptions,
) -> Result<SubdivisionTree> {
    if n_eff < 2 {
        return invalid(format!("n_eff must be at least 2, got {n_eff}"));
    }
    if options.mode == TreeMode::Eager && depth > MAX_EAGER_DEPTH {
        return invalid(format!("eager trees are limited to depth {MAX_EAGER_DEPTH}; use lazy mode"));
    }
    if !gamma.is_closed() {
        return invalid("the boundary curve must be closed");
    }
    if !gamma.is_horizontal(1e-9) {
        return Err(Error::NotHorizontal("the boundary curve must be horizontal".into()));
    }
    let gamma_len = gamma.length_dc()?;
    if !(gamma_len > 0.0) {
        return invalid("the boundary curve has zero length");
    }
    let gamma = gamma.clone().arc_length_parametrized();
    let r_star = 6.0 * params.l * n_eff as f64;
    let (based, g) = translate_to_origin(&gamma);
    let lam = r_star / gamma_len;
    let normalized = based.transform(&HSim { translation: IDENTITY, scale: lam });
    let filling = coarse_filling(&normalized, params)?;
    let root = Arc::new(Node {
        path: Vec::new(),
        depth: 0,
        filling,
        to_root: HSim { translation: g, scale: 1.0 / lam },
        length: gamma_len,
        layout: None,
        sliver: false,
        children: Mutex::new(HashMap::new()),
    });
    let tree = SubdivisionTree { gamma, depth, n_eff, params: *params, options, r_star, gamma_len, root };
    if options.mode == TreeMode::Eager {
        tree.materialize(options.max_nodes)?;
    }
    Ok(tree)
}

impl SubdivisionTree {
    pub fn gamma(&self) -> &HCurve {
        &self.gamma
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_eff(&self) -> u32 {
        self.n_eff
    }

    pub fn params(&self) -> &CarnotParams {
        &self.params
    }

    pub fn options(&self) -> TreeOptions {
        self.options
    }

    pub fn reference_length(&self) -> f64 {
        self.r_star
    }

    pub fn root(&self) -> &Arc<Node> {
        &self.root
    }

    pub fn has_children(&self, node: &Node) -> bool {
        node.depth < self.depth && node.length >= MIN_RELATIVE_LENGTH * self.gamma_len
    }

    /// Child of `node` on triangle `id`, built on first use.
    pub fn child(&self, node: &Node, id: usize) -> Result<Arc<Node>> {
        if !self.has_children(node) {
            return invalid(format!("node at depth {} has no children", node.depth));
        }
        if id >= node.child_count() {
            return invalid(format!("child index {id} out of range ({} triangles)", node.child_count()));
        }
        let mut guard = node.children.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(c) = guard.get(&(id as u32)) {
            return Ok(c.clone());
        }
        let child = Arc::new(self.make_child(node, id)?);
        guard.insert(id as u32, child.clone());
        Ok(child)
    }

    fn make_child(&self, node: &Node, id: usize) -> Result<Node> {
        let (curve, breaks) = node.filling.triangle_boundary_curve(id)?;
        let len = curve.length();
        let b0 = curve.basepoint();
        let lam = self.r_star / len;
        let norm = HSim { translation: dilate_unchecked(lam, inv(b0)), scale: lam };
        let mut normalized = curve.transform(&norm);
        normalized = translate_to_origin(&normalized).0;
        let filling = coarse_filling(&normalized, &self.params)?;
        let (center, radius, r_in) = node.subdisc(id);
        let mut path = node.path.clone();
        path.push(id as u32);
        Ok(Node {
            path,
            depth: node.depth + 1,
            filling,
            to_root: node.to_root.compose(&norm.inverse()),
            length: len * node.to_root.scale,
            layout: Some(Layout { center, radius, breaks }),
            sliver: r_in < SLIVER_RADIUS,
            children: Mutex::new(HashMap::new()),
        })
    }

    /// Node reached by a child-index path.
    pub fn node(&self, path: &[u32]) -> Result<Arc<Node>> {
        let mut n = self.root.clone();
        for &i in path {
            n = self.child(&n, i as usize)?;
        }
        Ok(n)
    }

    /// Builds every node down to the tree depth, failing past `max_nodes`.
    pub fn materialize(&self, max_nodes: usize) -> Result<usize> {
        let mut count = 1usize;
        let mut queue = VecDeque::from([self.root.clone()]);
        while let Some(n) = queue.pop_front() {
            if !self.has_children(&n) {
                continue;
            }
            let k = n.child_count();
            if count + k > max_nodes {
                return invalid(format!("materializing would exceed the node budget of {max_nodes}"));
            }
            let kids = crate::par::map_range(k, |id| self.child(&n, id));
            for c in kids {
                queue.push_back(c?);
                count += 1;
            }
        }
        Ok(count)
    }

    /// Value at `x` in the closed unit disc with the descent record.
    pub fn evaluate_traced(&self, x: [f64; 2]) -> Result<Evaluation> {
        let r = x[0].hypot(x[1]);
        if !(r <= 1.0 + 1e-12) {
            return Err(Error::OutOfDomain(format!("|x| = {r} exceeds 1")));
        }
        let mut node = self.root.clone();
        let mut x = x;
        let mut sliver = false;
        loop {
            match self.step(&node, x)? {
                Step::Value(v, bound) => {
                    return Ok(Evaluation {
                        value: node.to_root.apply(v),
                        address: DiscAddress { path: node.path.clone(), residual: x },
                        bound: bound * node.to_root.scale,
                        sliver,
                    })
                }
                Step::Descend(child, xc) => {
                    sliver |= child.sliver;
                    node = child;
                    x = xc;
                }
            }
        }
    }

    /// Where `x` lands: the deepest node containing it and the local point there.
    pub fn address(&self, x: [f64; 2]) -> Result<DiscAddress> {
        Ok(self.evaluate_traced(x)?.address)
    }

    /// Value at an address; the residual is evaluated in the addressed node
    /// and may descend further.
    pub fn evaluate_address(&self, a: &DiscAddress) -> Result<HPoint> {
        let mut node = self.node(&a.path)?;
        let mut x = a.residual;
        loop {
            match self.step(&node, x)? {
                Step::Value(v, _) => return Ok(node.to_root.apply(v)),
                Step::Descend(c, xc) => {
                    node = c;
                    x = xc;
                }
            }
        }
    }

    fn step(&self, node: &Arc<Node>, x: [f64; 2]) -> Result<Step> {
        let rho = x[0].hypot(x[1]);
        let f = &node.filling;
        if rho >= 1.0 {
            let mut psi = x[1].atan2(x[0]);
            if psi < 0.0 {
                psi += 2.0 * PI;
            }
            return Ok(Step::Value(f.curve().arc_point(psi / (2.0 * PI)), 0.0));
        }
        let y = node.disc_to_polygon(x);
        let id = f.locate(y);
        let (o, s, _) = node.subdisc(id);
        let d = [y[0] - o[0], y[1] - o[1]];
        let dist = d[0].hypot(d[1]);
        if dist < s {
            if !self.has_children(node) {
                // below the leaf level: the would-be child's basepoint
                let v0 = f.triangle_vertices(id)[0];
                let bound: f64 = f.triangle_edges(id).iter().map(|(e, _)| f.edge_length(*e).unwrap_or(0.0)).sum();
                return Ok(Step::Value(f.vertex_image(v0), bound));
            }
            let child = self.child(node, id)?;
            if dist == 0.0 {
                return Ok(Step::Descend(child, [0.0, 0.0]));
            }
            let dir = [d[0] / dist, d[1] / dist];
            let (k, tau) = node.ray_hit(id, o, dir);
            let br = child.layout.as_ref().expect("child layout").breaks;
            let frac = br[k] + tau * (br[k + 1] - br[k]);
            let ang = 2.0 * PI * frac;
            let rr = dist / s;
            return Ok(Step::Descend(child, [rr * ang.cos(), rr * ang.sin()]));
        }
        let dir = [d[0] / dist, d[1] / dist];
        let (k, tau) = node.ray_hit(id, o, dir);
        Ok(Step::Value(node.skeleton_point(id, k, tau)?, 0.0))
    }

    /// Value of the child's own parametrization at a point of its sub-disc
    /// boundary, and the parent's annulus value there: the two sides of the
    /// interface at angle `phi`.
    pub fn interface_values(&self, parent: &Node, id: usize, phi: f64) -> Result<(HPoint, HPoint)> {
        let (o, _, _) = parent.subdisc(id);
        let dir = [phi.cos(), phi.sin()];
        let (k, tau) = parent.ray_hit(id, o, dir);
        let outer = parent.to_root.apply(parent.skeleton_point(id, k, tau)?);
        let child = self.child(parent, id)?;
        let br = child.layout.as_ref().expect("child layout").breaks;
        let frac = br[k] + tau * (br[k + 1] - br[k]);
        let inner = child.to_root.apply(child.filling.curve().arc_point(frac));
        Ok((outer, inner))
    }

    /// Point of the root disc corresponding to polygon point `y` of `node`.
    pub fn node_point_to_root(&self, node: &Node, y: [f64; 2]) -> Result<[f64; 2]> {
        // invert the descent maps from the node back up to the root
        let mut chain = Vec::new();
        let mut n = self.root.clone();
        for &i in &node.path {
            let c = self.child(&n, i as usize)?;
            chain.push((n.clone(), i as usize, c.clone()));
            n = c;
        }
        let mut x = node.polygon_to_disc(y);
        for (parent, id, child) in chain.into_iter().rev() {
            let lay = child.layout.expect("child layout");
            let rr = x[0].hypot(x[1]);
            let frac = {
                let mut a = x[1].atan2(x[0]) / (2.0 * PI);
                if a < 0.0 {
                    a += 1.0;
                }
                a
            };
            let phi = invert_breaks(&parent, id, lay, frac);
            let yp = [lay.center[0] + lay.radius * rr * phi.cos(), lay.center[1] + lay.radius * rr * phi.sin()];
            x = parent.polygon_to_disc(yp);
        }
        Ok(x)
    }
}

/// Sub-disc angle whose ray hits the child curve at arc fraction `frac`.
fn invert_breaks(parent: &Node, id: usize, lay: Layout, frac: f64) -> f64 {
    // monotone in the angle: bisect over one turn starting at the ray
    // through triangle vertex 0
    let tri = parent.filling.triangle_planar(id);
    let o = lay.center;
    let a0 = (tri[0][1] - o[1]).atan2(tri[0][0] - o[0]);
    let value = |phi: f64| {
        let (k, tau) = parent.ray_hit(id, o, [phi.cos(), phi.sin()]);
        lay.breaks[k] + tau * (lay.breaks[k + 1] - lay.breaks[k])
    };
    let (mut lo, mut hi) = (a0, a0 + 2.0 * PI);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let v = value(mid);
        // near the starting ray the value may read as 1 instead of 0
        let v = if mid - a0 < PI && v > 0.999 { 0.0 } else { v };
        if v < frac {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

enum Step {
    Value(HPoint, f64),
    Descend(Arc<Node>, [f64; 2]),
}

/// `tree(x)`, failing when the depth limit leaves an error above `tol`.
pub fn evaluate(tree: &SubdivisionTree, x: [f64; 2], tol: f64) -> Result<HPoint> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let e = tree.evaluate_traced(x)?;
    if e.bound > tol {
        return Err(Error::TolUnreachable { tol, bound: e.bound });
    }
    Ok(e.value)
}
