//! The explicit coarse filling of a closed horizontal curve.
//!
//! For a curve `c` of length `r` based at the identity, vertex `(j, l)`
//! with `0 ≤ j ≤ m`, `0 ≤ l < M` sits at `(j/m)·e^{2πil/M}` in the disc and
//! maps to `δ_{j/m}(c(l/M))`. All `(0, l)` are one hub vertex. Ring `j`
//! and ring `j+1` are joined by quads split along the diagonal
//! `(j,l)–(j+1,l+1)`; the ring-1 vertices form hub triangles with the
//! hub. Interior edges carry cc-geodesics and boundary edges carry arcs of
//! `c`.
//!
//! Triangle counts reach millions for realistic `r`, so triangles, edges
//! and edge curves are generated on demand rather than stored.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{translate_to_origin, HCurve, SegmentMode};
use crate::error::{invalid, Error, Result};
use crate::geodesic::{Arc, Geodesic};
use crate::group::{dilate_unchecked, HPoint, HSim, IDENTITY};
use crate::par::map_range;
use crate::params::CarnotParams;

/// `(j, l)`; `j = 0` is the hub whatever `l` is.
pub type Vertex = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EdgeId {
    /// `(j,l) → (j+1,l)`
    Radial { j: usize, l: usize },
    /// `(j,l) → (j,l+1)`; a boundary edge when `j = m`
    Angular { j: usize, l: usize },
    /// `(j,l) → (j+1,l+1)`
    Diagonal { j: usize, l: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    /// `[hub, (1,l), (1,l+1)]`
    Hub { l: usize },
    /// `[(j,l), (j+1,l), (j+1,l+1)]`
    Lower { j: usize, l: usize },
    /// `[(j,l), (j+1,l+1), (j,l+1)]`
    Upper { j: usize, l: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillingReport {
    pub max_perimeter: f64,
    pub worst_triangle: usize,
    pub count: usize,
    pub count_bound: usize,
    pub perimeter_bound: f64,
    pub violations: usize,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct Filling {
    curve: HCurve,
    l_const: f64,
    big_m: usize,
    m: usize,
    ring: Vec<HPoint>,
    chords: Vec<Geodesic>,
    overrides: HashMap<EdgeId, HCurve>,
    report: Option<FillingReport>,
}

/// Snaps values within 1e-12 relative of an integer, so `r = 6L` computed
/// in floating point still yields the intended counts.
fn snapped_floor(q: f64) -> usize {
    let r = q.round();
    if (q - r).abs() <= 1e-12 * q.abs().max(1.0) {
        r as usize
    } else {
        q.floor() as usize
    }
}

pub fn filling_counts(r: f64, params: &CarnotParams) -> (usize, usize) {
    let big_m = snapped_floor(r / params.l) + 1;
    let m = snapped_floor(params.l * (r + 1.0).powi(params.k as i32)) + 1;
    (big_m, m)
}

/// Lemma-style filling of a closed horizontal curve based at the identity.
/// The perimeter bound `6L` is verified before returning.
pub fn coarse_filling(c: &HCurve, params: &CarnotParams) -> Result<Filling> {
    let f = build_unverified(c, params)?;
    let report = f.verify(params.l);
    if !report.ok {
        return Err(Error::Construction(format!(
            "filling violates its bounds: max perimeter {} vs 6L = {}, {} triangles vs bound {}",
            report.max_perimeter, report.perimeter_bound, report.count, report.count_bound
        )));
    }
    Ok(Filling { report: Some(report), ..f })
}

pub(crate) fn build_unverified(c: &HCurve, params: &CarnotParams) -> Result<Filling> {
    params.validate()?;
    if !c.is_closed() {
        return invalid("filling needs a closed curve");
    }
    if !c.is_horizontal(1e-9) {
        return Err(Error::NotHorizontal("filling needs a horizontal curve".into()));
    }
    let r = c.length_dc()?;
    let base = c.basepoint();
    if base.coord_norm() > 1e-12 * (1.0 + r * r) {
        return invalid("curve must pass through the identity at parameter 0; apply translate_to_origin first");
    }
    let need = 6.0 * params.l;
    if r < need * (1.0 - 1e-12) {
        return Err(Error::CurveTooShort { length: r, required: need });
    }
    let curve = c.clone().arc_length_parametrized();
    let (big_m, m) = filling_counts(r.max(need), params);
    let mut ring: Vec<HPoint> = (0..big_m).map(|l| curve.arc_point(l as f64 / big_m as f64)).collect();
    ring[0] = IDENTITY;
    let chords = map_range(big_m, |l| Geodesic::solve(ring[l], ring[(l + 1) % big_m]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Filling { curve, l_const: params.l, big_m, m, ring, chords, overrides: HashMap::new(), report: None })
}

impl Filling {
    pub fn curve(&self) -> &HCurve {
        &self.curve
    }

    /// `M`.
    pub fn angular_count(&self) -> usize {
        self.big_m
    }

    /// `m`.
    pub fn radial_count(&self) -> usize {
        self.m
    }

    pub fn comparison_l(&self) -> f64 {
        self.l_const
    }

    pub fn triangle_count(&self) -> usize {
        2 * self.m * self.big_m - self.big_m
    }

    pub fn count_bound(&self) -> usize {
        2 * self.m * self.big_m
    }

    /// Verification report computed at construction, if any.
    pub fn report(&self) -> Option<&FillingReport> {
        self.report.as_ref()
    }

    pub fn vertex_image(&self, (j, l): Vertex) -> HPoint {
        if j == 0 {
            return IDENTITY;
        }
        let p = self.ring[l % self.big_m];
        if j == self.m {
            p
        } else {
            dilate_unchecked(j as f64 / self.m as f64, p)
        }
    }

    pub fn planar_embed(&self, (j, l): Vertex) -> [f64; 2] {
        let r = j as f64 / self.m as f64;
        let a = 2.0 * PI * (l % self.big_m) as f64 / self.big_m as f64;
        [r * a.cos(), r * a.sin()]
    }

    pub fn triangle(&self, id: usize) -> TriangleKind {
        let bm = self.big_m;
        if id < bm {
            return TriangleKind::Hub { l: id };
        }
        let r = id - bm;
        let q = r / 2;
        let (j, l) = (1 + q / bm, q % bm);
        if r.is_multiple_of(2) {
            TriangleKind::Lower { j, l }
        } else {
            TriangleKind::Upper { j, l }
        }
    }

    pub fn triangle_id(&self, t: TriangleKind) -> usize {
        let bm = self.big_m;
        match t {
            TriangleKind::Hub { l } => l,
            TriangleKind::Lower { j, l } => bm + 2 * ((j - 1) * bm + l),
            TriangleKind::Upper { j, l } => bm + 2 * ((j - 1) * bm + l) + 1,
        }
    }

    /// Counterclockwise vertex triple.
    pub fn triangle_vertices(&self, id: usize) -> [Vertex; 3] {
        let n = |l: usize| (l + 1) % self.big_m;
        match self.triangle(id) {
            TriangleKind::Hub { l } => [(0, 0), (1, l), (1, n(l))],
            TriangleKind::Lower { j, l } => [(j, l), (j + 1, l), (j + 1, n(l))],
            TriangleKind::Upper { j, l } => [(j, l), (j + 1, n(l)), (j, n(l))],
        }
    }

    /// Edge `k` joins vertex `k` to vertex `k+1`; the flag is true when
    /// that direction agrees with the edge's canonical direction.
    pub fn triangle_edges(&self, id: usize) -> [(EdgeId, bool); 3] {
        let n = |l: usize| (l + 1) % self.big_m;
        match self.triangle(id) {
            TriangleKind::Hub { l } => [
                (EdgeId::Radial { j: 0, l }, true),
                (EdgeId::Angular { j: 1, l }, true),
                (EdgeId::Radial { j: 0, l: n(l) }, false),
            ],
            TriangleKind::Lower { j, l } => [
                (EdgeId::Radial { j, l }, true),
                (EdgeId::Angular { j: j + 1, l }, true),
                (EdgeId::Diagonal { j, l }, false),
            ],
            TriangleKind::Upper { j, l } => [
                (EdgeId::Diagonal { j, l }, true),
                (EdgeId::Radial { j, l: n(l) }, false),
                (EdgeId::Angular { j, l }, false),
            ],
        }
    }

    pub fn triangle_planar(&self, id: usize) -> [[f64; 2]; 3] {
        self.triangle_vertices(id).map(|v| self.planar_embed(v))
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        let n = |l: usize| (l + 1) % self.big_m;
        match e {
            EdgeId::Radial { j, l } => ((j, l), (j + 1, l)),
            EdgeId::Angular { j, l } => ((j, l), (j, n(l))),
            EdgeId::Diagonal { j, l } => ((j, l), (j + 1, n(l))),
        }
    }

    pub fn is_boundary(&self, e: EdgeId) -> bool {
        matches!(e, EdgeId::Angular { j, .. } if j == self.m)
    }

    /// The cc-geodesic carried by an interior edge (ignores overrides).
    pub fn edge_geodesic(&self, e: EdgeId) -> Result<Option<Geodesic>> {
        match e {
            EdgeId::Angular { j, .. } if j == self.m => Ok(None),
            EdgeId::Angular { j, l } => {
                // dilations map geodesics to geodesics
                let s = j as f64 / self.m as f64;
                let g = &self.chords[l];
                Ok(Some(Geodesic {
                    start: self.vertex_image((j, l)),
                    end: self.vertex_image((j, (l + 1) % self.big_m)),
                    arc: g.arc.scaled(s),
                }))
            }
            _ => {
                let (a, b) = self.edge_endpoints(e);
                Geodesic::solve(self.vertex_image(a), self.vertex_image(b)).map(Some)
            }
        }
    }

    fn boundary_fractions(&self, l: usize) -> (f64, f64) {
        (l as f64 / self.big_m as f64, (l + 1) as f64 / self.big_m as f64)
    }

    /// Curve carried by an edge, in canonical direction.
    pub fn edge_curve(&self, e: EdgeId) -> Result<HCurve> {
        if let Some(c) = self.overrides.get(&e) {
            return Ok(c.clone());
        }
        match self.edge_geodesic(e)? {
            Some(g) => geodesic_curve(&g),
            None => {
                let EdgeId::Angular { l, .. } = e else { unreachable!() };
                let (f0, f1) = self.boundary_fractions(l);
                let mut c = self.curve.sub_curve(f0, f1)?;
                c = pin_ends(c, self.vertex_image((self.m, l)), self.vertex_image((self.m, l + 1)));
                Ok(c)
            }
        }
    }

    /// Point of an edge at canonical parameter `u`: arc-length fraction for
    /// geodesics, curve arc fraction `(l+u)/M` for boundary edges.
    pub fn edge_point(&self, e: EdgeId, u: f64) -> Result<HPoint> {
        if let Some(c) = self.overrides.get(&e) {
            return Ok(c.arc_point(u));
        }
        match self.edge_geodesic(e)? {
            Some(g) => Ok(g.point_at(u)),
            None => {
                let EdgeId::Angular { l, .. } = e else { unreachable!() };
                let u = u.clamp(0.0, 1.0);
                if u == 0.0 {
                    return Ok(self.vertex_image((self.m, l)));
                }
                if u == 1.0 {
                    return Ok(self.vertex_image((self.m, l + 1)));
                }
                Ok(self.curve.arc_point((l as f64 + u) / self.big_m as f64))
            }
        }
    }

    pub fn edge_length(&self, e: EdgeId) -> Result<f64> {
        if let Some(c) = self.overrides.get(&e) {
            return Ok(c.length());
        }
        match self.edge_geodesic(e)? {
            Some(g) => Ok(g.length()),
            None => Ok(self.curve.length() / self.big_m as f64),
        }
    }

    /// Replaces the curve of one edge; endpoints must match the vertex images.
    pub fn with_edge_override(mut self, e: EdgeId, c: HCurve) -> Result<Filling> {
        let (a, b) = self.edge_endpoints(e);
        let (pa, pb) = (self.vertex_image(a), self.vertex_image(b));
        let v = c.vertices();
        let scale = 1.0 + pa.coord_norm() + pb.coord_norm();
        if v[0].coord_dist(pa) > 1e-9 * scale || v[v.len() - 1].coord_dist(pb) > 1e-9 * scale {
            return invalid("override curve endpoints must match the edge's vertex images");
        }
        self.overrides.insert(e, c);
        self.report = None;
        Ok(self)
    }

    /// Boundary of triangle `id`, counterclockwise from vertex 0, plus the
    /// arc-length fractions where its three edges begin (and 1).
    pub fn triangle_boundary_curve(&self, id: usize) -> Result<(HCurve, [f64; 4])> {
        let edges = self.triangle_edges(id);
        let mut pieces = Vec::with_capacity(3);
        for (e, fwd) in edges {
            let c = self.edge_curve(e)?;
            pieces.push(if fwd { c } else { c.reversed() });
        }
        let lens: Vec<f64> = pieces.iter().map(|p| p.length()).collect();
        let curve = HCurve::concat(&pieces, true)?.arc_length_parametrized();
        let total = curve.length();
        let mut breaks = [0.0, 0.0, 0.0, 1.0];
        if total > 0.0 {
            // read the junctions off the concatenated curve so they agree with its own parametrization
            let cum = curve.cumulative_lengths();
            let mut seg = 0;
            for k in 0..2 {
                seg += pieces[k].segment_count();
                breaks[k + 1] = cum[seg] / total;
            }
        } else {
            let t: f64 = lens.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            breaks[1] = lens[0] / t;
            breaks[2] = (lens[0] + lens[1]) / t;
        }
        Ok((curve, breaks))
    }

    pub fn triangle_boundary_curves(&self) -> Result<Vec<HCurve>> {
        map_range(self.triangle_count(), |id| self.triangle_boundary_curve(id).map(|(c, _)| c))
            .into_iter()
            .collect()
    }

    /// Triangle containing a point of the planar embedding (a regular M-gon
    /// inscribed in the unit circle).
    pub fn locate(&self, y: [f64; 2]) -> usize {
        let bm = self.big_m as f64;
        let step = 2.0 * PI / bm;
        let mut psi = y[1].atan2(y[0]);
        if psi < 0.0 {
            psi += 2.0 * PI;
        }
        let l = ((psi / step).floor() as usize).min(self.big_m - 1);
        let mid = (l as f64 + 0.5) * step;
        let t = (y[0] * mid.cos() + y[1] * mid.sin()) / (0.5 * step).cos();
        let j = ((t * self.m as f64).floor().max(0.0) as usize).min(self.m - 1);
        if j == 0 {
            return self.triangle_id(TriangleKind::Hub { l });
        }
        let a = self.planar_embed((j, l));
        let c = self.planar_embed((j + 1, l + 1));
        let side = (c[0] - a[0]) * (y[1] - a[1]) - (c[1] - a[1]) * (y[0] - a[0]);
        if side > 0.0 {
            self.triangle_id(TriangleKind::Upper { j, l })
        } else {
            self.triangle_id(TriangleKind::Lower { j, l })
        }
    }

    /// Perimeter and count check against `6L` and `2mM`.
    pub fn verify(&self, l_const: f64) -> FillingReport {
        let bm = self.big_m;
        let m = self.m;
        let len = |e: EdgeId| self.edge_length(e).unwrap_or(f64::INFINITY);
        let radial: Vec<Vec<f64>> = map_range(bm, |l| (0..m).map(|j| len(EdgeId::Radial { j, l })).collect());
        let boundary_len = self.curve.length() / bm as f64;
        let ang = |j: usize, l: usize| -> f64 {
            if !self.overrides.is_empty() {
                return len(EdgeId::Angular { j, l });
            }
            if j == m {
                boundary_len
            } else {
                self.chords[l].length() * (j as f64 / m as f64)
            }
        };
        let bound = 6.0 * l_const;
        let per_l = map_range(bm, |l| {
            let ln = (l + 1) % bm;
            let mut worst = (0.0f64, 0usize);
            let mut violations = 0usize;
            let mut consider = |p: f64, id: usize| {
                if !(p <= bound) {
                    violations += 1;
                }
                if p > worst.0 || p.is_nan() {
                    worst = (p, id);
                }
            };
            consider(radial[l][0] + ang(1, l) + radial[ln][0], self.triangle_id(TriangleKind::Hub { l }));
            for j in 1..m {
                let d = len(EdgeId::Diagonal { j, l });
                consider(radial[l][j] + ang(j + 1, l) + d, self.triangle_id(TriangleKind::Lower { j, l }));
                consider(d + radial[ln][j] + ang(j, l), self.triangle_id(TriangleKind::Upper { j, l }));
            }
            (worst, violations)
        });
        let mut max_perimeter = 0.0f64;
        let mut worst_triangle = 0;
        let mut violations = 0;
        for ((p, id), v) in per_l {
            violations += v;
            if p > max_perimeter || p.is_nan() {
                max_perimeter = p;
                worst_triangle = id;
            }
        }
        let count = self.triangle_count();
        let count_bound = self.count_bound();
        FillingReport {
            max_perimeter,
            worst_triangle,
            count,
            count_bound,
            perimeter_bound: bound,
            violations,
            ok: violations == 0 && max_perimeter <= bound && count < count_bound,
        }
    }
}

fn geodesic_curve(g: &Geodesic) -> Result<HCurve> {
    if g.length() == 0.0 {
        return HCurve::new(vec![g.start, g.end], vec![SegmentMode::Straight], false);
    }
    HCurve::with_parts(vec![g.start, g.end], vec![SegmentMode::Geodesic], vec![Some(g.arc)], None, false)
}

fn pin_ends(c: HCurve, a: HPoint, b: HPoint) -> HCurve {
    let mut v = c.vertices().to_vec();
    let n = v.len();
    v[0] = a;
    v[n - 1] = b;
    let arcs: Vec<Option<Arc>> = (0..c.segment_count()).map(|i| c.arc(i)).collect();
    HCurve::with_parts(v, c.modes().to_vec(), arcs, Some(c.knots().to_vec()), false).unwrap_or(c)
}

pub fn verify_filling(f: &Filling, l_const: f64) -> FillingReport {
    f.verify(l_const)
}

pub fn triangle_boundary_curves(f: &Filling) -> Result<Vec<HCurve>> {
    f.triangle_boundary_curves()
}

/// Upper bound for the ε-area: the triangle count of the filling of
/// `δ_{6L/ε}(c)` after moving its basepoint to the identity.
pub fn epsilon_area(c: &HCurve, eps: f64, params: &CarnotParams) -> Result<usize> {
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    if !c.is_closed() {
        return invalid("epsilon_area needs a closed curve");
    }
    let (c0, _) = translate_to_origin(c);
    let len = c0.length_dc()?;
    if len <= eps * (1.0 - 1e-12) {
        // c itself bounds a single triangle of perimeter ≤ ε
        return Ok(1);
    }
    let s = 6.0 * params.l / eps;
    let scaled = c0.transform(&HSim { translation: IDENTITY, scale: s });
    Ok(coarse_filling(&scaled, params)?.triangle_count())
}

/// Count from the formulas alone, without building the filling.
pub fn epsilon_area_bound(len: f64, eps: f64, params: &CarnotParams) -> usize {
    if len <= eps {
        return 1;
    }
    let (big_m, m) = filling_counts(6.0 * params.l * len / eps, params);
    2 * m * big_m - big_m
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillingEdgeFile {
    pub edge: EdgeId,
    pub a: usize,
    pub b: usize,
    pub boundary: bool,
    pub polyline: Vec<HPoint>,
}

/// Explicit JSON form of a filling.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillingFile {
    #[serde(rename = "M")]
    pub big_m: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub curve: HCurve,
    /// Vertex `0` is the hub, `(j, l)` with `j ≥ 1` is `1 + (j−1)·M + l`.
    pub vertices: Vec<HPoint>,
    pub planar: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<FillingEdgeFile>,
    pub report: Option<FillingReport>,
}

impl Filling {
    pub fn vertex_index(&self, (j, l): Vertex) -> usize {
        if j == 0 {
            0
        } else {
            1 + (j - 1) * self.big_m + l % self.big_m
        }
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for l in 0..self.big_m {
            for j in 0..self.m {
                out.push(EdgeId::Radial { j, l });
            }
            for j in 1..=self.m {
                out.push(EdgeId::Angular { j, l });
            }
            for j in 1..self.m {
                out.push(EdgeId::Diagonal { j, l });
            }
        }
        out
    }

    /// Explicit export; `samples` points per geodesic edge.
    pub fn to_file(&self, samples: usize) -> Result<FillingFile> {
        let bm = self.big_m;
        let mut vertices = vec![IDENTITY];
        let mut planar = vec![[0.0, 0.0]];
        for j in 1..=self.m {
            for l in 0..bm {
                vertices.push(self.vertex_image((j, l)));
                planar.push(self.planar_embed((j, l)));
            }
        }
        let triangles = (0..self.triangle_count())
            .map(|id| self.triangle_vertices(id).map(|v| self.vertex_index(v)))
            .collect();
        let mut edges = Vec::new();
        for e in self.edges() {
            let (a, b) = self.edge_endpoints(e);
            let c = self.edge_curve(e)?;
            edges.push(FillingEdgeFile {
                edge: e,
                a: self.vertex_index(a),
                b: self.vertex_index(b),
                boundary: self.is_boundary(e),
                polyline: c.sample_polyline(samples),
            });
        }
        Ok(FillingFile {
            big_m: bm,
            m: self.m,
            l: self.l_const,
            curve: self.curve.clone(),
            vertices,
            planar,
            triangles,
            edges,
            report: self.report.clone(),
        })
    }
}
