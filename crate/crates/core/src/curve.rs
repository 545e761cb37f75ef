//! Piecewise curves in the Heisenberg group.
//!
//! A curve is a vertex list with one interpolation mode per segment:
//!
//! * `Straight`: the lift of the planar segment, plus a linear z-defect
//!   (zero for horizontal segments).
//! * `Geodesic`: a cached cc-geodesic arc.
//! * `Vertical`: a segment along the z axis (same x, y at both ends).
//!
//! The parameter runs over `[0, 1]`; `knots[i]` is the parameter of
//! vertex `i` and the parameter is linear in arc length inside a segment.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geodesic::{Arc, Geodesic};
use crate::group::{between, inv, mul, HPoint, HSim, IDENTITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentMode {
    Straight,
    Geodesic,
    Vertical,
}

const CLOSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HCurve {
    vertices: Vec<HPoint>,
    modes: Vec<SegmentMode>,
    arcs: Vec<Arc>,
    knots: Vec<f64>,
    cum: Vec<f64>,
    closed: bool,
}

impl HCurve {
    /// Builds a curve, solving geodesic segments from their endpoints.
    pub fn new(vertices: Vec<HPoint>, modes: Vec<SegmentMode>, closed: bool) -> Result<Self> {
        let arcs = vec![None; modes.len()];
        Self::with_parts(vertices, modes, arcs, None, closed)
    }

    /// Full constructor. `arcs[i]` may carry a cached geodesic arc for
    /// segment `i`; it is checked against the segment endpoints.
    pub fn with_parts(
        vertices: Vec<HPoint>,
        modes: Vec<SegmentMode>,
        arcs: Vec<Option<Arc>>,
        knots: Option<Vec<f64>>,
        closed: bool,
    ) -> Result<Self> {
        if vertices.len() < 2 {
            return invalid("a curve needs at least 2 vertices");
        }
        if modes.len() + 1 != vertices.len() {
            return invalid(format!(
                "{} vertices need {} segment modes, got {}",
                vertices.len(),
                vertices.len() - 1,
                modes.len()
            ));
        }
        if arcs.len() != modes.len() {
            return invalid("arc list length must match the segment count");
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return invalid(format!("non-finite vertex {v:?}"));
        }
        let mut solved = Vec::with_capacity(modes.len());
        for (i, (&mode, arc)) in modes.iter().zip(arcs).enumerate() {
            let (p, q) = (vertices[i], vertices[i + 1]);
            match mode {
                SegmentMode::Geodesic => {
                    let arc = match arc {
                        Some(a) => {
                            let end = mul(p, a.local_point(a.length));
                            let scale = 1.0 + p.coord_norm() + q.coord_norm();
                            if !(a.length >= 0.0) || end.coord_dist(q) > 1e-9 * scale {
                                return invalid(format!("cached arc of segment {i} does not end at its vertex"));
                            }
                            a
                        }
                        None => Arc::solve(between(p, q))?,
                    };
                    solved.push(arc);
                }
                SegmentMode::Vertical => {
                    if p.x != q.x || p.y != q.y {
                        return invalid(format!("vertical segment {i} changes x or y"));
                    }
                    solved.push(Arc::ZERO);
                }
                SegmentMode::Straight => solved.push(Arc::ZERO),
            }
        }
        if closed {
            let (a, b) = (vertices[0], vertices[vertices.len() - 1]);
            if a.coord_dist(b) > CLOSE_TOL * (1.0 + a.coord_norm()) {
                return invalid(format!("closed curve endpoints differ: {a:?} vs {b:?}"));
            }
        }
        let mut curve = HCurve { vertices, modes, arcs: solved, knots: Vec::new(), cum: Vec::new(), closed };
        curve.cum = curve.cumulative();
        curve.knots = match knots {
            Some(k) => {
                check_knots(&k, curve.vertices.len())?;
                k
            }
            None => uniform_knots(curve.vertices.len()),
        };
        Ok(curve)
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.vertices.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..self.modes.len() {
            acc += self.segment_length(i);
            cum.push(acc);
        }
        cum
    }

    pub fn vertices(&self) -> &[HPoint] {
        &self.vertices
    }

    pub fn modes(&self) -> &[SegmentMode] {
        &self.modes
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segment_count(&self) -> usize {
        self.modes.len()
    }

    /// Cached arc of a geodesic segment.
    pub fn arc(&self, i: usize) -> Option<Arc> {
        (self.modes[i] == SegmentMode::Geodesic).then(|| self.arcs[i])
    }

    pub fn basepoint(&self) -> HPoint {
        self.vertices[0]
    }

    /// Length used for arc-length parametrization: planar length for
    /// straight segments, geodesic length, or |Δz| for vertical ones.
    pub fn segment_length(&self, i: usize) -> f64 {
        let (p, q) = (self.vertices[i], self.vertices[i + 1]);
        match self.modes[i] {
            SegmentMode::Straight => (q.x - p.x).hypot(q.y - p.y),
            SegmentMode::Geodesic => self.arcs[i].length,
            SegmentMode::Vertical => (q.z - p.z).abs(),
        }
    }

    /// Total arc length in the parametrizing sense of [`segment_length`](Self::segment_length).
    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn cumulative_lengths(&self) -> &[f64] {
        &self.cum
    }

    /// Length of the straight segment's z-defect `Δz − (x₀+x₁)Δy/2`.
    fn defect(&self, i: usize) -> f64 {
        let (p, q) = (self.vertices[i], self.vertices[i + 1]);
        (q.z - p.z) - 0.5 * (p.x + q.x) * (q.y - p.y)
    }

    /// Point of segment `i` at local fraction `u ∈ [0,1]` (linear in arc length).
    pub fn segment_point(&self, i: usize, u: f64) -> HPoint {
        let (p, q) = (self.vertices[i], self.vertices[i + 1]);
        if u <= 0.0 {
            return p;
        }
        if u >= 1.0 {
            return q;
        }
        match self.modes[i] {
            SegmentMode::Geodesic => {
                let a = self.arcs[i];
                mul(p, a.local_point(u * a.length))
            }
            SegmentMode::Straight | SegmentMode::Vertical => {
                let dx = q.x - p.x;
                let dy = q.y - p.y;
                let d = self.defect(i);
                HPoint::raw(p.x + u * dx, p.y + u * dy, p.z + p.x * dy * u + 0.5 * dx * dy * u * u + d * u)
            }
        }
    }

    /// Segment index and local fraction for arc length `s`.
    fn locate_length(&self, s: f64) -> (usize, f64) {
        let n = self.modes.len();
        let total = self.length();
        if s <= 0.0 || total == 0.0 {
            return (0, 0.0);
        }
        if s >= total {
            return (n - 1, 1.0);
        }
        // largest i with cum[i] <= s
        let i = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
        .min(n - 1);
        let len = self.cum[i + 1] - self.cum[i];
        let u = if len > 0.0 { (s - self.cum[i]) / len } else { 0.0 };
        (i, u)
    }

    /// Point at arc-length fraction `f ∈ [0,1]`.
    pub fn arc_point(&self, f: f64) -> HPoint {
        let (i, u) = self.locate_length(f * self.length());
        self.segment_point(i, u)
    }

    /// Point at parameter `t ∈ [0,1]`.
    pub fn point_at(&self, t: f64) -> HPoint {
        let n = self.modes.len();
        if t <= 0.0 {
            return self.vertices[0];
        }
        if t >= 1.0 {
            return self.vertices[n];
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.vertices[i],
            Err(i) => i - 1,
        };
        let u = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.segment_point(i, u)
    }

    /// Arc-length fraction reached at parameter `t`.
    pub fn param_to_arc_fraction(&self, t: f64) -> f64 {
        let total = self.length();
        if total == 0.0 {
            return t.clamp(0.0, 1.0);
        }
        let n = self.modes.len();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.cum[i] / total,
            Err(i) => (i - 1).min(n - 1),
        };
        let u = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        (self.cum[i] + u * (self.cum[i + 1] - self.cum[i])) / total
    }

    /// d_c-length: straight segments contribute their planar length,
    /// geodesic segments their cached length. Vertical segments are rejected.
    pub fn length_dc(&self) -> Result<f64> {
        for (i, m) in self.modes.iter().enumerate() {
            if *m == SegmentMode::Vertical && self.vertices[i].z != self.vertices[i + 1].z {
                return Err(Error::NotHorizontal(format!("segment {i} is vertical")));
            }
        }
        Ok(self.length())
    }

    /// True iff every straight segment satisfies the lift relation within
    /// `tol · segment length` and no vertical segment moves.
    pub fn is_horizontal(&self, tol: f64) -> bool {
        (0..self.modes.len()).all(|i| {
            let (p, q) = (self.vertices[i], self.vertices[i + 1]);
            match self.modes[i] {
                SegmentMode::Geodesic => true,
                SegmentMode::Vertical => p.z == q.z,
                SegmentMode::Straight => {
                    let dy = q.y - p.y;
                    let rounding = 8.0 * f64::EPSILON * (p.z.abs() + q.z.abs() + (p.x.abs() + q.x.abs()) * dy.abs());
                    self.defect(i).abs() <= tol * self.segment_length(i) + rounding
                }
            }
        })
    }

    /// `∫ x dy` over the planar projection.
    pub fn planar_area_integral(&self) -> f64 {
        (0..self.modes.len())
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[i + 1]);
                match self.modes[i] {
                    SegmentMode::Straight => 0.5 * (p.x + q.x) * (q.y - p.y),
                    // a geodesic is horizontal, so ∫x dy is its z increment
                    SegmentMode::Geodesic => q.z - p.z,
                    SegmentMode::Vertical => 0.0,
                }
            })
            .sum()
    }

    /// Image under a Heisenberg similarity; cached arcs are rescaled.
    pub fn transform(&self, sim: &HSim) -> HCurve {
        let vertices = self.vertices.iter().map(|&v| sim.apply(v)).collect();
        let arcs = self.arcs.iter().map(|a| a.scaled(sim.scale)).collect();
        let cum = self.cum.iter().map(|c| c * sim.scale).collect();
        HCurve { vertices, modes: self.modes.clone(), arcs, knots: self.knots.clone(), cum, closed: self.closed }
    }

    pub fn left_translate(&self, g: HPoint) -> HCurve {
        self.transform(&HSim { translation: g, scale: 1.0 })
    }

    /// Replaces the knots by arc-length fractions (no resampling).
    pub fn arc_length_parametrized(mut self) -> HCurve {
        let total = self.length();
        if total > 0.0 {
            let mut k: Vec<f64> = self.cum.iter().map(|c| c / total).collect();
            let n = k.len();
            k[n - 1] = 1.0;
            // zero-length segments would repeat a knot; keep strict monotonicity
            if check_knots(&k, n).is_ok() {
                self.knots = k;
            }
        }
        self
    }

    /// Open sub-curve between arc-length fractions `f0 < f1`.
    pub fn sub_curve(&self, f0: f64, f1: f64) -> Result<HCurve> {
        if !(0.0..=1.0).contains(&f0) || !(0.0..=1.0).contains(&f1) || f0 >= f1 {
            return invalid(format!("sub-curve bounds must satisfy 0 ≤ f0 < f1 ≤ 1, got {f0}, {f1}"));
        }
        let total = self.length();
        let (s0, s1) = (f0 * total, f1 * total);
        let (i0, u0) = self.locate_length(s0);
        let (i1, u1) = self.locate_length(s1);
        let eps = 1e-13 * total;
        let mut vertices = vec![self.segment_point(i0, u0)];
        let mut modes = Vec::new();
        let mut arcs = Vec::new();
        let mut start_s = s0;
        for i in i0..=i1 {
            let seg_end_s = if i == i1 { s1 } else { self.cum[i + 1] };
            if seg_end_s - start_s <= eps && !(i == i1 && modes.is_empty()) {
                start_s = start_s.max(seg_end_s);
                continue;
            }
            let end = if i == i1 { self.segment_point(i1, u1) } else { self.vertices[i + 1] };
            modes.push(self.modes[i]);
            arcs.push(match self.modes[i] {
                SegmentMode::Geodesic => Some(self.arcs[i].sub(start_s - self.cum[i], seg_end_s - self.cum[i])),
                _ => None,
            });
            vertices.push(end);
            start_s = seg_end_s;
        }
        let mut c = HCurve::with_parts(vertices, modes, arcs, None, false)?;
        c = c.arc_length_parametrized();
        Ok(c)
    }

    /// Concatenates open pieces; each piece must start where the previous ended.
    pub fn concat(pieces: &[HCurve], closed: bool) -> Result<HCurve> {
        if pieces.is_empty() {
            return invalid("nothing to concatenate");
        }
        let mut vertices = vec![pieces[0].vertices[0]];
        let mut modes = Vec::new();
        let mut arcs = Vec::new();
        for p in pieces {
            let last = *vertices.last().unwrap();
            if last.coord_dist(p.vertices[0]) > CLOSE_TOL * (1.0 + last.coord_norm()) {
                return invalid("concatenated pieces do not join");
            }
            for i in 0..p.modes.len() {
                modes.push(p.modes[i]);
                arcs.push((p.modes[i] == SegmentMode::Geodesic).then(|| p.arcs[i]));
                vertices.push(p.vertices[i + 1]);
            }
        }
        if closed {
            let n = vertices.len();
            vertices[n - 1] = vertices[0];
        }
        HCurve::with_parts(vertices, modes, arcs, None, closed)
    }

    pub fn reversed(&self) -> HCurve {
        let vertices: Vec<HPoint> = self.vertices.iter().rev().copied().collect();
        let modes: Vec<SegmentMode> = self.modes.iter().rev().copied().collect();
        let arcs: Vec<Arc> = self.arcs.iter().rev().map(|a| a.reversed()).collect();
        let knots: Vec<f64> = self.knots.iter().rev().map(|k| 1.0 - k).collect();
        let mut c = HCurve { vertices, modes, arcs, knots, cum: Vec::new(), closed: self.closed };
        c.cum = c.cumulative();
        c
    }

    /// Samples `per_segment` points per segment plus the final vertex.
    pub fn sample_polyline(&self, per_segment: usize) -> Vec<HPoint> {
        let k = per_segment.max(1);
        let mut out = Vec::with_capacity(self.modes.len() * k + 1);
        for i in 0..self.modes.len() {
            let steps = if self.modes[i] == SegmentMode::Geodesic { k } else { 1 };
            for j in 0..steps {
                out.push(self.segment_point(i, j as f64 / steps as f64));
            }
        }
        out.push(*self.vertices.last().unwrap());
        out
    }
}

fn uniform_knots(n: usize) -> Vec<f64> {
    let mut k: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    k[n - 1] = 1.0;
    k
}

fn check_knots(k: &[f64], n: usize) -> Result<()> {
    if k.len() != n {
        return invalid(format!("expected {n} knots, got {}", k.len()));
    }
    if k[0] != 0.0 || k[n - 1] != 1.0 {
        return invalid("knots must start at 0 and end at 1");
    }
    if k.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("knots must be strictly increasing");
    }
    Ok(())
}

/// Horizontal lift of a planar polyline starting at height `z0`.
pub fn horizontal_lift(planar: &[[f64; 2]], z0: f64) -> Result<HCurve> {
    if planar.len() < 2 {
        return invalid("lift needs at least 2 planar points");
    }
    let mut vertices = Vec::with_capacity(planar.len());
    let mut z = z0;
    vertices.push(HPoint::new(planar[0][0], planar[0][1], z)?);
    for w in planar.windows(2) {
        z += 0.5 * (w[0][0] + w[1][0]) * (w[1][1] - w[0][1]);
        vertices.push(HPoint::new(w[1][0], w[1][1], z)?);
    }
    HCurve::new(vertices, vec![SegmentMode::Straight; planar.len() - 1], false)
}

/// Appends a cc-geodesic from the last vertex back to the first and marks the curve closed.
pub fn close_with_geodesic(c: &HCurve) -> Result<HCurve> {
    let mut vertices = c.vertices.clone();
    let mut modes = c.modes.clone();
    let mut arcs: Vec<Option<Arc>> =
        c.modes.iter().zip(&c.arcs).map(|(m, a)| (*m == SegmentMode::Geodesic).then_some(*a)).collect();
    let (first, last) = (vertices[0], *vertices.last().unwrap());
    if first != last {
        let g = Geodesic::solve(last, first)?;
        vertices.push(first);
        modes.push(SegmentMode::Geodesic);
        arcs.push(Some(g.arc));
    }
    HCurve::with_parts(vertices, modes, arcs, None, true)
}

/// Reparametrizes by arc length, splitting each segment into `samples`
/// equal-length pieces. The image set is unchanged.
pub fn constant_speed(c: &HCurve, samples: usize) -> Result<HCurve> {
    let total = c.length();
    if !(total > 0.0) {
        return invalid("cannot reparametrize a zero-length curve");
    }
    let k = samples.max(1);
    let mut vertices = vec![c.vertices[0]];
    let mut modes = Vec::new();
    let mut arcs = Vec::new();
    for i in 0..c.modes.len() {
        let len = c.segment_length(i);
        if len == 0.0 {
            continue;
        }
        for j in 1..=k {
            let u = j as f64 / k as f64;
            vertices.push(c.segment_point(i, u));
            modes.push(c.modes[i]);
            arcs.push(match c.modes[i] {
                SegmentMode::Geodesic => Some(c.arcs[i].sub(len * (j - 1) as f64 / k as f64, len * u)),
                _ => None,
            });
        }
    }
    if c.closed {
        let n = vertices.len();
        vertices[n - 1] = vertices[0];
    }
    Ok(HCurve::with_parts(vertices, modes, arcs, None, c.closed)?.arc_length_parametrized())
}

/// `(g⁻¹·c, g)` with `g = c(0)`; the new basepoint is exactly the identity.
pub fn translate_to_origin(c: &HCurve) -> (HCurve, HPoint) {
    let g = c.basepoint();
    let mut out = c.left_translate(inv(g));
    out.vertices[0] = IDENTITY;
    if out.closed {
        let n = out.vertices.len();
        out.vertices[n - 1] = IDENTITY;
    }
    (out, g)
}

/// d_c-length of a horizontal curve.
pub fn curve_length_dc(c: &HCurve) -> Result<f64> {
    c.length_dc()
}

pub fn is_horizontal(c: &HCurve, tol: f64) -> bool {
    c.is_horizontal(tol)
}

/// One-segment-per-sample cc-geodesic curve from `p` to `q`.
pub fn cc_geodesic(p: HPoint, q: HPoint, samples: usize, tol: f64) -> Result<HCurve> {
    if samples < 2 {
        return invalid("a geodesic needs at least 2 samples");
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let g = Geodesic::solve(p, q)?;
    if g.length() == 0.0 {
        return HCurve::new(vec![p, q], vec![SegmentMode::Straight], false);
    }
    let n = samples - 1;
    let mut vertices = Vec::with_capacity(samples);
    let mut arcs = Vec::with_capacity(n);
    for j in 0..=n {
        vertices.push(g.point_at(j as f64 / n as f64));
    }
    let len = g.length();
    for j in 0..n {
        arcs.push(Some(g.arc.sub(len * j as f64 / n as f64, len * (j + 1) as f64 / n as f64)));
    }
    HCurve::with_parts(vertices, vec![SegmentMode::Geodesic; n], arcs, None, false)
}

/// JSON form. `arcs` is optional and makes geodesic segments round-trip exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub closed: bool,
    pub vertices: Vec<HPoint>,
    pub modes: Vec<SegmentMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<Option<[f64; 3]>>>,
}

impl From<&HCurve> for CurveFile {
    fn from(c: &HCurve) -> Self {
        let arcs = c
            .modes
            .iter()
            .zip(&c.arcs)
            .map(|(m, a)| (*m == SegmentMode::Geodesic).then_some([a.heading, a.turn, a.length]))
            .collect();
        CurveFile {
            closed: c.closed,
            vertices: c.vertices.clone(),
            modes: c.modes.clone(),
            knots: Some(c.knots.clone()),
            arcs: Some(arcs),
        }
    }
}

impl TryFrom<CurveFile> for HCurve {
    type Error = Error;
    fn try_from(f: CurveFile) -> Result<HCurve> {
        let arcs = match f.arcs {
            Some(a) => {
                if a.len() != f.modes.len() {
                    return invalid("arcs must have one entry per segment");
                }
                a.into_iter().map(|o| o.map(|[h, t, l]| Arc { heading: h, turn: t, length: l })).collect()
            }
            None => vec![None; f.modes.len()],
        };
        HCurve::with_parts(f.vertices, f.modes, arcs, f.knots, f.closed)
    }
}

impl Serialize for HCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = CurveFile::deserialize(d)?;
        HCurve::try_from(f).map_err(serde::de::Error::custom)
    }
}

/// Planar input of the `lift` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarFile {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub z0: f64,
}
