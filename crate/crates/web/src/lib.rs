//! Browser bindings: a geodesic explorer, a filling viewer and an
//! extension heatmap. The `*_json` functions are the native-testable core.

use heis::curve::{cc_geodesic, close_with_geodesic, horizontal_lift};
use heis::filling::{coarse_filling, filling_counts};
use heis::holder2d::{build_tree, SubdivisionTree};
use heis::{cc_distance, CarnotParams, HCurve, HPoint, IDENTITY};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest filling the page will draw.
pub const MAX_TRIANGLES: usize = 60_000;

fn to_js(e: heis::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Geodesic from the identity to `(x, y, z)`: `{distance, points}`.
pub fn geodesic_json(x: f64, y: f64, z: f64, samples: usize) -> heis::Result<String> {
    let p = HPoint::new(x, y, z)?;
    let d = cc_distance(IDENTITY, p, 1e-12)?;
    let pts: Vec<[f64; 3]> = if d == 0.0 {
        vec![[0.0; 3]]
    } else {
        cc_geodesic(IDENTITY, p, samples.max(2), 1e-12)?.vertices().iter().map(|q| [q.x, q.y, q.z]).collect()
    };
    Ok(json!({ "distance": d, "points": pts }).to_string())
}

/// Lifts and closes a planar loop, fills it with comparison constant `l`.
pub fn filling_json(points: &[f64], l: f64) -> heis::Result<String> {
    if points.len() < 6 || !points.len().is_multiple_of(2) {
        return Err(heis::Error::InvalidInput("need at least three (x, y) pairs".into()));
    }
    let planar: Vec<[f64; 2]> = points.chunks(2).map(|c| [c[0], c[1]]).collect();
    let lift = horizontal_lift(&planar, 0.0)?;
    let curve: HCurve = close_with_geodesic(&lift)?;
    let params = CarnotParams::heisenberg(l)?;
    let (bm, m) = filling_counts(curve.length(), &params);
    if 2 * m * bm - bm > MAX_TRIANGLES {
        return Err(heis::Error::InvalidInput(format!(
            "filling would need {} triangles (page limit {MAX_TRIANGLES}); use a smaller loop or larger L",
            2 * m * bm - bm
        )));
    }
    let f = coarse_filling(&curve, &params)?;
    let rep = f.report().cloned();
    let tris: Vec<[[f64; 2]; 3]> = (0..f.triangle_count()).map(|id| f.triangle_planar(id)).collect();
    let ring: Vec<[f64; 3]> = curve.sample_polyline(16).iter().map(|q| [q.x, q.y, q.z]).collect();
    Ok(json!({
        "M": f.angular_count(),
        "m": f.radial_count(),
        "length": curve.length(),
        "triangles": tris,
        "curve": ring,
        "report": rep,
    })
    .to_string())
}

/// Extension of the closed unit-square lift over the disc.
#[wasm_bindgen]
pub struct Extension {
    tree: SubdivisionTree,
}

impl Extension {
    pub fn build(n_eff: u32, depth: usize) -> heis::Result<Extension> {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
        let gamma = close_with_geodesic(&horizontal_lift(&sq, 0.0)?)?;
        Ok(Extension { tree: build_tree(&gamma, depth, n_eff, &CarnotParams::heisenberg(1.0)?)? })
    }

    /// Row-major `res × res` samples of one coordinate over `[−1, 1]²`; NaN off the disc.
    pub fn grid(&self, res: usize, component: usize) -> heis::Result<Vec<f64>> {
        let res = res.clamp(2, 512);
        let mut out = Vec::with_capacity(res * res);
        for i in 0..res {
            for j in 0..res {
                let x = -1.0 + 2.0 * (j as f64 + 0.5) / res as f64;
                let y = 1.0 - 2.0 * (i as f64 + 0.5) / res as f64;
                if x * x + y * y > 1.0 {
                    out.push(f64::NAN);
                    continue;
                }
                let v = self.tree.evaluate_traced([x, y])?.value;
                out.push(match component {
                    0 => v.x,
                    1 => v.y,
                    _ => v.z,
                });
            }
        }
        Ok(out)
    }
}

#[wasm_bindgen]
impl Extension {
    #[wasm_bindgen(constructor)]
    pub fn new(n_eff: u32, depth: usize) -> Result<Extension, JsError> {
        Extension::build(n_eff, depth).map_err(to_js)
    }

    pub fn heatmap(&self, res: usize, component: usize) -> Result<Vec<f64>, JsError> {
        self.grid(res, component).map_err(to_js)
    }

    /// `[x, y, z, depth]` of the value at a disc point.
    pub fn eval(&self, x: f64, y: f64) -> Result<Vec<f64>, JsError> {
        let e = self.tree.evaluate_traced([x, y]).map_err(to_js)?;
        Ok(vec![e.value.x, e.value.y, e.value.z, e.address.path.len() as f64])
    }

    #[wasm_bindgen(js_name = rootTriangles)]
    pub fn root_triangles(&self) -> usize {
        self.tree.root().child_count()
    }
}

#[wasm_bindgen]
pub fn geodesic(x: f64, y: f64, z: f64, samples: usize) -> Result<String, JsError> {
    geodesic_json(x, y, z, samples).map_err(to_js)
}

/// `points` is a flat `[x0, y0, x1, y1, ...]` loop.
#[wasm_bindgen]
pub fn filling(points: &[f64], l: f64) -> Result<String, JsError> {
    filling_json(points, l).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn geodesic_to_e3() {
        let v: Value = serde_json::from_str(&geodesic_json(0.0, 0.0, 1.0, 16).unwrap()).unwrap();
        assert!((v["distance"].as_f64().unwrap() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-9);
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 16);
        assert!((pts[15][2].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn square_filling() {
        let pts = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        let v: Value = serde_json::from_str(&filling_json(&pts, 1.0).unwrap()).unwrap();
        assert_eq!(v["report"]["violations"], 0);
        assert_eq!(v["triangles"].as_array().unwrap().len() as u64, v["report"]["count"].as_u64().unwrap());
        assert!(filling_json(&pts[..4], 1.0).is_err());
    }

    #[test]
    fn heatmap_off_disc_is_nan() {
        let e = Extension::build(2, 1).unwrap();
        let g = e.grid(8, 2).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g[0].is_nan());
        assert!(g[3 * 8 + 3].is_finite());
    }
}
