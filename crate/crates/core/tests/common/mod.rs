#![allow(dead_code)]

use heis::curve::{close_with_geodesic, horizontal_lift, translate_to_origin};
use heis::{HCurve, HSim, IDENTITY};
use rand::Rng;

pub fn unit_square() -> HCurve {
    let sq = vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.], [0., 0.]];
    close_with_geodesic(&horizontal_lift(&sq, 0.0).unwrap()).unwrap()
}

/// Random star-shaped polygon, lifted and closed by a geodesic.
pub fn random_closed(rng: &mut impl Rng, vertices: usize) -> HCurve {
    let mut pts: Vec<[f64; 2]> = (0..vertices)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * (i as f64 + rng.gen_range(0.0..0.8)) / vertices as f64;
            let r = rng.gen_range(0.3..1.5);
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    pts.push(pts[0]);
    close_with_geodesic(&horizontal_lift(&pts, rng.gen_range(-1.0..1.0)).unwrap()).unwrap()
}

/// Based at the identity and dilated to length `r`.
pub fn normalized(c: &HCurve, r: f64) -> HCurve {
    let (c0, _) = translate_to_origin(c);
    let len = c0.length_dc().unwrap();
    c0.transform(&HSim { translation: IDENTITY, scale: r / len })
}
