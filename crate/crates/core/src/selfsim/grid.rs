use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// First `count` balls of an `m^d` grid of cell centers in the cube
/// `[−1/(2√d), 1/(2√d)]^d`, `m` the least with `m^d ≥ count`, radius `(8m√d)⁻¹`.
pub fn separated_grid(d: u32, count: usize) -> Result<Vec<Ball>> {
    if d != 2 && d != 3 {
        return invalid(format!("dimension must be 2 or 3, got {d}"));
    }
    if count == 0 {
        return invalid("count must be positive");
    }
    let mut m = 1usize;
    while m.pow(d) < count {
        m += 1;
    }
    let sd = (d as f64).sqrt();
    let w = 1.0 / (m as f64 * sd);
    let lo = -0.5 / sd;
    let radius = 1.0 / (8.0 * m as f64 * sd);
    let coord = |i: usize| lo + (i as f64 + 0.5) * w;
    let balls = (0..count)
        .map(|k| {
            let mut idx = k;
            let center = (0..d)
                .map(|_| {
                    let c = coord(idx % m);
                    idx /= m;
                    c
                })
                .collect();
            Ball { center, radius }
        })
        .collect();
    Ok(balls)
}

/// Doubled balls pairwise disjoint and inside the unit ball, by exhaustive check.
pub fn is_two_separated(balls: &[Ball]) -> bool {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let inside = balls.iter().all(|b| norm(&b.center) + 2.0 * b.radius <= 1.0);
    inside
        && crate::par::map_range(balls.len(), |i| {
            let a = &balls[i];
            balls[i + 1..].iter().all(|b| {
                let d: f64 = a.center.iter().zip(&b.center).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                d > 2.0 * (a.radius + b.radius)
            })
        })
        .into_iter()
        .all(|x| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let one = separated_grid(2, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].radius - 1.0 / (8.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(one[0].center, vec![0.0, 0.0]);
        let four = separated_grid(2, 4).unwrap();
        assert!((four[0].radius - 1.0 / (16.0 * 2f64.sqrt())).abs() < 1e-15);
        let d01 = (four[0].center[0] - four[1].center[0]).abs();
        assert!((d01 - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(is_two_separated(&four));
        let big = separated_grid(3, 1000).unwrap();
        assert!((big[0].radius - 1.0 / (80.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!(is_two_separated(&big));
    }

    #[test]
    fn overlapping_detected() {
        let b = vec![Ball { center: vec![0.0, 0.0], radius: 0.1 }, Ball { center: vec![0.3, 0.0], radius: 0.1 }];
        assert!(!is_two_separated(&b));
    }
}
