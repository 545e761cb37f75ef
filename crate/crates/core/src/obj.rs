//! Wavefront OBJ polylines: `v x y z` vertices and `l` line elements.

use std::io::Write;

use crate::error::{invalid, Result};

pub fn write_polylines(w: &mut impl Write, lines: &[Vec<[f64; 3]>]) -> std::io::Result<()> {
    let mut base = 1usize;
    for line in lines {
        for p in line {
            writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
        }
        if line.len() >= 2 {
            write!(w, "l")?;
            for i in 0..line.len() {
                write!(w, " {}", base + i)?;
            }
            writeln!(w)?;
        }
        base += line.len();
    }
    Ok(())
}

/// Inverse of [`write_polylines`]; vertices not referenced by a line are dropped.
pub fn read_polylines(text: &str) -> Result<Vec<Vec<[f64; 3]>>> {
    let mut verts = Vec::new();
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let mut it = raw.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(str::parse).collect::<std::result::Result<_, _>>().or_else(|e| {
                    invalid(format!("line {}: bad vertex: {e}", no + 1))
                })?;
                if c.len() < 3 {
                    return invalid(format!("line {}: vertex needs three coordinates", no + 1));
                }
                verts.push([c[0], c[1], c[2]]);
            }
            Some("l") => {
                let mut line = Vec::new();
                for t in it {
                    let i: usize = t.split('/').next().unwrap_or("").parse().or_else(|e| {
                        invalid(format!("line {}: bad index: {e}", no + 1))
                    })?;
                    match verts.get(i.wrapping_sub(1)) {
                        Some(v) => line.push(*v),
                        None => return invalid(format!("line {}: index {i} out of range", no + 1)),
                    }
                }
                lines.push(line);
            }
            _ => {}
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let lines = vec![vec![[0.1, 0.2, 1e-17], [1.0 / 3.0, -2.5, 7.0]], vec![[4.0, 5.0, 6.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]];
        let mut buf = Vec::new();
        write_polylines(&mut buf, &lines).unwrap();
        let back = read_polylines(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, lines);
    }

    #[test]
    fn bad_index() {
        assert!(read_polylines("v 0 0 0\nl 1 2\n").is_err());
    }
}
