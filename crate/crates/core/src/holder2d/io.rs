use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::tree::{build_tree_with, SubdivisionTree, TreeOptions};
use crate::curve::HCurve;
use crate::error::{invalid, Result};
use crate::params::CarnotParams;

const MAGIC: &[u8; 8] = b"HEISTREE";
const VERSION: u32 = 1;

/// Everything needed to rebuild a tree; node data is recomputed on load,
/// which is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub gamma: HCurve,
    pub depth: usize,
    pub n_eff: u32,
    pub params: CarnotParams,
    pub options: TreeOptions,
}

impl TreeFile {
    pub fn from_tree(t: &SubdivisionTree) -> TreeFile {
        TreeFile {
            gamma: t.gamma().clone(),
            depth: t.depth(),
            n_eff: t.n_eff(),
            params: *t.params(),
            options: t.options(),
        }
    }

    pub fn build(&self) -> Result<SubdivisionTree> {
        build_tree_with(&self.gamma, self.depth, self.n_eff, &self.params, self.options)
    }
}

/// Header `HEISTREE`, little-endian u32 version, u64 payload length, JSON payload.
pub fn write_tree_file(w: &mut impl Write, f: &TreeFile) -> std::io::Result<()> {
    let body = serde_json::to_vec(f).map_err(std::io::Error::other)?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(body.len() as u64).to_le_bytes())?;
    w.write_all(&body)
}

pub fn read_tree_file(r: &mut impl Read) -> Result<TreeFile> {
    let mut buf = Vec::new();
    if let Err(e) = r.read_to_end(&mut buf) {
        return invalid(format!("reading tree file: {e}"));
    }
    if buf.len() < 20 || &buf[..8] != MAGIC {
        return invalid("not a tree file (bad header)");
    }
    let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if version != VERSION {
        return invalid(format!("unsupported tree file version {version}"));
    }
    let len = u64::from_le_bytes(buf[12..20].try_into().unwrap()) as usize;
    if buf.len() - 20 != len {
        return invalid(format!("tree file payload is {} bytes, header says {len}", buf.len() - 20));
    }
    let de = &mut serde_json::Deserializer::from_slice(&buf[20..]);
    serde_path_to_error::deserialize(de).or_else(|e| invalid(format!("tree file: {}: {}", e.path(), e.inner())))
}
