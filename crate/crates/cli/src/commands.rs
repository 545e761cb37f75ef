use std::f64::consts::PI;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use heis::curve::{close_with_geodesic, horizontal_lift, PlanarFile};
use heis::filling::{coarse_filling, epsilon_area, filling_counts};
use heis::holder2d::*;
use heis::obj::{read_polylines, write_polylines};
use heis::selfsim::*;
use heis::{HCurve, SegmentMode};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_json, read_text, Config};
use crate::report::{Check, Digest256, Report};
use crate::{CliError, CliResult};

pub struct Context {
    pub cfg: Config,
    digest: Digest256,
    checks: Vec<Check>,
}

impl Context {
    pub fn new(cfg: Config, cfg_text: Option<&str>) -> Self {
        let mut digest = Digest256::default();
        if let Some(t) = cfg_text {
            digest.update("config", t.as_bytes());
        }
        Context { cfg, digest, checks: Vec::new() }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn read(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.digest.update("file", &bytes);
        Ok(bytes)
    }

    fn read_json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let bytes = self.read(path)?;
        let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
        parse_json(path, &text)
    }

    fn read_tree(&mut self, path: &Path) -> CliResult<SubdivisionTree> {
        let bytes = self.read(path)?;
        let f = read_tree_file(&mut bytes.as_slice())?;
        Ok(f.build()?)
    }

    pub fn into_report(mut self, argv: &[String], outputs: Value) -> Report {
        let command = argv.iter().find(|a| !a.starts_with('-')).cloned().unwrap_or_default();
        for a in argv {
            self.digest.update("arg", a.as_bytes());
        }
        Report { command, inputs_digest: self.digest.finish(), outputs, checks: self.checks }
    }
}

// a closed stdout is not an error worth failing over
fn print(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    crate::report::write_json(path, v)
}

fn write_obj(path: &Path, lines: &[Vec<[f64; 3]>]) -> CliResult<()> {
    let f = std::fs::File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    write_polylines(&mut w, lines).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Largest coordinate deviation after reading an OBJ file back.
fn obj_roundtrip_error(path: &Path, lines: &[Vec<[f64; 3]>]) -> CliResult<f64> {
    let back = read_polylines(&read_text(path)?)?;
    if back.len() != lines.len() || back.iter().zip(lines).any(|(a, b)| a.len() != b.len()) {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0f64;
    for (a, b) in back.iter().zip(lines) {
        for (p, q) in a.iter().zip(b) {
            for k in 0..3 {
                worst = worst.max((p[k] - q[k]).abs());
            }
        }
    }
    Ok(worst)
}

/// Height defect of straight segments; geodesic segments are horizontal by construction.
fn horizontal_defect(c: &HCurve) -> f64 {
    let v = c.vertices();
    let n = c.segment_count();
    let mut worst = 0.0f64;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % v.len()]);
        let d = match c.modes()[i] {
            SegmentMode::Straight => (q.z - p.z - 0.5 * (p.x + q.x) * (q.y - p.y)).abs(),
            SegmentMode::Vertical => (q.z - p.z).abs(),
            SegmentMode::Geodesic => 0.0,
        };
        worst = worst.max(d);
    }
    worst
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Planar JSON `{"points": [[x, y], ...], "z0": z}`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Close the lift with a geodesic back to its start.
    #[arg(long)]
    close: bool,
}

pub fn lift(ctx: &mut Context, a: &LiftArgs) -> CliResult<Value> {
    let pf: PlanarFile = ctx.read_json(&a.input)?;
    let mut c = horizontal_lift(&pf.points, pf.z0)?;
    let planar_len: f64 = pf.points.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
    let lift_len = c.length_dc()?;
    ctx.check(Check::le("lift_length_identity", (lift_len - planar_len).abs() / planar_len.max(1e-300), 1e-12));
    if a.close {
        c = close_with_geodesic(&c)?;
    }
    ctx.check(Check::le("horizontal", horizontal_defect(&c), 1e-12));
    write_json(&a.out, &c)?;
    let end = *c.vertices().last().unwrap();
    let out = json!({
        "segments": c.segment_count(),
        "closed": c.is_closed(),
        "length_dc": c.length(),
        "lift_endpoint": [end.x, end.y, end.z],
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct FillArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also report the ε-area bound of the curve.
    #[arg(long)]
    eps: Option<f64>,
    /// OBJ export of the filling's 1-skeleton.
    #[arg(long)]
    obj: Option<PathBuf>,
    /// Points per sampled edge polyline.
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Refuse fillings with more triangles than this.
    #[arg(long, default_value_t = 2_000_000)]
    max_triangles: usize,
}

pub fn fill(ctx: &mut Context, a: &FillArgs) -> CliResult<Value> {
    let params = ctx.cfg.carnot()?;
    let c: HCurve = ctx.read_json(&a.input)?;
    let (bm, m) = filling_counts(c.length(), &params);
    let planned = 2 * m * bm - bm;
    if planned > a.max_triangles {
        return Err(CliError::Input(format!(
            "filling would have {planned} triangles (limit {}); raise --max-triangles or use a shorter curve",
            a.max_triangles
        )));
    }
    let f = coarse_filling(&c, &params)?;
    let rep = f.report().cloned().ok_or_else(|| CliError::Numeric("filling was not verified".into()))?;
    ctx.check(Check::le("perimeter_6L", rep.max_perimeter, rep.perimeter_bound));
    ctx.check(Check::le("count_2mM", rep.count as f64, rep.count_bound as f64));
    ctx.check(Check::le("perimeter_violations", rep.violations as f64, 0.0));
    let file = f.to_file(a.samples.max(2))?;
    write_json(&a.out, &file)?;
    let mut out = json!({
        "L": params.l,
        "M": f.angular_count(),
        "m": f.radial_count(),
        "triangles": f.triangle_count(),
        "count_bound": rep.count_bound,
        "max_perimeter": rep.max_perimeter,
        "perimeter_bound": rep.perimeter_bound,
    });
    if let Some(eps) = a.eps {
        out["eps"] = json!(eps);
        out["eps_area"] = json!(epsilon_area(&c, eps, &params)?);
    }
    if let Some(p) = &a.obj {
        let lines: Vec<Vec<[f64; 3]>> =
            file.edges.iter().map(|e| e.polyline.iter().map(|q| [q.x, q.y, q.z]).collect()).collect();
        write_obj(p, &lines)?;
        ctx.check(Check::le("obj_roundtrip", obj_roundtrip_error(p, &lines)?, 1e-6));
    }
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    depth: usize,
    /// Shrink factor per level.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    out: PathBuf,
    /// Build every node up front instead of on demand.
    #[arg(long)]
    eager: bool,
    /// Node budget for --eager.
    #[arg(long, default_value_t = 20_000)]
    max_nodes: usize,
}

/// Children of the root that the extend checks look at.
const CHECK_CHILDREN: usize = 16;
const CHECK_ANGLES: usize = 32;
const CHECK_BOUNDARY: usize = 256;

pub fn extend(ctx: &mut Context, a: &ExtendArgs) -> CliResult<Value> {
    let params = ctx.cfg.carnot()?;
    let tol = ctx.cfg.tolerances.check;
    let c: HCurve = ctx.read_json(&a.input)?;
    let mode = if a.eager { TreeMode::Eager } else { TreeMode::Lazy };
    let tree = build_tree_with(&c, a.depth, a.n, &params, TreeOptions { mode, max_nodes: a.max_nodes })?;

    let g = tree.gamma();
    let mut boundary = 0.0f64;
    for k in 0..CHECK_BOUNDARY {
        let f = (k as f64 + 0.5) / CHECK_BOUNDARY as f64;
        let t = 2.0 * PI * f;
        let v = tree.evaluate_traced([t.cos(), t.sin()])?.value;
        boundary = boundary.max(v.coord_dist(g.arc_point(f)));
    }
    ctx.check(Check::le("boundary_restriction", boundary, tol));

    let root = tree.root().clone();
    let mut sampled = 0;
    if tree.has_children(&root) {
        let (mut decay, mut interface) = (0.0f64, 0.0f64);
        let count = root.child_count();
        let step = (count / CHECK_CHILDREN).max(1);
        for id in (0..count).step_by(step).take(CHECK_CHILDREN) {
            let child = tree.child(&root, id)?;
            decay = decay.max(child.length() / root.length());
            for k in 0..CHECK_ANGLES {
                let (o, i) = tree.interface_values(&root, id, 2.0 * PI * k as f64 / CHECK_ANGLES as f64)?;
                interface = interface.max(o.coord_dist(i));
            }
            sampled += 1;
        }
        ctx.check(Check::le("decay_factor", decay, (1.0 + 1e-6) / a.n as f64));
        ctx.check(Check::le("interface_continuity", interface, tol));
    }

    let file = TreeFile::from_tree(&tree);
    let mut w = Vec::new();
    write_tree_file(&mut w, &file).map_err(|e| CliError::Input(e.to_string()))?;
    std::fs::write(&a.out, &w).map_err(|e| CliError::Input(format!("{}: {e}", a.out.display())))?;
    let back = read_tree_file(&mut w.as_slice())?;
    ctx.check(Check::le("tree_file_roundtrip", f64::from(u8::from(back != file)), 0.0));

    let out = json!({
        "depth": tree.depth(),
        "n_eff": tree.n_eff(),
        "mode": mode,
        "reference_length": tree.reference_length(),
        "root_triangles": root.child_count(),
        "children_checked": sampled,
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    /// Fail with exit 3 unless the value is within this d_c-distance of every refinement.
    #[arg(long)]
    tol: Option<f64>,
}

pub fn eval(ctx: &mut Context, a: &EvalArgs) -> CliResult<Value> {
    let tree = ctx.read_tree(&a.tree)?;
    let e = match a.tol {
        Some(tol) => {
            let v = evaluate(&tree, [a.x, a.y], tol)?;
            let e = tree.evaluate_traced([a.x, a.y])?;
            debug_assert_eq!(v, e.value);
            ctx.check(Check::le("refinement_bound", e.bound, tol));
            e
        }
        None => tree.evaluate_traced([a.x, a.y])?,
    };
    let v = e.value;
    let out = json!({
        "x": [a.x, a.y],
        "value": [v.x, v.y, v.z],
        "path": e.address.path,
        "residual": e.address.residual,
        "bound": e.bound,
        "sliver": e.sliver,
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Exponent at which λ̂ is measured.
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Growth exponent of the Dehn function in the prediction.
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
}

pub fn exponent(ctx: &mut Context, a: &ExponentArgs) -> CliResult<Value> {
    let tree = ctx.read_tree(&a.tree)?;
    let seed = a.seed.or(ctx.cfg.seed).unwrap_or(0);
    let est = holder_estimate(&tree, a.alpha, a.pairs, seed)?;
    let k_emp = empirical_dehn_base(&tree);
    let pred = predicted_exponent_2d(tree.n_eff(), k_emp, a.beta)?;
    ctx.check(Check::ge("alpha_fit_vs_predicted", est.alpha_fit, 0.9 * pred));
    ctx.check(Check::le("lambda_hat_finite", f64::from(u8::from(!est.lambda_hat.is_finite())), 0.0));
    let out = json!({
        "seed": seed,
        "K_emp": k_emp,
        "predicted_exponent": pred,
        "estimate": est,
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    out: PathBuf,
    /// Points per curve segment.
    #[arg(long, default_value_t = 4)]
    samples: usize,
    #[arg(long, default_value_t = 500_000)]
    max_curves: usize,
}

pub fn mesh(ctx: &mut Context, a: &MeshArgs) -> CliResult<Value> {
    let tree = ctx.read_tree(&a.tree)?;
    let m = export_mesh(&tree, a.depth, a.samples, a.max_curves)?;
    write_obj(&a.out, &m.polylines)?;
    ctx.check(Check::le("obj_roundtrip", obj_roundtrip_error(&a.out, &m.polylines)?, 1e-6));
    let out = json!({
        "curves": m.polylines.len(),
        "vertices": m.vertex_count(),
        "per_depth": m.per_depth,
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    c: f64,
    /// Displacement constant.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Max cell diameter.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Level at which per-level bounds are evaluated.
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long)]
    json: bool,
}

pub fn params(ctx: &mut Context, a: &ParamsArgs) -> CliResult<Value> {
    let e = eta(a.n, a.c)?;
    let r = rho(a.n, a.c)?;
    let id_err = eta_rho_identity_error(a.n, a.c, 8)?;
    ctx.check(Check::le("eta_rho_identity", (e * r.log2() + a.n as f64).abs() / a.n as f64, 1e-12));
    ctx.check(Check::le("eta_rho_powers", id_err, 1e-12));
    let disp = displacement_bounds(a.b, a.n, a.level)?;
    let tail = displacement_tail(a.b, a.n, a.level);
    ctx.check(Check::le("displacement_tail", tail, disp.total * (1.0 + 1e-12)));
    let nb = neighborhood_bound(a.mu, a.n);
    ctx.check(Check::le("neighborhood_telescope", nb.telescope, nb.bound * (1.0 + 1e-12)));
    let out = json!({
        "n": a.n,
        "c": a.c,
        "eta": e,
        "rho": r,
        "identity_error": id_err,
        "avol": { "d2": avol_bound(2, a.n, a.c)?, "d3": avol_bound(3, a.n, a.c)? },
        "avol_compound": {
            "level": a.level,
            "d2": avol_compound(2, a.n, a.c, a.level)?,
            "d3": avol_compound(3, a.n, a.c, a.level)?,
        },
        "displacement": { "b": a.b, "level": a.level, "step": disp.step, "total": disp.total, "tail": tail },
        "properness": properness_bound(a.mu, a.n, a.level as i32),
        "neighborhood": { "mu": a.mu, "bound": nb.bound, "telescope": nb.telescope },
    });
    if a.json {
        print(&out);
    } else {
        let text = format!(
            "eta            {e}\nrho            {r}\navol d=2       {}\navol d=3       {}\n\
             displacement   step {} total {} (level {})\nproperness     {}\nneighborhood   {} (telescope {})",
            out["avol"]["d2"], out["avol"]["d3"], disp.step, disp.total, a.level, out["properness"], nb.bound, nb.telescope
        );
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct SkeletonArgs {
    #[arg(long)]
    n0: u32,
    #[arg(long)]
    n: u32,
    /// Half-width of the window in grid-independent units.
    #[arg(long = "box")]
    box_size: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    max_edges: u64,
}

pub fn skeleton(ctx: &mut Context, a: &SkeletonArgs) -> CliResult<Value> {
    let w = skeleton_window(a.n0, a.n, a.box_size)?;
    ctx.check(Check::le("dilation_failures", w.dilation.failures as f64, 0.0));
    ctx.check(Check::le("lattice_failures", w.lattice.failures as f64, 0.0));
    let edges = w.edges(a.max_edges)?;
    let lines: Vec<Vec<[f64; 3]>> = edges
        .iter()
        .map(|e| {
            let (p, q) = (w.to_point(e.start), w.to_point(e.end()));
            vec![[p.x, p.y, p.z], [q.x, q.y, q.z]]
        })
        .collect();
    write_obj(&a.out, &lines)?;
    ctx.check(Check::le("obj_roundtrip", obj_roundtrip_error(&a.out, &lines)?, 1e-6));
    let mu = w.measured_mu()?;
    let out = json!({
        "n0": a.n0,
        "n": a.n,
        "box": a.box_size,
        "step": w.step(),
        "vertices": w.vertex_count(),
        "edges": w.edge_count(),
        "dilation": w.dilation,
        "lattice": w.lattice,
        "mu_measured": mu,
    });
    print(&out);
    Ok(out)
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize, serde::Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct GridFile {
    d: u32,
    balls: Vec<Ball>,
}

pub fn grid(ctx: &mut Context, a: &GridArgs) -> CliResult<Value> {
    let balls = separated_grid(a.d, a.count)?;
    let sep = is_two_separated(&balls);
    ctx.check(Check::le("two_separated", f64::from(u8::from(!sep)), 0.0));
    let file = GridFile { d: a.d, balls };
    write_json(&a.out, &file)?;
    let back: GridFile = parse_json(&a.out, &read_text(&a.out)?)?;
    ctx.check(Check::le("json_roundtrip", f64::from(u8::from(back != file)), 0.0));
    let out = json!({
        "d": a.d,
        "count": file.balls.len(),
        "radius": file.balls.first().map(|b| b.radius),
        "two_separated": sep,
    });
    print(&out);
    Ok(out)
}
