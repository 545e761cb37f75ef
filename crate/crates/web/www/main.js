import init, { geodesic, filling, Extension } from "./pkg/heis_web.js";

const $ = (id) => document.getElementById(id);

function fail(el, e) {
  el.textContent = String(e.message ?? e);
  el.className = "out err";
}

function ok(el, text) {
  el.textContent = text;
  el.className = "out";
}

// orthographic view of R^3 with a fixed tilt
function project(p, s, w, h) {
  const [x, y, z] = p;
  const u = x - 0.5 * y;
  const v = z + 0.35 * y;
  return [w / 2 + s * u, h / 2 - s * v];
}

function drawGeodesic(pts) {
  const c = $("gcan"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  let r = 1e-9;
  for (const p of pts) r = Math.max(r, Math.abs(p[0]), Math.abs(p[1]), Math.abs(p[2]));
  const s = 0.35 * c.width / r;
  g.strokeStyle = "#999";
  g.beginPath();
  for (const axis of [[1, 0, 0], [0, 1, 0], [0, 0, 1]]) {
    const [x0, y0] = project([0, 0, 0], s, c.width, c.height);
    const [x1, y1] = project(axis.map((a) => a * r), s, c.width, c.height);
    g.moveTo(x0, y0);
    g.lineTo(x1, y1);
  }
  g.stroke();
  g.strokeStyle = "#c33";
  g.lineWidth = 2;
  g.beginPath();
  pts.forEach((p, i) => {
    const [x, y] = project(p, s, c.width, c.height);
    i ? g.lineTo(x, y) : g.moveTo(x, y);
  });
  g.stroke();
  g.lineWidth = 1;
}

function runGeodesic() {
  try {
    const res = JSON.parse(geodesic(+$("gx").value, +$("gy").value, +$("gz").value, 128));
    ok($("gout"), `d_c = ${res.distance.toFixed(12)}`);
    drawGeodesic(res.points);
  } catch (e) {
    fail($("gout"), e);
  }
}

let loop = [];

function drawLoop() {
  const c = $("fcan"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  g.fillStyle = "#333";
  g.strokeStyle = "#36c";
  g.beginPath();
  loop.forEach(([x, y], i) => (i ? g.lineTo(x, y) : g.moveTo(x, y)));
  if (loop.length > 2) g.closePath();
  g.stroke();
  for (const [x, y] of loop) g.fillRect(x - 2, y - 2, 4, 4);
}

function runFilling() {
  if (loop.length < 3) {
    fail($("fout"), "draw at least three points");
    return;
  }
  const c = $("fcan");
  const k = +$("fs").value / (c.width / 4);
  const flat = [];
  for (const [x, y] of [...loop, loop[0]]) flat.push((x - c.width / 2) * k, (c.height / 2 - y) * k);
  try {
    const t0 = performance.now();
    const res = JSON.parse(filling(new Float64Array(flat), +$("fl").value));
    const r = res.report;
    ok(
      $("fout"),
      `length ${res.length.toFixed(4)}, M = ${res.M}, m = ${res.m}, ${res.triangles.length} triangles (≤ 2mM = ${r.count_bound})\n` +
        `max triangle perimeter ${r.max_perimeter.toFixed(4)} ≤ 6L = ${r.perimeter_bound}, violations ${r.violations}` +
        `  [${(performance.now() - t0).toFixed(0)} ms]`
    );
    const out = $("fres"), g = out.getContext("2d");
    g.clearRect(0, 0, out.width, out.height);
    const s = out.width / 2.1;
    g.strokeStyle = "rgba(40,90,160,0.35)";
    g.beginPath();
    for (const tri of res.triangles) {
      tri.forEach(([x, y], i) => {
        const px = out.width / 2 + s * x, py = out.height / 2 - s * y;
        i ? g.lineTo(px, py) : g.moveTo(px, py);
      });
      g.closePath();
    }
    g.stroke();
  } catch (e) {
    fail($("fout"), e);
  }
}

// diverging palette around the median
function color(t) {
  const a = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * Math.min(1, 2 * a));
  const b = Math.round(255 * Math.min(1, 2 * (1 - a)));
  const g = Math.round(255 * (1 - Math.abs(2 * a - 1)));
  return [r, g, b];
}

let ext = null, extKey = "";

function runHeatmap() {
  const n = +$("hn").value, d = +$("hd").value, res = +$("hr").value, comp = +$("hc").value;
  try {
    const t0 = performance.now();
    const key = `${n}/${d}`;
    if (key !== extKey) {
      if (ext) ext.free();
      ext = new Extension(n, d);
      extKey = key;
    }
    const vals = ext.heatmap(res, comp);
    let lo = Infinity, hi = -Infinity;
    for (const v of vals) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
    const c = $("hcan"), g = c.getContext("2d");
    const img = g.createImageData(res, res);
    vals.forEach((v, i) => {
      const [r, gg, b] = Number.isFinite(v) ? color((v - lo) / (hi - lo || 1)) : [255, 255, 255];
      img.data.set([r, gg, b, 255], 4 * i);
    });
    const tmp = document.createElement("canvas");
    tmp.width = tmp.height = res;
    tmp.getContext("2d").putImageData(img, 0, 0);
    g.imageSmoothingEnabled = false;
    g.clearRect(0, 0, c.width, c.height);
    g.drawImage(tmp, 0, 0, c.width, c.height);
    ok($("hout"), `${ext.rootTriangles()} root triangles, range [${lo.toFixed(4)}, ${hi.toFixed(4)}]  [${(performance.now() - t0).toFixed(0)} ms]`);
  } catch (e) {
    fail($("hout"), e);
  }
}

await init();
$("gbtn").onclick = runGeodesic;
$("fcan").onclick = (ev) => {
  const r = ev.target.getBoundingClientRect();
  loop.push([ev.clientX - r.left, ev.clientY - r.top]);
  drawLoop();
};
$("fclear").onclick = () => {
  loop = [];
  drawLoop();
};
$("fbtn").onclick = runFilling;
$("hbtn").onclick = runHeatmap;
$("hcan").onmousemove = (ev) => {
  if (!ext) return;
  const r = ev.target.getBoundingClientRect();
  const x = (2 * (ev.clientX - r.left)) / r.width - 1, y = 1 - (2 * (ev.clientY - r.top)) / r.height;
  if (x * x + y * y > 1) return;
  const [vx, vy, vz, depth] = ext.eval(x, y);
  $("hout").textContent = `f(${x.toFixed(3)}, ${y.toFixed(3)}) = (${vx.toFixed(5)}, ${vy.toFixed(5)}, ${vz.toFixed(5)}), depth ${depth}`;
};
runGeodesic();
