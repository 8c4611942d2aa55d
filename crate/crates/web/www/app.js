// Build with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { gradedDims, depthProfile, scan } from "./pkg/congruence_kernel_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseInt($(id).value, 10);

function bars(canvas, values, labels) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 24;
  ctx.clearRect(0, 0, w, h);
  const max = Math.max(1, ...values);
  const bw = (w - 2 * pad) / values.length;
  ctx.font = "11px sans-serif";
  values.forEach((v, i) => {
    const bh = (h - 2 * pad) * v / max;
    ctx.fillStyle = "#4a7ab5";
    ctx.fillRect(pad + i * bw + 2, h - pad - bh, bw - 4, bh);
    ctx.fillStyle = "#222";
    ctx.fillText(labels[i], pad + i * bw + 2, h - 8);
    ctx.fillText(String(v), pad + i * bw + 2, h - pad - bh - 4);
  });
}

function curve(canvas, points) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  if (points.length === 0) return;
  const ys = points.map((q) => q[1]);
  const ymax = Math.max(...ys, 1e-12), ymin = Math.min(0, ...ys);
  const x = (i) => pad + (w - 2 * pad) * (points.length === 1 ? 0.5 : i / (points.length - 1));
  const y = (v) => h - pad - (h - 2 * pad) * (v - ymin) / (ymax - ymin);
  ctx.strokeStyle = "#888";
  ctx.beginPath(); ctx.moveTo(pad, y(0)); ctx.lineTo(w - pad, y(0)); ctx.stroke();
  ctx.strokeStyle = "#b5514a";
  ctx.beginPath();
  points.forEach((q, i) => (i ? ctx.lineTo(x(i), y(q[1])) : ctx.moveTo(x(i), y(q[1]))));
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.font = "11px sans-serif";
  points.forEach((q, i) => {
    ctx.beginPath(); ctx.arc(x(i), y(q[1]), 3, 0, 2 * Math.PI); ctx.fill();
    ctx.fillText("n=" + q[0], x(i) - 10, h - 10);
  });
}

function guard(out, f) {
  try {
    out.classList.remove("err");
    f();
  } catch (e) {
    out.textContent = String(e);
    out.classList.add("err");
  }
}

await init();

$("run-graded").onclick = () => guard($("graded-out"), () => {
  const r = JSON.parse(gradedDims(num("p"), num("d"), num("u"), num("t")));
  bars($("graded"), r.dims, r.dims.map((_, i) => String(i)));
  $("graded-out").textContent = `order ${r.order}, nilpotency index ${r.dims.length}`;
});

$("run-depth").onclick = () => guard($("depth-out"), () => {
  const r = JSON.parse(depthProfile(num("p"), num("d"), num("u"), num("t")));
  const t = r.profile.length;
  bars($("depth"), r.profile, r.profile.map((_, i) => (i + 1 < t ? "depth " + (i + 1) : "identity")));
  $("depth-out").textContent = `order ${r.order}`;
});

$("run-scan").onclick = () => guard($("scan-out"), () => {
  const r = JSON.parse(scan($("kind").value, $("config").value));
  curve($("scan"), r.rows.map((row) => [row.n, row.ratio_num / row.ratio_den]));
  const lines = r.rows.map((row) => `n=${row.n}  kernel ${row.kernel_dim}  ratio ${row.ratio_num}/${row.ratio_den}` + (row.bound ? `  bound ${row.bound}` : ""));
  lines.push("trend: " + r.summary.trend);
  if (r.summary.delta_hat !== undefined && r.summary.delta_hat !== null) lines.push("nearest integer: " + r.summary.delta_hat);
  $("scan-out").textContent = lines.join("\n");
});
