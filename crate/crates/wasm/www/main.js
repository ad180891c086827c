import init, { optimal_curves, efficiency_map, trajectory_curve } from "./pkg/mimo_ee_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#1f77b4", "#aec7e8", "#d62728", "#ff9896"];

function system() {
  return [num("alpha"), num("rho_r"), num("rho_d"), num("rho_s")];
}

function logspace(lo, hi, n) {
  const a = Math.log10(lo), b = Math.log10(hi);
  return Float64Array.from({ length: n }, (_, i) => 10 ** (a + (b - a) * i / (n - 1)));
}

function legend(id, names, colors) {
  $(id).innerHTML = names
    .map((n, i) => `<span style="color:${colors[i]}">&#9632; ${n}</span>`)
    .join("");
}

// Log-x line plot of several series sharing the x values.
function plot(canvas, xs, series, colors, yLabel) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 60;
  ctx.clearRect(0, 0, W, H);
  const ys = series.flat().filter(Number.isFinite);
  const yMin = Math.min(...ys), yMax = Math.max(...ys);
  const lx0 = Math.log10(xs[0]), lx1 = Math.log10(xs[xs.length - 1]);
  const px = (x) => pad + (Math.log10(x) - lx0) / (lx1 - lx0) * (W - 2 * pad);
  const py = (y) => H - pad - (y - yMin) / (yMax - yMin || 1) * (H - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  for (let d = Math.ceil(lx0); d <= Math.floor(lx1); d++) {
    ctx.fillText(`1e${d}`, px(10 ** d) - 10, H - pad + 16);
  }
  ctx.fillText(yMax.toPrecision(3), 4, pad + 4);
  ctx.fillText(yMin.toPrecision(3), 4, H - pad);
  ctx.fillText("R (bits/s/Hz)", W / 2 - 30, H - 12);
  ctx.fillText(yLabel, 4, pad - 16);

  series.forEach((s, j) => {
    ctx.strokeStyle = colors[j];
    ctx.lineWidth = 2;
    ctx.beginPath();
    let pen = false;
    s.forEach((y, i) => {
      if (!Number.isFinite(y)) { pen = false; return; }
      pen ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y));
      pen = true;
    });
    ctx.stroke();
  });
}

function runCurves() {
  const rates = logspace(num("r_lo"), num("r_hi"), 40);
  const v = optimal_curves(...system(), rates);
  const series = [0, 1, 2, 3].map((j) => Array.from(rates, (_, i) => v[4 * i + j]));
  const names = ["MRC exact", "MRC relaxed", "ZF exact", "ZF relaxed"];
  legend("curves_legend", names, COLORS);
  plot($("curves"), rates, series, COLORS, "zeta");
}

function runMap() {
  const mMax = num("map_m"), kMax = num("map_k");
  const v = efficiency_map(...system(), num("map_r"), $("map_det").value, mMax, kMax);
  const canvas = $("map"), ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  let best = -Infinity, bestAt = null;
  v.forEach((z, i) => { if (z > best) { best = z; bestAt = i; } });
  const cw = canvas.width / mMax, ch = canvas.height / kMax;
  for (let k = 0; k < kMax; k++) {
    for (let m = 0; m < mMax; m++) {
      const z = v[k * mMax + m];
      // K grows upward, M to the right
      const y = canvas.height - (k + 1) * ch;
      if (!Number.isFinite(z)) { ctx.fillStyle = "#eee"; }
      else {
        const t = Math.max(0, z / best);
        ctx.fillStyle = `hsl(${240 - 240 * t ** 4}, 70%, ${35 + 25 * t}%)`;
      }
      ctx.fillRect(m * cw, y, Math.ceil(cw), Math.ceil(ch));
    }
  }
  if (bestAt !== null) {
    const m = bestAt % mMax, k = Math.floor(bestAt / mMax);
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 2;
    ctx.strokeRect(m * cw - 2, canvas.height - (k + 1) * ch - 2, cw + 4, ch + 4);
    $("map_info").textContent =
      `best in grid: M = ${m + 1}, K = ${k + 1}, zeta = ${best.toPrecision(6)} (grey: rate not achievable)`;
  }
}

function runTrajectory() {
  const c = num("traj_c");
  const rates = logspace(Math.max(1.01 * c, 1), num("traj_hi"), 50);
  const v = trajectory_curve(...system(), c, rates);
  const limit = v[0];
  const traj = Array.from(rates, (_, i) => v[1 + 4 * i + 2]);
  const relaxed = Array.from(rates, (_, i) => v[1 + 4 * i + 3]);
  const flat = Array.from(rates, () => limit);
  const colors = ["#2ca02c", "#1f77b4", "#999"];
  legend("traj_legend", ["trajectory (K = R/c)", "MRC relaxed optimum", `limit ${limit.toPrecision(4)}`], colors);
  plot($("traj"), rates, [traj, relaxed, flat], colors, "zeta");
}

function guarded(f) {
  return () => {
    $("error").textContent = "";
    try { f(); } catch (e) { $("error").textContent = String(e.message ?? e); }
  };
}

await init();
$("run_curves").onclick = guarded(runCurves);
$("run_map").onclick = guarded(runMap);
$("run_traj").onclick = guarded(runTrajectory);
guarded(runCurves)();
guarded(runMap)();
guarded(runTrajectory)();
