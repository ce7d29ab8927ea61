// Wires the three wasm entry points to the controls; no framework, one
// canvas plot helper. Build pkg/ first (see the repo README):
//   cargo build -p bk-demo --release --target wasm32-unknown-unknown
//   wasm-bindgen --target web --out-dir crates/bk-demo/www/pkg \
//     target/wasm32-unknown-unknown/release/bk_demo.wasm
import init, { yield_curve, swaption_quote, kl_reconstruction } from "./pkg/bk_demo.js";

const $ = (id) => document.getElementById(id);
const pct = (x, d = 3) => (100 * x).toFixed(d) + "%";

function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const pad = { l: 58, r: 14, t: 12, b: 30 };
  ctx.clearRect(0, 0, W, H);
  const xs = series.flatMap(s => s.pts.map(p => p[0]));
  const ys = series.flatMap(s => s.pts.map(p => p[1]));
  if (!xs.length) return;
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  let y0 = Math.min(...ys, opts.yZero ? 0 : Infinity);
  let y1 = Math.max(...ys);
  const span = (y1 - y0) || 1; y0 -= 0.06 * span; y1 += 0.06 * span;
  const X = x => pad.l + (x - x0) / (x1 - x0 || 1) * (W - pad.l - pad.r);
  const Y = y => H - pad.b - (y - y0) / (y1 - y0) * (H - pad.t - pad.b);
  ctx.strokeStyle = "#dde4e9"; ctx.fillStyle = "#5a6b7b";
  ctx.font = "12px system-ui"; ctx.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const y = y0 + (y1 - y0) * i / 4;
    ctx.beginPath(); ctx.moveTo(pad.l, Y(y)); ctx.lineTo(W - pad.r, Y(y)); ctx.stroke();
    ctx.fillText(opts.fmtY ? opts.fmtY(y) : y.toFixed(3), pad.l - 6, Y(y) + 4);
  }
  ctx.textAlign = "center";
  for (let i = 0; i <= 5; i++) {
    const x = x0 + (x1 - x0) * i / 5;
    ctx.fillText(x.toFixed(1), X(x), H - pad.b + 16);
  }
  for (const s of series) {
    ctx.strokeStyle = s.color; ctx.lineWidth = s.width || 1.8;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.pts.forEach(([x, y], i) => i ? ctx.lineTo(X(x), Y(y)) : ctx.moveTo(X(x), Y(y)));
    ctx.stroke(); ctx.setLineDash([]);
    if (s.marks) for (const [x, y] of s.pts) {
      ctx.fillStyle = s.color;
      ctx.beginPath(); ctx.arc(X(x), Y(y), 3, 0, 7); ctx.fill();
    }
  }
}

function report(el, text, isErr = false) {
  el.textContent = text;
  el.className = "readout" + (isErr ? " err" : "");
}

function drawYieldCurve() {
  const read = $("yc-read");
  try {
    const [r0, b, sigma, ravg, maxy] =
      ["yc-r0", "yc-b", "yc-sigma", "yc-ravg", "yc-max"].map(id => +$(id).value);
    const flat = yield_curve(r0, b, sigma, ravg, maxy, 60);
    const zero = yield_curve(r0, b, 1e-9, ravg, maxy, 60);
    const toPts = arr => { const p = []; for (let i = 0; i < arr.length; i += 2) p.push([arr[i], arr[i + 1]]); return p; };
    plot($("yc-plot"), [
      { pts: toPts(zero), color: "#9aa9b5", dash: [5, 4] },
      { pts: toPts(flat), color: "#0b6e99" },
    ], { fmtY: y => pct(y, 2) });
    const last = flat[flat.length - 1];
    report(read, `solid: fast approximation at σ = ${sigma}; dashed: zero-volatility limit. ` +
      `${maxy}y yield ${pct(last)} (volatility convexity ${pct(last - zero[zero.length - 1])}).`);
  } catch (e) { report(read, String(e), true); }
}

function drawSwaption() {
  const read = $("sw-read");
  try {
    const base = {
      r0: +$("sw-r0").value, b: +$("sw-b").value, sigma: +$("sw-sigma").value,
      expiry: +$("sw-expiry").value, tenor: +$("sw-tenor").value,
      side: $("sw-side").value,
    };
    const ladder = [];
    let atm = null;
    for (let m = 0.6; m <= 1.6001; m += 0.05) {
      const q = JSON.parse(swaption_quote(JSON.stringify({ ...base, moneyness: m })));
      ladder.push([m, q.implied_vol ?? NaN]);
      if (Math.abs(m - 1.0) < 1e-9) atm = q;
    }
    plot($("sw-plot"), [
      { pts: ladder.filter(p => isFinite(p[1])), color: "#b3541e", marks: true },
    ], { fmtY: y => pct(y, 1) });
    report(read, `forward ${pct(atm.forward, 2)}, annuity ${atm.annuity.toFixed(4)}; ` +
      `ATM ${base.side} price ${atm.price.toFixed(6)} = ${pct(atm.implied_vol, 2)} Black vol ` +
      `(exercise boundary z₀ = ${atm.boundary_z0?.toFixed(3) ?? "n/a"}). ` +
      `Curve: implied vol across strike moneyness 60%..160%.`);
  } catch (e) { report(read, String(e), true); }
}

function drawKl() {
  const read = $("kl-read");
  try {
    const b = +$("kl-b").value, h = +$("kl-h").value;
    const bridge = $("kl-kind").value === "bridge";
    const terms = Math.max(1, +$("kl-terms").value | 0);
    const arr = kl_reconstruction(b, h, bridge, terms, 120);
    const total = [], partial = [];
    for (let i = 0; i < arr.length; i += 3) {
      total.push([arr[i], arr[i + 1]]);
      partial.push([arr[i], arr[i + 2]]);
    }
    plot($("kl-plot"), [
      { pts: total, color: "#1c2733", width: 2.2 },
      { pts: partial, color: "#0b6e99", dash: [6, 3] },
    ], { yZero: true });
    const defTot = total.reduce((a, p) => a + p[1], 0);
    const defPar = partial.reduce((a, p) => a + p[1], 0);
    report(read, `solid: kernel variance V(t); dashed: ${terms}-mode truncation. ` +
      `Captured ${(100 * defPar / defTot).toFixed(2)}% of the average variance — ` +
      `the leading mode dominates, which is why the one-mode bond approximation works.`);
  } catch (e) { report(read, String(e), true); }
}

await init();
for (const [ids, fn] of [
  [["yc-r0", "yc-b", "yc-sigma", "yc-ravg", "yc-max"], drawYieldCurve],
  [["sw-r0", "sw-b", "sw-sigma", "sw-expiry", "sw-tenor", "sw-side"], drawSwaption],
  [["kl-b", "kl-h", "kl-kind", "kl-terms"], drawKl],
]) {
  for (const id of ids) $(id).addEventListener("input", fn);
  fn();
}
