import init, { scenarios, plants, simulate, compare, step_response } from "./pkg/mfc_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function draw(curves, switches = []) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ts = curves.flatMap((c) => c.t);
  const ys = curves.flatMap((c) => c.y).filter(Number.isFinite);
  const t0 = Math.min(...ts), t1 = Math.max(...ts);
  let y0 = Math.min(...ys), y1 = Math.max(...ys);
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const m = 0.05 * (y1 - y0);
  y0 -= m; y1 += m;
  const px = (t) => pad + ((t - t0) / (t1 - t0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(`${t0.toPrecision(3)} s`, pad, h - pad + 14);
  ctx.fillText(`${t1.toPrecision(3)} s`, w - pad - 40, h - pad + 14);

  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = "#bbb";
  for (const s of switches) {
    ctx.beginPath();
    ctx.moveTo(px(s), pad);
    ctx.lineTo(px(s), h - pad);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  const legend = [];
  curves.forEach((c, i) => {
    ctx.strokeStyle = c.color ?? COLORS[i % COLORS.length];
    ctx.lineWidth = c.dashed ? 1 : 1.5;
    ctx.setLineDash(c.dashed ? [6, 3] : []);
    ctx.beginPath();
    c.t.forEach((t, k) => (k ? ctx.lineTo(px(t), py(c.y[k])) : ctx.moveTo(px(t), py(c.y[k]))));
    ctx.stroke();
    legend.push(`<span style="color:${ctx.strokeStyle}">&#9632; ${c.name}</span>`);
  });
  ctx.setLineDash([]);
  $("legend").innerHTML = legend.join("");
}

function reference(series) {
  return { name: "y*", t: series.t, y: series.y_ref, color: "#555", dashed: true };
}

function summary(run) {
  const m = run.metrics;
  const rec = m.post_switch_recovery.map((r) => (r === null ? "-" : r.toExponential(2))).join(" ");
  return `${run.controller.padEnd(9)} ise ${m.ise.toExponential(3)}  os ${m.overshoot_pct.toFixed(1)}%  ` +
    `us ${m.undershoot_pct.toFixed(1)}%  diverged ${m.diverged}  recovery [s] ${rec || "-"}`;
}

function guarded(fn) {
  return () => {
    try { fn(); } catch (e) { $("report").textContent = String(e.message ?? e); }
  };
}

function optional(id) {
  const v = $(id).value.trim();
  return v === "" ? undefined : Number(v);
}

function runOne() {
  const run = JSON.parse(simulate($("scenario").value, $("controller").value, optional("lambda"), optional("ki")));
  draw([reference(run.series), { name: run.controller, t: run.series.t, y: run.series.y }], run.series.switches);
  $("report").textContent = summary(run);
}

function runAll() {
  const runs = JSON.parse(compare($("scenario").value));
  const curves = runs.map((r) => ({ name: r.controller, t: r.series.t, y: r.series.y }));
  draw([reference(runs[0].series), ...curves], runs[0].series.switches);
  $("report").textContent = runs.map(summary).join("\n");
}

function stepOne() {
  const s = JSON.parse(step_response(Number($("plant").value)));
  draw([{ name: `${s.label}  ${s.transfer_function}`, t: s.t, y: s.y }]);
  $("report").textContent = `${s.label}: ${s.signature}`;
}

await init();
const list = JSON.parse(scenarios());
for (const s of list) $("scenario").add(new Option(s.name, s.name));
JSON.parse(plants()).forEach((p, i) => $("plant").add(new Option(`${p.label}  ${p.transfer_function}`, i)));
const describe = () => {
  $("description").textContent = list.find((s) => s.name === $("scenario").value)?.description ?? "";
};
$("scenario").onchange = describe;
describe();
$("run").onclick = guarded(runOne);
$("compare").onclick = guarded(runAll);
$("step").onclick = guarded(stepOne);
guarded(runOne)();
