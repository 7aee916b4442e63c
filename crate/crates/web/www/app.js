// SPDX-License-Identifier: Apache-2.0
import init, { benchmarks, applyFlow, train } from "./pkg/synflow_web.js";

const $ = (id) => document.getElementById(id);
let current = null;

// Plots each series against its own y range; series share the x axis.
function plot(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  ctx.font = "11px sans-serif";
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 10, w - 2 * pad, h - pad - 10);
  const xmax = Math.max(1, xs[xs.length - 1] ?? 1);
  const xp = (x) => pad + (x / xmax) * (w - 2 * pad);
  series.forEach((s, k) => {
    const lo = Math.min(...s.values), hi = Math.max(...s.values);
    const span = hi - lo || 1;
    const yp = (v) => h - pad - ((v - lo) / span) * (h - pad - 20);
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, i) => (i ? ctx.lineTo(xp(xs[i]), yp(v)) : ctx.moveTo(xp(xs[i]), yp(v))));
    ctx.stroke();
    ctx.textAlign = k ? "left" : "right";
    const ax = k ? w - pad + 4 : pad - 4;
    ctx.fillText(String(+hi.toFixed(2)), ax, 20);
    ctx.fillText(String(+lo.toFixed(2)), ax, h - pad);
    ctx.fillText(s.label, k ? w - pad - 80 : pad + 6, 24 + 12 * k);
  });
  ctx.fillStyle = "#555";
  ctx.textAlign = "center";
  ctx.fillText("0", pad, h - pad + 14);
  ctx.fillText(String(xmax), w - pad, h - pad + 14);
}

function fail(out, e) {
  out.innerHTML = "";
  const p = document.createElement("p");
  p.className = "err";
  p.textContent = String(e);
  out.appendChild(p);
}

function select(name, row) {
  current = name;
  $("selected").textContent = name;
  document.querySelectorAll("#benches tbody tr").forEach((r) => r.classList.toggle("sel", r === row));
}

function runFlow() {
  const out = $("flow-out");
  try {
    const t = JSON.parse(applyFlow(current, $("flow").value));
    const xs = [0, ...t.steps.map((_, i) => i + 1)];
    plot($("flow-plot"), xs, [
      { label: "nodes", color: "#1f5fbf", values: [t.initial_nodes, ...t.steps.map((s) => s.nodes)] },
      { label: "levels", color: "#c0392b", values: [t.initial_levels, ...t.steps.map((s) => s.levels)] },
    ]);
    const lines = [`start: ${t.initial_nodes} nodes, ${t.initial_levels} levels (budget ${t.constraint})`];
    t.steps.forEach((s, i) =>
      lines.push(`${i + 1}. ${s.action.padEnd(11)} ${s.nodes} nodes, ${s.levels} levels, reward ${s.reward}${s.constraint_met ? "" : ", over budget"}`));
    out.textContent = "";
    const pre = document.createElement("pre");
    pre.textContent = lines.join("\n");
    out.appendChild(pre);
  } catch (e) {
    fail(out, e);
  }
}

function runTrain() {
  const out = $("train-out");
  out.textContent = "training...";
  const args = ["episodes", "iterations", "seed"].map((id) => Number($(id).value));
  // Let the status text paint before the blocking call.
  setTimeout(() => {
    try {
      const started = performance.now();
      const c = JSON.parse(train(current, ...args));
      const secs = ((performance.now() - started) / 1000).toFixed(1);
      const xs = c.episodes.map((e) => e.episode + 1);
      plot($("train-plot"), xs, [
        { label: "episode reward", color: "#1f5fbf", values: c.episodes.map((e) => e.total_reward) },
        { label: "best nodes", color: "#27ae60", values: c.episodes.map((e) => e.best_nodes) },
      ]);
      const pre = document.createElement("pre");
      pre.textContent = [
        `${current}: ${c.initial_nodes} -> ${c.best_nodes} nodes, ${c.best_levels} levels ` +
          `(budget ${c.constraint}, ${c.best_met ? "met" : "missed"}) in ${secs}s`,
        "best flow:",
        ...c.best_flow.map((t) => "  " + t),
      ].join("\n");
      out.textContent = "";
      out.appendChild(pre);
    } catch (e) {
      fail(out, e);
    }
  }, 20);
}

await init();
const body = document.querySelector("#benches tbody");
for (const b of JSON.parse(benchmarks())) {
  const tr = document.createElement("tr");
  for (const v of [b.name, b.inputs, b.outputs, b.nodes, b.levels, b.constraint]) {
    const td = document.createElement("td");
    td.textContent = v;
    tr.appendChild(td);
  }
  tr.addEventListener("click", () => select(b.name, tr));
  body.appendChild(tr);
  if (!current || b.name === "max") select(b.name, tr);
}
$("run-flow").addEventListener("click", runFlow);
$("run-train").addEventListener("click", runTrain);
