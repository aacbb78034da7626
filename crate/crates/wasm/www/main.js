import init, { Demo } from "./pkg/irbm_wasm.js";

await init();

const $ = (id) => document.getElementById(id);
let demo, input, exampleIndex = 0, history = [], running = false, sampleSeed = 0;

function reset() {
  demo = new Demo(+$("side").value, +$("patterns").value, +$("noise").value,
                  +$("lr").value, +$("lambda").value, 1);
  history = [];
  exampleIndex = 0;
  input = demo.example(0);
  redraw(NaN);
}

function drawImage(ctx, bits, side, x0, y0, size) {
  const cell = size / side;
  for (let i = 0; i < side * side; i++) {
    ctx.fillStyle = bits[i] ? "#fff" : "#000";
    ctx.fillRect(x0 + (i % side) * cell, y0 + Math.floor(i / side) * cell, cell, cell);
  }
}

function drawGrowth() {
  const ctx = $("growth").getContext("2d");
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  if (history.length < 2) return;
  const maxL = Math.max(...history);
  ctx.strokeStyle = "#1f77b4";
  ctx.beginPath();
  history.forEach((l, i) => {
    const x = (i / (history.length - 1)) * (width - 10) + 5;
    const y = height - 5 - (l / maxL) * (height - 20);
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(`l = ${maxL} max`, 8, 12);
}

function drawInput() {
  const ctx = $("input").getContext("2d");
  drawImage(ctx, input, demo.side, 0, 0, ctx.canvas.width);
}

function drawPz() {
  const ctx = $("pz").getContext("2d");
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  const p = demo.zDistribution(input);
  const w = width / p.length;
  p.forEach((q, i) => {
    ctx.fillStyle = i === p.length - 1 ? "#ff7f0e" : "#1f77b4";
    ctx.fillRect(i * w, height * (1 - q), Math.max(w - 1, 1), height * q);
  });
}

function redraw(freeEnergy) {
  $("status").textContent =
    `epoch ${demo.epoch}   l = ${demo.hidden}   mean F = ${isNaN(freeEnergy) ? "-" : freeEnergy.toFixed(3)}`;
  drawGrowth();
  drawInput();
  drawPz();
}

function step(epochs) {
  const f = demo.train(epochs);
  history.push(demo.hidden);
  redraw(f);
}

function loop() {
  if (!running) return;
  step(1);
  requestAnimationFrame(loop);
}

$("reset").onclick = reset;
$("step").onclick = () => step(5);
$("run").onclick = () => { running = !running; loop(); };
$("next-example").onclick = () => { input = demo.example(++exampleIndex); redraw(NaN); };
$("input").onclick = (e) => {
  const rect = e.target.getBoundingClientRect();
  const side = demo.side;
  const col = Math.floor(((e.clientX - rect.left) / rect.width) * side);
  const row = Math.floor(((e.clientY - rect.top) / rect.height) * side);
  input[row * side + col] ^= 1;
  drawInput();
  drawPz();
};
$("sample").onclick = () => {
  const side = demo.side, n = 16, cols = 4;
  const bits = demo.samples(n, +$("steps").value, sampleSeed++);
  const ctx = $("samples").getContext("2d");
  const tile = ctx.canvas.width / cols;
  ctx.fillStyle = "#888";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (let k = 0; k < n; k++) {
    drawImage(ctx, bits.subarray(k * side * side), side,
              (k % cols) * tile + 2, Math.floor(k / cols) * tile + 2, tile - 4);
  }
};

reset();
