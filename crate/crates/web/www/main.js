import init, { oseenProfile, PicardRun, strichartzCheck } from "./pkg/spectral_lab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(out, e) {
  out.className = "bad";
  out.textContent = String(e.message ?? e);
}

function plotLines(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const ymax = Math.max(...series.flatMap((s) => s.ys)) * 1.1;
  const xmax = xs[xs.length - 1];
  const px = (x) => 40 + (x / xmax) * (w - 50);
  const py = (y) => h - 20 - (y / ymax) * (h - 30);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40, 10, w - 50, h - 30);
  ctx.fillStyle = "#444";
  ctx.fillText(ymax.toFixed(3), 2, 16);
  ctx.fillText("r = " + xmax.toFixed(3), w - 70, h - 5);
  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    xs.forEach((x, j) => (j ? ctx.lineTo(px(x), py(s.ys[j])) : ctx.moveTo(px(x), py(s.ys[j]))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - 160, 24 + 14 * i);
  });
}

function heatmap(canvas, n, data) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const m = Math.max(...data.map(Math.abs)) || 1;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = data[i * n + j] / m;
      // x1 to the right, x2 up
      const p = 4 * ((n - 1 - j) * n + i);
      img.data[p] = v > 0 ? 255 : Math.round(255 * (1 + v));
      img.data[p + 1] = Math.round(255 * (1 - Math.abs(v)));
      img.data[p + 2] = v < 0 ? 255 : Math.round(255 * (1 - v));
      img.data[p + 3] = 255;
    }
  }
  const tmp = document.createElement("canvas");
  tmp.width = tmp.height = n;
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function profile() {
  const out = $("o-out");
  try {
    const p = JSON.parse(oseenProfile(num("o-alpha"), num("o-t"), num("o-n")));
    plotLines($("o-plot"), p.r, [
      { label: "spectral", ys: p.spectral, color: "#c00" },
      { label: "plane dipole", ys: p.plane, color: "#06c" },
      { label: "single vortex", ys: p.single, color: "#999" },
    ]);
    const worst = Math.max(...p.spectral.map((v, i) => Math.abs(v - p.plane[i])));
    out.className = "";
    out.textContent = `max |spectral - plane| = ${worst.toExponential(3)} (periodic images)`;
  } catch (e) {
    fail(out, e);
  }
}

function picard() {
  const out = $("p-out");
  out.className = "";
  out.textContent = "solving...";
  setTimeout(() => {
    try {
      const run = new PicardRun(num("p-alpha"), num("p-n"), num("p-t0"));
      heatmap($("p-init"), run.n, run.initial());
      heatmap($("p-last"), run.n, run.last());
      out.textContent = JSON.stringify(JSON.parse(run.summary()), null, 1);
      run.free();
    } catch (e) {
      fail(out, e);
    }
  }, 0);
}

function exponents() {
  const out = $("s-out");
  const v = JSON.parse(strichartzCheck(num("s-q"), num("s-r"), num("s-qt"), num("s-s"), num("s-k")));
  out.className = v.admissible ? "ok" : "bad";
  out.textContent = v.admissible ? "admissible" : v.violations.join("\n");
}

await init();
$("o-go").onclick = profile;
$("p-go").onclick = picard;
$("s-go").onclick = exponents;
profile();
exponents();
