// Expects `wasm-bindgen --target web --out-dir www/pkg` output next to this file.
import init, { catalog, analyze, verify, multirotational } from "./pkg/qxr_wasm_demo.js";

const $ = (id) => document.getElementById(id);

function run(fn) {
  try {
    $("result").textContent = JSON.stringify(JSON.parse(fn()), null, 2);
  } catch (e) {
    $("result").textContent = "error: " + e;
  }
}

function args() {
  return [$("entry").value, $("params").value, Number($("samples").value), Number($("seed").value)];
}

let cloud = null;

function draw() {
  const cv = $("cloud"), g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  if (!cloud) return;
  const a = Number($("angle").value), c = Math.cos(a), s = Math.sin(a);
  const scale = 140;
  for (let i = 0; i < cloud.points.length; i++) {
    const [x, y, t] = cloud.points[i];
    const px = cv.width / 2 + scale * (c * x - s * y);
    const py = cv.height / 2 - scale * t - 40 * (s * x + c * y);
    // colour by |T|
    g.fillStyle = `hsl(${240 - 240 * cloud.t_norms[i]}, 70%, 45%)`;
    g.fillRect(px - 2, py - 2, 4, 4);
  }
}

function resample() {
  try {
    cloud = JSON.parse(multirotational(Number($("h1").value), Number($("h2").value), 400, 7));
    const t = cloud.t_norms;
    $("cloudinfo").textContent =
      `|T| in [${Math.min(...t).toFixed(4)}, ${Math.max(...t).toFixed(4)}], ` +
      `max class A defect ${cloud.class_a_defect.toExponential(2)}`;
  } catch (e) {
    cloud = null;
    $("cloudinfo").textContent = "error: " + e;
  }
  draw();
}

await init();
for (const e of JSON.parse(catalog())) {
  const o = document.createElement("option");
  o.value = o.textContent = e.name;
  $("entry").append(o);
}
$("analyze").onclick = () => run(() => analyze(...args()));
$("verify").onclick = () => run(() => verify(...args()));
$("h1").oninput = $("h2").oninput = resample;
$("angle").oninput = draw;
resample();
