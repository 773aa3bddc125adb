import init, { defaultSpec, mineCorpus, scoreMatrix, generateAndEvaluate } from "./pkg/tripkg_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, digits = 4) => (x === null || x === undefined ? "n/a" : Number(x).toFixed(digits));

function table(headers, rows) {
  const head = "<tr>" + headers.map((h) => `<th>${h}</th>`).join("") + "</tr>";
  const body = rows.map((r) => "<tr>" + r.map((c) => `<td>${c}</td>`).join("") + "</tr>").join("");
  return `<table>${head}${body}</table>`;
}

function guarded(out, fn) {
  try {
    out.innerHTML = fn();
  } catch (e) {
    out.innerHTML = `<p class="error">${e}</p>`;
  }
}

function mine() {
  guarded($("mine-out"), () => {
    const r = JSON.parse(mineCorpus($("spec").value));
    const rows = r.labels.map((l) => [
      l.label,
      l.vehicles,
      fmt(l.vehicle_share, 1) + "%",
      l.trips,
      fmt(l.trip_share, 1) + "%",
      l.planted === null ? "" : `${l.recovered}/${l.planted}`,
    ]);
    return `<p>${r.vehicles} vehicles, ${r.trips} trips</p>` +
      table(["label", "vehicles", "share", "trips", "share", "planted found"], rows);
  });
}

function score() {
  guarded($("score-out"), () => {
    const r = JSON.parse(scoreMatrix($("matrix").value, Number($("rho").value)));
    const level = ["dispersed", "concentrated", "highly concentrated"];
    return table(["measure", "value"], [
      ["association score", fmt(r.score, 2)],
      ["score, rows capped at 1", fmt(r.literal_score, 2)],
      ["row totals", level[r.row_concentration]],
      ["column totals", level[r.column_concentration]],
    ]);
  });
}

function generate() {
  $("generate-out").textContent = "working...";
  setTimeout(() => guarded($("generate-out"), () => {
    const r = JSON.parse(generateAndEvaluate($("spec").value, Number($("seed").value), Number($("beam").value)));
    const rows = r.labels.map((l) => [
      l.label,
      l.trips,
      fmt(l.kl_temporal),
      fmt(l.kl_spatial),
      fmt(l.association_bias),
      fmt(l.continuity_historical, 3),
      fmt(l.continuity_generated, 3),
    ]);
    return `<p>${r.trips} trips generated, ${r.fallback} fallback units</p>` +
      table(["label", "trips", "KL time", "KL OD", "assoc. bias", "continuity hist.", "continuity gen."], rows);
  }), 0);
}

await init();
$("spec").value = defaultSpec();
$("mine").addEventListener("click", mine);
$("score").addEventListener("click", score);
$("generate").addEventListener("click", generate);
