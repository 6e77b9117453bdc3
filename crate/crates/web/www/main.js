// Generated by `wasm-bindgen --target web`; see build.sh.
import init, { table_summary, decomposition } from "./pkg/ringrep_web.js";

const $ = (id) => document.getElementById(id);
const out = $("out");
const status = $("status");

function table(header, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of header) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const row of rows) {
    const tr = t.insertRow();
    for (const cell of row) {
      const td = tr.insertCell();
      td.textContent = String(cell);
      if (cell === "FAIL" || cell === "mismatch") td.className = "fail";
    }
  }
  return t;
}

function show(title, ...nodes) {
  out.replaceChildren();
  const h = document.createElement("h2");
  h.textContent = title;
  out.append(h, ...nodes);
}

function para(text) {
  const p = document.createElement("p");
  p.textContent = text;
  return p;
}

// Runs a wasm call after the status line has repainted.
function run(label, f) {
  status.textContent = `${label}…`;
  setTimeout(() => {
    const start = performance.now();
    try {
      f();
      status.textContent = `${label}: ${((performance.now() - start) / 1000).toFixed(2)} s`;
    } catch (e) {
      status.textContent = `error: ${e}`;
    }
  }, 10);
}

const q = () => Number($("q").value);
const r = () => Number($("r").value);

$("degrees").onclick = () => run("character table", () => {
  const s = JSON.parse(table_summary(q(), r()));
  show(
    `|G| = ${s.order}, ${s.classes} classes`,
    table(["degree", "count"], s.degrees),
    para(`sum of squared degrees = ${s.sum_of_squares}`),
  );
});

$("reference").onclick = () => run("reference table", () => {
  if (r() !== 2) throw "the reference table is for r = 2";
  const s = JSON.parse(table_summary(q(), 2));
  const rows = s.reference.rows.map((x) => [x.label, x.degree, x.expected, x.computed, x.status]);
  show(`q = ${s.q}, r = 2`, table(["row", "degree", "printed", "computed", "status"], rows));
});

$("decompose").onclick = () => run("decomposition", () => {
  const d = JSON.parse(decomposition(q(), $("variety").value));
  const rows = d.pieces.map((p, i) => {
    const terms = p.terms
      .map((t) => `${t.multiplicity < 0 ? "−" : "+"}${Math.abs(t.multiplicity) > 1 ? Math.abs(t.multiplicity) + "×" : ""}${t.degree}#${t.index}`)
      .join(" ");
    const c = d.checks[i];
    return [`[${p.character}]`, p.virtual_degree, terms, c.case, c.pass ? "PASS" : "FAIL"];
  });
  show(`${d.variety}, q = ${d.q}`, table(["character", "degree", "constituents", "case", "check"], rows));
});

init().then(
  () => { status.textContent = "ready"; },
  (e) => { status.textContent = `could not load the wasm module: ${e}`; },
);
