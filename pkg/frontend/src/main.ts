/** Browser entry: wires the workbench to a minimal DOM. */

import { Client } from "./api.js";
import { extractGraphDoc, renderGraph } from "./render.js";
import { tensorLabel, Workbench } from "./workbench.js";
import type { GraphDoc } from "./types.js";

export function mountApp(root: HTMLElement, serverBase: string): Workbench {
  const bench = new Workbench(new Client(serverBase));
  const d = root.ownerDocument;

  root.innerHTML = `
    <div class="controls">
      <input  id="theory" value="zx" size="8">
      <textarea id="graph-input" rows="3" cols="48"
                placeholder="paste a .graph document"></textarea>
      <button id="load">load</button>
      <select id="rule" disabled></select>
      <button id="prev-match" disabled>&lt;</button>
      <span   id="match-pos">0/0</span>
      <button id="next-match" disabled>&gt;</button>
      <button id="apply" disabled>apply</button>
      <button id="undo" disabled>undo</button>
      <button id="eval" disabled>eval</button>
      <button id="export" disabled>export</button>
      <span   id="status"></span>
      <span   id="tensor"></span>
    </div>
    <div id="history" class="step-strip"></div>
    <div id="view"></div>
    <pre id="export-out" hidden></pre>
  `;

  const $ = <T extends HTMLElement>(sel: string) =>
    root.querySelector(sel) as T;
  const view = $("#view");
  const ruleSel = $("#rule") as unknown as HTMLSelectElement;

  function redraw(): void {
    const g = bench.currentGraph();
    $("#status").textContent = bench.status;
    $("#tensor").textContent = bench.lastTensor
      ? tensorLabel(bench.lastTensor)
      : "";
    const have = g !== null;
    for (const id of ["#undo", "#eval", "#export"]) {
      ($(id) as HTMLButtonElement).disabled = !have;
    }
    ruleSel.disabled = !have;
    ($("#apply") as HTMLButtonElement).disabled = !bench.canApply();
    ($("#prev-match") as HTMLButtonElement).disabled = bench.matches.length < 2;
    ($("#next-match") as HTMLButtonElement).disabled = bench.matches.length < 2;
    $("#match-pos").textContent = bench.matches.length
      ? `${bench.matchCursor + 1}/${bench.matches.length}`
      : "0/0";
    if (!g) return;
    renderGraph(g, view, bench.currentHighlight());
    const strip = $("#history");
    strip.replaceChildren(
      ...bench.snapshot!.steps.map((s, i) => {
        const cell = d.createElement("span");
        cell.className =
          "step" + (i === bench.snapshot!.cursor ? " current" : "");
        cell.textContent = i === 0 ? "start" : `${i}: ${s.rule}`;
        return cell;
      }),
    );
  }
  bench.onChange(redraw);

  $("#load").addEventListener("click", () => {
    const doc = JSON.parse(
      ($("#graph-input") as HTMLTextAreaElement).value,
    ) as GraphDoc;
    void bench
      .load(($("#theory") as HTMLInputElement).value, doc)
      .then(() => {
        ruleSel.replaceChildren(
          ...bench.rules.map((r) => {
            const o = d.createElement("option");
            o.value = r;
            o.textContent = r;
            return o;
          }),
        );
      });
  });
  ruleSel.addEventListener("change", () => void bench.setRule(ruleSel.value));
  $("#prev-match").addEventListener("click", () => bench.cycleMatch(-1));
  $("#next-match").addEventListener("click", () => bench.cycleMatch(1));
  $("#apply").addEventListener("click", () => void bench.applyCurrent());
  $("#undo").addEventListener("click", () => void bench.undo());
  $("#eval").addEventListener("click", () => void bench.evaluate());
  $("#export").addEventListener("click", () => {
    void bench.exportDoc().then((doc) => {
      const out = $("#export-out");
      out.hidden = false;
      out.textContent = JSON.stringify(doc, null, 2);
    });
  });

  return bench;
}

export { extractGraphDoc, renderGraph };

declare global {
  interface Window {
    strigraphMount?: typeof mountApp;
  }
}
if (typeof window !== "undefined") {
  window.strigraphMount = mountApp;
}
