/** Scripted browser test against a live strigraph server.
 *
 * Loads the bundled three-CNOT graph, applies the bundled derivation step
 * by step through the UI state (watching the rendered view), reaches the
 * swap graph, undoes back to the start, exports the derivation document,
 * and replays it through the engine to the same final graph.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { extractGraphDoc, renderGraph } from "../src/render.js";
import { mountApp } from "../src/main.js";
import { Workbench } from "../src/workbench.js";
import type { DerivationDoc, GraphDoc } from "../src/types.js";

const PORT = 8461;
const BASE = `http://127.0.0.1:${PORT}`;

interface Fixture {
  graph: GraphDoc;
  swap: GraphDoc;
  steps: [string, number][];
}

function makeFixture(): Fixture {
  const code = `
import json
from strigraph import files
from strigraph.graph import normalize_wires
from strigraph.theories import (ZX_CNOT3_DERIVATION, swap_graph,
                                zx_cnot3_graph, zx_theory)
zx = zx_theory()
print(json.dumps({
    "graph": files.graph_to_doc(zx_cnot3_graph(zx.sig)),
    "swap": files.graph_to_doc(normalize_wires(swap_graph(zx.sig))),
    "steps": ZX_CNOT3_DERIVATION,
}))
`;
  return JSON.parse(execFileSync("python3", ["-c", code], { encoding: "utf-8" }));
}

let server: ChildProcess;
let fixture: Fixture;

async function waitForServer(): Promise<void> {
  const client = new Client(BASE);
  for (let i = 0; i < 100; i++) {
    try {
      await client.health();
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  fixture = makeFixture();
  server = spawn("python3", ["-m", "strigraph.cli", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("view model", () => {
  it("renders a snapshot and re-extracts the document bit-identically", () => {
    const host = document.createElement("div");
    document.body.appendChild(host);
    const svg = renderGraph(fixture.graph, host);
    expect(extractGraphDoc(svg)).toEqual(fixture.graph);
    expect(JSON.stringify(extractGraphDoc(svg))).toBe(
      JSON.stringify(fixture.graph),
    );
    // every vertex and edge appears exactly once
    expect(svg.querySelectorAll("g.vertices > g").length).toBe(
      fixture.graph.vertices.length,
    );
    expect(svg.querySelectorAll("g.edges > *").length).toBe(
      fixture.graph.edges.length,
    );
  });

  it("highlights only ids present in the snapshot", async () => {
    const bench = new Workbench(new Client(BASE));
    await bench.load("zx", fixture.graph);
    await bench.setRule(fixture.steps[0][0]);
    const ids = new Set(bench.currentGraph()!.vertices.map((v) => v.id));
    const hl = bench.currentHighlight();
    expect(hl.vertices.length).toBeGreaterThan(0);
    for (const v of hl.vertices) expect(ids.has(v)).toBe(true);
  });
});

describe("derivation workbench", () => {
  it("drives the bundled CNOT^3 derivation to the swap graph and back", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const bench = mountApp(root, BASE);

    // load the three-CNOT graph through the form
    (root.querySelector("#theory") as HTMLInputElement).value = "zx";
    (root.querySelector("#graph-input") as HTMLTextAreaElement).value =
      JSON.stringify(fixture.graph);
    (root.querySelector("#load") as HTMLButtonElement).click();
    for (let i = 0; i < 100 && !bench.snapshot; i++) {
      await new Promise((r) => setTimeout(r, 50));
    }
    expect(bench.snapshot).not.toBeNull();
    expect(root.querySelectorAll("#view svg g.vertices > g").length).toBe(
      fixture.graph.vertices.length,
    );

    // walk the bundled derivation: pick rule, cycle to the match, apply
    for (const [rule, matchIndex] of fixture.steps) {
      await bench.setRule(rule);
      expect(bench.matches.length).toBeGreaterThan(matchIndex);
      while (bench.matches[bench.matchCursor].index !== matchIndex) {
        (root.querySelector("#next-match") as HTMLButtonElement).click();
      }
      // the matched subgraph is highlighted in the live view
      const hl = bench.currentHighlight();
      expect(
        root.querySelectorAll("#view .vertex.hl").length,
      ).toBe(hl.vertices.length);
      await bench.applyCurrent();
    }

    // final view is the swap graph: canonical documents are equal iff the
    // graphs are isomorphic
    const finalDoc = extractGraphDoc(
      root.querySelector("#view svg") as SVGSVGElement,
    );
    expect(finalDoc).toEqual(fixture.swap);
    expect(bench.snapshot!.cursor).toBe(fixture.steps.length);

    // evaluation of the final graph is proportional to a swap matrix
    const tensor = await bench.evaluate();
    const entries = tensor!.entries.map(([re, im]) => [re, im]);
    const nonzero = entries
      .map(([re, im], k) => [Math.hypot(re, im), k] as const)
      .filter(([mag]) => mag > 1e-9)
      .map(([, k]) => k);
    expect(nonzero).toEqual([0, 6, 9, 15]); // |00>, |01><10|, |10><01|, |11>

    // undo all the way to step 0
    while (bench.snapshot!.cursor > 0) {
      await bench.undo();
    }
    expect(bench.snapshot!.cursor).toBe(0);
    expect(
      extractGraphDoc(root.querySelector("#view svg") as SVGSVGElement),
    ).toEqual(bench.snapshot!.steps[0].graph);

    // exported document still holds the full recorded derivation
    const exported = (await bench.exportDoc()) as DerivationDoc;
    expect(exported.steps.length).toBe(fixture.steps.length + 1);

    // the engine replays the export to an isomorphic final graph
    const client = new Client(BASE);
    let replay = await client.newDerivation("zx", exported.steps[0].graph);
    for (const step of exported.steps.slice(1)) {
      replay = await client.apply(replay.id, step.rule!, step.match_index!);
    }
    const replayedFinal = replay.steps[replay.cursor].graph;
    expect(replayedFinal).toEqual(fixture.swap);
  });

  it("keeps apply disabled when a rule has no matches", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const bench = mountApp(root, BASE);
    await bench.load("zx", fixture.graph);
    await bench.setRule("had_invol");
    expect(bench.matches.length).toBe(0);
    expect(bench.status).toBe("no matches");
    expect((root.querySelector("#apply") as HTMLButtonElement).disabled).toBe(
      true,
    );
  });

  it("apply then undo returns to the prior snapshot", async () => {
    const bench = new Workbench(new Client(BASE));
    await bench.load("zx", fixture.graph);
    const before = JSON.stringify(bench.currentGraph());
    await bench.setRule(fixture.steps[0][0]);
    await bench.applyCurrent();
    expect(JSON.stringify(bench.currentGraph())).not.toBe(before);
    await bench.undo();
    expect(JSON.stringify(bench.currentGraph())).toBe(before);
  });
});
