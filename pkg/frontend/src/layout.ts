/** Deterministic layered layout: inputs on top, outputs at the bottom.
 *
 * Layers come from longest-path relaxation over forward edges (back edges
 * found by a DFS in document order are skipped, so traced loops render as
 * upward return arcs). Within a layer, positions order by predecessor
 * barycenter with document order as the tie-break, so the same document
 * always produces the same picture.
 */

import type { GraphDoc } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface Layout {
  positions: Map<string, Point>;
  width: number;
  height: number;
  backEdges: Set<string>;
}

const X_GAP = 90;
const Y_GAP = 80;
const MARGIN = 50;

export function layoutGraph(doc: GraphDoc): Layout {
  const ids = doc.vertices.map((v) => v.id);
  const index = new Map(ids.map((id, i) => [id, i]));
  const out = new Map<string, { tgt: string; edge: string }[]>();
  for (const id of ids) out.set(id, []);
  for (const e of doc.edges) {
    out.get(e.src)!.push({ tgt: e.tgt, edge: e.id });
  }

  // back edges via iterative DFS in document order
  const backEdges = new Set<string>();
  const state = new Map<string, number>(); // 0 unseen, 1 open, 2 done
  for (const id of ids) state.set(id, 0);
  const roots = [...doc.inputs, ...ids.filter((v) => !doc.inputs.includes(v))];
  for (const root of roots) {
    if (state.get(root) !== 0) continue;
    const stack: [string, number][] = [[root, 0]];
    state.set(root, 1);
    while (stack.length) {
      const top = stack[stack.length - 1];
      const nexts = out.get(top[0])!;
      if (top[1] >= nexts.length) {
        state.set(top[0], 2);
        stack.pop();
        continue;
      }
      const step = nexts[top[1]++];
      if (state.get(step.tgt) === 1) {
        backEdges.add(step.edge);
      } else if (state.get(step.tgt) === 0) {
        state.set(step.tgt, 1);
        stack.push([step.tgt, 0]);
      }
    }
  }

  // longest-path layering over forward edges
  const layer = new Map<string, number>();
  for (const id of ids) layer.set(id, 0);
  for (let round = 0; round < ids.length + 1; round++) {
    let changed = false;
    for (const e of doc.edges) {
      if (backEdges.has(e.id)) continue;
      const want = layer.get(e.src)! + 1;
      if (layer.get(e.tgt)! < want) {
        layer.set(e.tgt, want);
        changed = true;
      }
    }
    if (!changed) break;
  }
  // pin graph outputs to the deepest layer so the flow reads downward
  const maxLayer = Math.max(0, ...layer.values());
  for (const o of doc.outputs) layer.set(o, maxLayer);

  const byLayer = new Map<number, string[]>();
  for (const id of ids) {
    const l = layer.get(id)!;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(id);
  }

  const xpos = new Map<string, number>();
  for (const id of doc.inputs) {
    xpos.set(id, doc.inputs.indexOf(id));
  }
  const layers = [...byLayer.keys()].sort((a, b) => a - b);
  for (const l of layers) {
    const row = byLayer.get(l)!;
    const keyed = row.map((id) => {
      const preds = doc.edges
        .filter((e) => e.tgt === id && !backEdges.has(e.id))
        .map((e) => xpos.get(e.src) ?? 0);
      const bary = preds.length
        ? preds.reduce((a, b) => a + b, 0) / preds.length
        : index.get(id)!;
      return { id, bary };
    });
    keyed.sort((a, b) => a.bary - b.bary || index.get(a.id)! - index.get(b.id)!);
    keyed.forEach((k, i) => xpos.set(k.id, i));
  }

  const positions = new Map<string, Point>();
  let maxX = 0;
  for (const id of ids) {
    const x = MARGIN + xpos.get(id)! * X_GAP;
    const y = MARGIN + layer.get(id)! * Y_GAP;
    positions.set(id, { x, y });
    maxX = Math.max(maxX, x);
  }
  return {
    positions,
    width: maxX + MARGIN,
    height: MARGIN * 2 + maxLayer * Y_GAP,
    backEdges,
  };
}
