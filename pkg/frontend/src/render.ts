/** SVG rendering of a graph document, and the inverse extraction.
 *
 * Every vertex and edge appears exactly once, carrying its document fields
 * as data attributes, so the picture is a faithful function of the
 * document: extractGraphDoc(render(doc)) rebuilds it bit-identically.
 */

import { layoutGraph } from "./layout.js";
import type { EdgeDoc, GraphDoc, TagDoc, VertexDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el(doc: Document, name: string, attrs: Record<string, string>) {
  const node = doc.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

/** Render a graph document into a fresh SVG element. */
export function renderGraph(
  doc: GraphDoc,
  into: HTMLElement,
  highlight?: { vertices?: string[]; edges?: string[] },
): SVGSVGElement {
  const d = into.ownerDocument;
  const lay = layoutGraph(doc);
  const svg = el(d, "svg", {
    width: String(Math.max(lay.width, 200)),
    height: String(Math.max(lay.height, 160)),
    class: "graph-view",
  }) as SVGSVGElement;
  svg.dataset.theory = doc.theory;
  const hv = new Set(highlight?.vertices ?? []);
  const he = new Set(highlight?.edges ?? []);

  const edgeLayer = el(d, "g", { class: "edges" });
  for (const e of doc.edges) {
    const a = lay.positions.get(e.src)!;
    const b = lay.positions.get(e.tgt)!;
    let path: Element;
    if (e.src === e.tgt) {
      // a minimal circle: a small loop beside the vertex
      path = el(d, "path", {
        d: `M ${a.x} ${a.y} c 36 -18, 36 54, 0 36 z`,
        class: "edge loop",
        fill: "none",
      });
    } else if (lay.backEdges.has(e.id)) {
      const bend = Math.max(a.x, b.x) + 45;
      path = el(d, "path", {
        d: `M ${a.x} ${a.y} C ${bend} ${a.y}, ${bend} ${b.y}, ${b.x} ${b.y}`,
        class: "edge back",
        fill: "none",
      });
    } else {
      path = el(d, "line", {
        x1: String(a.x),
        y1: String(a.y),
        x2: String(b.x),
        y2: String(b.y),
        class: "edge",
      });
    }
    path.setAttribute("data-id", e.id);
    path.setAttribute("data-src", e.src);
    path.setAttribute("data-tgt", e.tgt);
    path.setAttribute("data-tag-kind", e.tag.kind);
    if (e.tag.morphism !== undefined) {
      path.setAttribute("data-tag-morphism", e.tag.morphism);
    }
    if (e.tag.port !== undefined) {
      path.setAttribute("data-tag-port", String(e.tag.port));
    }
    if (he.has(e.id)) path.classList.add("hl");
    edgeLayer.appendChild(path);
  }
  svg.appendChild(edgeLayer);

  const vertexLayer = el(d, "g", { class: "vertices" });
  for (const v of doc.vertices) {
    const p = lay.positions.get(v.id)!;
    const g = el(d, "g", { class: `vertex ${v.kind}`, transform: `translate(${p.x},${p.y})` });
    g.setAttribute("data-id", v.id);
    g.setAttribute("data-kind", v.kind);
    g.setAttribute("data-type", v.type);
    if (v.data !== undefined) g.setAttribute("data-data", v.data);
    if (hv.has(v.id)) g.classList.add("hl");
    if (v.kind === "wire") {
      g.appendChild(el(d, "circle", { r: "4", class: "wire-dot" }));
    } else {
      g.appendChild(
        el(d, "rect", { x: "-22", y: "-13", width: "44", height: "26", rx: "4", class: "box" }),
      );
      const label = el(d, "text", { y: "4", "text-anchor": "middle", class: "box-label" });
      label.textContent = v.data !== undefined ? `${v.type}(${v.data})` : v.type;
      g.appendChild(label);
    }
    vertexLayer.appendChild(g);
  }
  svg.appendChild(vertexLayer);

  const markers = el(d, "g", { class: "boundary" });
  doc.inputs.forEach((id, i) => {
    const p = lay.positions.get(id)!;
    const m = el(d, "text", {
      x: String(p.x),
      y: String(p.y - 10),
      class: "input-marker",
      "text-anchor": "middle",
    });
    m.setAttribute("data-vertex", id);
    m.textContent = `in${i}`;
    markers.appendChild(m);
  });
  doc.outputs.forEach((id, i) => {
    const p = lay.positions.get(id)!;
    const m = el(d, "text", {
      x: String(p.x),
      y: String(p.y + 18),
      class: "output-marker",
      "text-anchor": "middle",
    });
    m.setAttribute("data-vertex", id);
    m.textContent = `out${i}`;
    markers.appendChild(m);
  });
  svg.appendChild(markers);

  into.replaceChildren(svg);
  return svg;
}

/** Rebuild the graph document from a rendered view. */
export function extractGraphDoc(svg: SVGSVGElement): GraphDoc {
  const vertices: VertexDoc[] = [];
  for (const g of svg.querySelectorAll("g.vertices > g")) {
    const v: VertexDoc = {
      id: g.getAttribute("data-id")!,
      kind: g.getAttribute("data-kind") as "wire" | "box",
      type: g.getAttribute("data-type")!,
    };
    const data = g.getAttribute("data-data");
    if (data !== null) v.data = data;
    vertices.push(v);
  }
  const edges: EdgeDoc[] = [];
  for (const p of svg.querySelectorAll("g.edges > *")) {
    const tag: TagDoc = { kind: p.getAttribute("data-tag-kind") as TagDoc["kind"] };
    const morphism = p.getAttribute("data-tag-morphism");
    if (morphism !== null) tag.morphism = morphism;
    const port = p.getAttribute("data-tag-port");
    if (port !== null) tag.port = Number(port);
    edges.push({
      id: p.getAttribute("data-id")!,
      src: p.getAttribute("data-src")!,
      tgt: p.getAttribute("data-tgt")!,
      tag,
    });
  }
  const inputs: string[] = [];
  const outputs: string[] = [];
  for (const m of svg.querySelectorAll("g.boundary > text")) {
    const id = m.getAttribute("data-vertex")!;
    if (m.getAttribute("class") === "input-marker") inputs.push(id);
    else outputs.push(id);
  }
  return { theory: svg.dataset.theory!, vertices, edges, inputs, outputs };
}
