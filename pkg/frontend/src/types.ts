/** Document shapes produced by the strigraph server (see its file formats). */

export interface TagDoc {
  kind: "mid" | "in" | "out";
  morphism?: string;
  port?: number;
}

export interface VertexDoc {
  id: string;
  kind: "wire" | "box";
  type: string;
  data?: string;
}

export interface EdgeDoc {
  id: string;
  src: string;
  tgt: string;
  tag: TagDoc;
}

export interface GraphDoc {
  theory: string;
  vertices: VertexDoc[];
  edges: EdgeDoc[];
  inputs: string[];
  outputs: string[];
}

export interface StepDoc {
  graph: GraphDoc;
  rule?: string;
  match_index?: number;
}

export interface Snapshot {
  id: string;
  theory: string;
  cursor: number;
  revision: number;
  steps: StepDoc[];
}

export interface MatchSummary {
  index: number;
  rule: string;
  boxes: number[];
  vertex_image: number[];
  edge_image: number[];
  expansions: number;
}

export interface MatchesResponse {
  rule: string;
  revision: number;
  matches: MatchSummary[];
}

export interface TensorDoc {
  lower: string[];
  upper: string[];
  entries: [number, number][];
}

export interface DerivationDoc {
  theory: string;
  steps: StepDoc[];
}
