/** Derivation workbench state: the human picks a rule, browses matches with
 * highlights, applies, inspects, undoes. Every graph mutation round-trips
 * through the server; the client never rewrites anything itself.
 */

import { ApiError, Client } from "./api.js";
import type {
  DerivationDoc,
  GraphDoc,
  MatchesResponse,
  MatchSummary,
  Snapshot,
  TensorDoc,
} from "./types.js";

export interface HighlightSets {
  vertices: string[];
  edges: string[];
}

export type Listener = () => void;

export class Workbench {
  snapshot: Snapshot | null = null;
  rules: string[] = [];
  currentRule: string | null = null;
  matches: MatchSummary[] = [];
  matchRevision = -1;
  matchCursor = 0;
  lastTensor: TensorDoc | null = null;
  status = "idle";

  private listeners: Listener[] = [];

  constructor(public client: Client) {}

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private notify(status?: string): void {
    if (status !== undefined) this.status = status;
    for (const fn of this.listeners) fn();
  }

  currentGraph(): GraphDoc | null {
    if (!this.snapshot) return null;
    return this.snapshot.steps[this.snapshot.cursor].graph;
  }

  currentHighlight(): HighlightSets {
    const m = this.matches[this.matchCursor] as
      | (MatchSummary & { anchor_vertices?: string[]; anchor_edges?: string[] })
      | undefined;
    if (!m) return { vertices: [], edges: [] };
    return {
      vertices: m.anchor_vertices ?? [],
      edges: m.anchor_edges ?? [],
    };
  }

  async load(theory: string, graph: GraphDoc): Promise<void> {
    const info = await this.client.loadTheory(theory);
    this.rules = info.rules;
    this.snapshot = await this.client.newDerivation(theory, graph);
    this.currentRule = null;
    this.matches = [];
    this.matchCursor = 0;
    this.notify("loaded");
  }

  async setRule(rule: string): Promise<void> {
    this.currentRule = rule;
    await this.refreshMatches();
  }

  async refreshMatches(): Promise<void> {
    if (!this.snapshot || !this.currentRule) return;
    const resp: MatchesResponse = await this.client.matches(
      this.snapshot.id,
      this.currentRule,
    );
    this.matches = resp.matches;
    this.matchRevision = resp.revision;
    this.matchCursor = 0;
    this.notify(
      this.matches.length ? `${this.matches.length} matches` : "no matches",
    );
  }

  cycleMatch(delta: number): void {
    if (!this.matches.length) return;
    const n = this.matches.length;
    this.matchCursor = (this.matchCursor + delta + n) % n;
    this.notify();
  }

  canApply(): boolean {
    return this.snapshot !== null && this.matches.length > 0;
  }

  async applyCurrent(): Promise<void> {
    if (!this.snapshot || !this.currentRule || !this.canApply()) return;
    try {
      this.snapshot = await this.client.apply(
        this.snapshot.id,
        this.currentRule,
        this.matches[this.matchCursor].index,
        this.matchRevision,
      );
      this.notify("applied");
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // someone advanced the derivation under us: refresh and retry later
        this.snapshot = await this.client.derivation(this.snapshot.id);
        await this.refreshMatches();
        this.notify("match list was stale; refreshed");
        return;
      }
      throw err;
    }
    await this.refreshMatches();
  }

  async undo(): Promise<void> {
    if (!this.snapshot) return;
    this.snapshot = await this.client.undo(this.snapshot.id);
    this.notify("undone");
    await this.refreshMatches();
  }

  async evaluate(): Promise<TensorDoc | null> {
    const g = this.currentGraph();
    if (!g || !this.snapshot) return null;
    this.lastTensor = await this.client.evaluate(this.snapshot.theory, g);
    this.notify("evaluated");
    return this.lastTensor;
  }

  async exportDoc(): Promise<DerivationDoc | null> {
    if (!this.snapshot) return null;
    return this.client.exportDerivation(this.snapshot.id);
  }
}

/** Short human-readable form of a tensor (scalars and small matrices). */
export function tensorLabel(t: TensorDoc): string {
  const fmt = ([re, im]: [number, number]) => {
    const r = Math.abs(re) < 1e-12 ? 0 : Number(re.toFixed(6));
    const i = Math.abs(im) < 1e-12 ? 0 : Number(im.toFixed(6));
    return i === 0 ? `${r}` : `${r}${i > 0 ? "+" : ""}${i}i`;
  };
  if (t.entries.length === 1) return `scalar ${fmt(t.entries[0])}`;
  if (t.entries.length <= 16) {
    return `[${t.entries.map(fmt).join(", ")}]`;
  }
  return `${t.upper.length}^up x ${t.lower.length}^low tensor, ` +
    `${t.entries.length} entries`;
}
