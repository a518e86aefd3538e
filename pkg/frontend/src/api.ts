/** Typed client for the strigraph derivation service. */

import type {
  DerivationDoc,
  GraphDoc,
  MatchesResponse,
  Snapshot,
  TensorDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(
  base: string,
  method: string,
  path: string,
  body?: unknown,
): Promise<T> {
  const resp = await fetch(base + path, {
    method,
    headers: { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const doc = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, doc.error ?? `HTTP ${resp.status}`);
  }
  return doc;
}

export class Client {
  constructor(public base: string) {}

  health(): Promise<{ status: string }> {
    return request(this.base, "GET", "/health");
  }

  loadTheory(name: string): Promise<{ name: string; rules: string[] }> {
    return request(this.base, "POST", "/theories", { name });
  }

  newDerivation(theory: string, graph: GraphDoc): Promise<Snapshot> {
    return request(this.base, "POST", "/derivations", { theory, graph });
  }

  derivation(id: string): Promise<Snapshot> {
    return request(this.base, "GET", `/derivations/${id}`);
  }

  matches(id: string, rule: string): Promise<MatchesResponse> {
    return request(
      this.base,
      "GET",
      `/derivations/${id}/matches?rule=${encodeURIComponent(rule)}`,
    );
  }

  apply(
    id: string,
    rule: string,
    matchIndex: number,
    revision?: number,
  ): Promise<Snapshot> {
    return request(this.base, "POST", `/derivations/${id}/apply`, {
      rule,
      match_index: matchIndex,
      revision,
    });
  }

  undo(id: string): Promise<Snapshot> {
    return request(this.base, "POST", `/derivations/${id}/undo`);
  }

  exportDerivation(id: string): Promise<DerivationDoc> {
    return request(this.base, "GET", `/derivations/${id}/export`);
  }

  evaluate(theory: string, graph: GraphDoc): Promise<TensorDoc> {
    return request(this.base, "POST", "/eval", { theory, graph });
  }
}
