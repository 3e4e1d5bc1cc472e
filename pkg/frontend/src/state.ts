/**
 * Explorer view state: current reference, k, and the latest fetched
 * payloads. Concurrent fetches are resolved by a sequence counter; a
 * response whose sequence is no longer current is discarded, so rendered
 * lists always correspond to the current reference.
 */
import type { ApiClient, BothRecommendations, EvaluationFrame, TokensPage } from "./api.js";

export interface ViewState {
  reference: string | null;
  k: number;
  tokens: TokensPage | null;
  recommendations: BothRecommendations | null;
  frame: EvaluationFrame | null;
  loading: boolean;
  error: string | null;
}

export type Listener = (state: ViewState) => void;

export const DEFAULT_K = 10;
export const MIN_K = 1;
export const MAX_K = 100;

export function clampK(k: number): number {
  if (!Number.isFinite(k)) {
    return DEFAULT_K;
  }
  return Math.min(MAX_K, Math.max(MIN_K, Math.trunc(k)));
}

export class ExplorerStore {
  state: ViewState = {
    reference: null,
    k: DEFAULT_K,
    tokens: null,
    recommendations: null,
    frame: null,
    loading: false,
    error: null,
  };

  private seq = 0;
  private listeners: Listener[] = [];

  constructor(
    private api: ApiClient,
    private pushHistory: (ref: string, k: number) => void = () => {},
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit() {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private patch(partial: Partial<ViewState>) {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  async loadTokens(offset = 0, limit = 50): Promise<void> {
    try {
      const tokens = await this.api.fetchTokens(offset, limit);
      this.patch({ tokens, error: null });
    } catch (err) {
      this.patch({ error: describe(err) });
    }
  }

  /** Select a reference token and fetch both panels plus the frame. */
  async selectReference(ref: string, k?: number, recordHistory = true): Promise<void> {
    const useK = clampK(k ?? this.state.k);
    const mySeq = ++this.seq;
    this.patch({ reference: ref, k: useK, loading: true, error: null });
    if (recordHistory) {
      this.pushHistory(ref, useK);
    }
    try {
      const [recommendations, frame] = await Promise.all([
        this.api.fetchRecommendations(ref, useK),
        this.api.fetchEvaluation(ref, useK),
      ]);
      if (mySeq !== this.seq) {
        return; // stale: a newer selection superseded this fetch
      }
      this.patch({ recommendations, frame, loading: false });
    } catch (err) {
      if (mySeq !== this.seq) {
        return;
      }
      this.patch({ loading: false, error: describe(err) });
    }
  }

  async setK(k: number): Promise<void> {
    const useK = clampK(k);
    if (this.state.reference === null) {
      this.patch({ k: useK });
      return;
    }
    await this.selectReference(this.state.reference, useK);
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
