/**
 * Typed client for the recommendation API.
 *
 * The UI never computes scores itself: everything rendered comes verbatim
 * from these payloads.
 */

export interface TokenSummary {
  id: string;
  name: string | null;
  image_url: string | null;
  total_rarity: number;
}

export interface TokensPage {
  tokens: TokenSummary[];
  total: number;
  offset: number;
  limit: number;
}

export interface RecommendationRow {
  rank: number;
  id: string;
  score: number;
}

export interface BothRecommendations {
  reference: string;
  model: "both";
  k: number;
  results: {
    traits: RecommendationRow[];
    rarity: RecommendationRow[];
  };
}

export type FrameSource = "reference" | "traits-model" | "rarity-model" | "both";

export interface FrameRow {
  id: string;
  source: FrameSource;
  cosine_to_reference: number;
  total_rarity: number;
  rank_traits: number | null;
  rank_rarity: number | null;
}

export interface EvaluationFrame {
  reference: string;
  rows: FrameRow[];
}

interface ErrorEnvelope {
  error: { code: string; message: string };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Split "<contract>-<token_id>" at the first hyphen. */
export function splitRef(ref: string): [string, string] {
  const i = ref.indexOf("-");
  if (i < 0) {
    throw new Error(`malformed token ref: ${ref}`);
  }
  return [ref.slice(0, i), ref.slice(i + 1)];
}

async function request<T>(url: string): Promise<T> {
  const response = await fetch(url, { headers: { Accept: "application/json" } });
  if (!response.ok) {
    let code = "http_error";
    let message = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as ErrorEnvelope;
      code = body.error.code;
      message = body.error.message;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  fetchTokens(offset = 0, limit = 50): Promise<TokensPage> {
    return request(`${this.baseUrl}/tokens?offset=${offset}&limit=${limit}`);
  }

  fetchRecommendations(ref: string, k: number): Promise<BothRecommendations> {
    const [contract, tokenId] = splitRef(ref);
    return request(
      `${this.baseUrl}/recommendations/${contract}/${tokenId}?model=both&k=${k}`,
    );
  }

  fetchEvaluation(ref: string, k: number): Promise<EvaluationFrame> {
    const [contract, tokenId] = splitRef(ref);
    return request(`${this.baseUrl}/evaluation/${contract}/${tokenId}?k=${k}`);
  }
}
