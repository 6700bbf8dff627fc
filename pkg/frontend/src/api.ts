/**
 * Typed client for the lookup service /api endpoints. Pure transport: no
 * recognition logic and no re-ordering of anything the server returns.
 */

export interface VariantPayload {
  variant_id: string;
  label: string;
  score: number;
  preview_url: string | null;
}

export interface CandidatePayload {
  rank: number;
  entry_id: string;
  base_gloss: string;
  score: number;
  entry_url: string;
  variants: VariantPayload[];
}

export interface RecognizeResponse {
  token: string;
  sign_type: string;
  candidates: CandidatePayload[];
}

export interface ViolationPayload {
  rule: string;
  message: string;
}

export interface ConfirmResponse {
  state: string;
  rank?: number;
  variant_id?: string;
  entry_id?: string;
  redirect: { kind: string; url: string };
}

export interface ModeStats {
  [outcome: string]: number;
}

export interface StatsResponse {
  citation: ModeStats;
  segmented: ModeStats;
  total: number;
}

export interface SearchHit {
  variant_id: string;
  label: string;
  entry_id: string;
  base_gloss: string;
  entry_url: string;
}

export interface ExemplarRef {
  exemplar_id: string;
  media_url: string;
  source_utterance?: string | null;
}

export interface EntryVariantPayload {
  variant_id: string;
  label: string;
  related_english_words: string[];
  start_handshape_dom: string;
  end_handshape_dom: string;
  start_handshape_nondom: string | null;
  end_handshape_nondom: string | null;
  isolated: ExemplarRef[];
  from_sentence: ExemplarRef[];
}

export interface EntryResponse {
  entry_id: string;
  base_gloss: string;
  sign_class: string;
  variants: EntryVariantPayload[];
}

export type Selection = "none" | { rank: number; variant_id: string };

/** Error carrying the HTTP status so views can offer targeted recovery. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly violations: ViolationPayload[] = [],
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async parseError(response: Response): Promise<never> {
    let code = "error";
    let detail = `HTTP ${response.status}`;
    let violations: ViolationPayload[] = [];
    try {
      const body = await response.json();
      code = body.error ?? code;
      detail = body.detail ?? detail;
      violations = body.violations ?? [];
    } catch {
      /* non-JSON error body; keep defaults */
    }
    throw new ApiError(response.status, code, detail, violations);
  }

  async recognize(
    file: { name: string; blob: Blob },
    signType: "citation" | "segmented",
  ): Promise<RecognizeResponse> {
    const form = new FormData();
    form.append("file", file.blob, file.name);
    form.append("sign_type", signType);
    const response = await this.fetchFn(`${this.baseUrl}/api/recognize`, {
      method: "POST",
      body: form,
    });
    if (!response.ok) await this.parseError(response);
    return response.json();
  }

  async confirm(token: string, selection: Selection): Promise<ConfirmResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/sessions/${token}/confirm`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ selection }),
    });
    if (!response.ok) await this.parseError(response);
    return response.json();
  }

  async stats(): Promise<StatsResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/stats`);
    if (!response.ok) await this.parseError(response);
    return response.json();
  }

  async search(params: {
    gloss?: string;
    word?: string;
    start_hs?: string;
    end_hs?: string;
  }): Promise<SearchHit[]> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value) query.set(key, value);
    }
    const response = await this.fetchFn(`${this.baseUrl}/api/search?${query.toString()}`);
    if (!response.ok) await this.parseError(response);
    const body = await response.json();
    return body.variants;
  }

  async entry(entryId: string): Promise<EntryResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/signs/${entryId}`);
    if (!response.ok) await this.parseError(response);
    return response.json();
  }
}
