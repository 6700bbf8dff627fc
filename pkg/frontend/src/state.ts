/**
 * View state and the lookup flow.
 *
 * Invariants the tests pin down:
 *  - candidate tiles render in the exact order the API returned (no client
 *    re-sorting);
 *  - the variant-confirmation step appears iff the selected candidate has
 *    two or more variants;
 *  - "Select None of those" terminates the session and routes to the bank
 *    search page;
 *  - nothing about the upload outlives the session view except the response
 *    data itself.
 */

import { Api, ApiError, CandidatePayload, ConfirmResponse, RecognizeResponse } from "./api.js";

export type Route = "upload" | "results" | "variant_confirm" | "entry" | "search";

export interface SelectionState {
  rank: number;
  variantId: string | null;
}

export class ViewState {
  route: Route = "upload";
  token: string | null = null;
  signType: "citation" | "segmented" = "citation";
  candidates: CandidatePayload[] = [];
  selection: SelectionState | null = null;
  entryId: string | null = null;
  sourceClipUrl: string | null = null;
  /** Set when a confirm hit 409/410; the UI offers a fresh start. */
  needsRestart = false;

  showResults(response: RecognizeResponse, sourceClipUrl: string | null): void {
    this.route = "results";
    this.token = response.token;
    // Order is the server's ranking; keep it verbatim.
    this.candidates = response.candidates;
    this.selection = null;
    this.sourceClipUrl = sourceClipUrl;
    this.needsRestart = false;
  }

  /** Candidate glosses in display order (left-to-right tiles). */
  tileOrder(): string[] {
    return this.candidates.map((c) => c.base_gloss);
  }

  selectedCandidate(): CandidatePayload | null {
    if (!this.selection) return null;
    return this.candidates[this.selection.rank - 1] ?? null;
  }

  /**
   * Select the rank-th candidate. Multi-variant candidates route to the
   * variant-confirmation step; single-variant candidates auto-select their
   * only variant and stay on the results page.
   */
  select(rank: number): void {
    const candidate = this.candidates[rank - 1];
    if (!candidate) throw new Error(`no candidate at rank ${rank}`);
    if (candidate.variants.length >= 2) {
      this.selection = { rank, variantId: null };
      this.route = "variant_confirm";
    } else {
      this.selection = { rank, variantId: candidate.variants[0].variant_id };
      this.route = "results";
    }
  }

  chooseVariant(variantId: string): void {
    const candidate = this.selectedCandidate();
    if (!this.selection || !candidate) throw new Error("no candidate selected");
    if (!candidate.variants.some((v) => v.variant_id === variantId)) {
      throw new Error(`variant ${variantId} is not offered by the selected candidate`);
    }
    this.selection.variantId = variantId;
  }

  selectionComplete(): boolean {
    return this.selection !== null && this.selection.variantId !== null;
  }

  openEntry(entryId: string): void {
    this.entryId = entryId;
    this.route = "entry";
  }

  openSearch(): void {
    this.route = "search";
  }

  /** Drop everything tied to the finished or abandoned session. */
  reset(revokeUrl: (url: string) => void = () => undefined): void {
    if (this.sourceClipUrl) revokeUrl(this.sourceClipUrl);
    this.route = "upload";
    this.token = null;
    this.candidates = [];
    this.selection = null;
    this.entryId = null;
    this.sourceClipUrl = null;
    this.needsRestart = false;
  }
}

export class LookupFlow {
  constructor(
    readonly api: Api,
    readonly state: ViewState,
  ) {}

  async submit(
    file: { name: string; blob: Blob },
    signType: "citation" | "segmented",
    sourceClipUrl: string | null = null,
  ): Promise<RecognizeResponse> {
    this.state.signType = signType;
    const response = await this.api.recognize(file, signType);
    this.state.showResults(response, sourceClipUrl);
    return response;
  }

  /** Confirm the picked rank/variant; on success route to the entry page. */
  async confirmSelection(): Promise<ConfirmResponse> {
    const { state } = this;
    if (!state.token || !state.selection || !state.selection.variantId) {
      throw new Error("nothing selected to confirm");
    }
    try {
      const outcome = await this.api.confirm(state.token, {
        rank: state.selection.rank,
        variant_id: state.selection.variantId,
      });
      if (outcome.entry_id) state.openEntry(outcome.entry_id);
      return outcome;
    } catch (error) {
      this.noteConflict(error);
      throw error;
    }
  }

  /** "Select None of those": count it and return to the bank search page. */
  async selectNone(): Promise<ConfirmResponse> {
    const { state } = this;
    if (!state.token) throw new Error("no active session");
    try {
      const outcome = await this.api.confirm(state.token, "none");
      state.openSearch();
      return outcome;
    } catch (error) {
      this.noteConflict(error);
      throw error;
    }
  }

  private noteConflict(error: unknown): void {
    if (error instanceof ApiError && (error.status === 409 || error.status === 410)) {
      this.state.needsRestart = true;
    }
  }
}
