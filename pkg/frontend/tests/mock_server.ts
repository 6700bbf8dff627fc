/**
 * Fetch-level mock of the lookup service /api contract, faithful to the
 * documented semantics: pending sessions, one-shot confirmation with 409 on
 * duplicates, variant-must-match-rank with 400, and the per-sign-type
 * confirmation-rank histogram behind /api/stats.
 */

import type { CandidatePayload } from "../src/api.js";

type Histogram = Record<string, number>;

function emptyHistogram(): Histogram {
  return { "1": 0, "2": 0, "3": 0, "4": 0, "5": 0, none: 0 };
}

export class MockServer {
  sessions = new Map<
    string,
    { state: string; signType: "citation" | "segmented"; candidates: CandidatePayload[] }
  >();
  stats: Record<"citation" | "segmented", Histogram> = {
    citation: emptyHistogram(),
    segmented: emptyHistogram(),
  };
  private nextToken = 1;

  constructor(readonly candidates: CandidatePayload[]) {}

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, "http://mock.test");
    const method = (init?.method ?? "GET").toUpperCase();

    if (method === "POST" && url.pathname === "/api/recognize") {
      const form = init?.body as FormData;
      const signType = String(form.get("sign_type")) as "citation" | "segmented";
      const token = `tok-${this.nextToken++}`;
      this.sessions.set(token, { state: "pending", signType, candidates: this.candidates });
      return Response.json({ token, sign_type: signType, candidates: this.candidates });
    }

    const confirmMatch = url.pathname.match(/^\/api\/sessions\/([^/]+)\/confirm$/);
    if (method === "POST" && confirmMatch) {
      const session = this.sessions.get(confirmMatch[1]);
      if (!session) {
        return Response.json({ error: "not_found", detail: "unknown token" }, { status: 404 });
      }
      if (session.state !== "pending") {
        return Response.json({ error: "conflict", detail: "already terminal" }, { status: 409 });
      }
      const body = JSON.parse(String(init?.body));
      const selection = body.selection;
      if (selection === "none") {
        session.state = "rejected_none";
        this.stats[session.signType]["none"] += 1;
        return Response.json({
          state: "rejected_none",
          redirect: { kind: "bank_search", url: "/api/search" },
        });
      }
      const candidate = session.candidates[selection.rank - 1];
      if (!candidate || !candidate.variants.some((v) => v.variant_id === selection.variant_id)) {
        return Response.json({ error: "selection", detail: "bad selection" }, { status: 400 });
      }
      session.state = "confirmed";
      this.stats[session.signType][String(selection.rank)] += 1;
      return Response.json({
        state: "confirmed",
        rank: selection.rank,
        variant_id: selection.variant_id,
        entry_id: candidate.entry_id,
        redirect: { kind: "entry", url: `/api/signs/${candidate.entry_id}` },
      });
    }

    if (method === "GET" && url.pathname === "/api/stats") {
      const withTotals = (h: Histogram) => ({
        ...h,
        total: Object.values(h).reduce((a, b) => a + b, 0),
      });
      const citation = withTotals(this.stats.citation);
      const segmented = withTotals(this.stats.segmented);
      return Response.json({
        citation,
        segmented,
        total: citation.total + segmented.total,
      });
    }

    if (method === "GET" && url.pathname === "/api/search") {
      if ([...url.searchParams.values()].filter(Boolean).length === 0) {
        return Response.json({ error: "query", detail: "empty query" }, { status: 400 });
      }
      return Response.json({ variants: [] });
    }

    return Response.json({ error: "not_found", detail: url.pathname }, { status: 404 });
  };
}

export function candidateFixture(): CandidatePayload[] {
  // Deliberately NOT alphabetical: tile order must come from the API, and
  // HONOR at rank 2 carries two variants to trigger the variant step.
  const variant = (id: string, label: string, score: number) => ({
    variant_id: id,
    label,
    score,
    preview_url: `/api/media/x-${id}`,
  });
  return [
    {
      rank: 1,
      entry_id: "e-careless",
      base_gloss: "CARELESS",
      score: 0.11,
      entry_url: "/api/signs/e-careless",
      variants: [variant("v-careless", "CARELESS", 0.11)],
    },
    {
      rank: 2,
      entry_id: "e-honor",
      base_gloss: "HONOR",
      score: 0.2,
      entry_url: "/api/signs/e-honor",
      variants: [variant("v-honor", "HONOR", 0.2), variant("v-honor2", "HONOR-2", 0.27)],
    },
    {
      rank: 3,
      entry_id: "e-worry",
      base_gloss: "WORRY",
      score: 0.3,
      entry_url: "/api/signs/e-worry",
      variants: [variant("v-worry", "WORRY", 0.3)],
    },
    {
      rank: 4,
      entry_id: "e-very",
      base_gloss: "VERY",
      score: 0.42,
      entry_url: "/api/signs/e-very",
      variants: [variant("v-very", "VERY", 0.42)],
    },
    {
      rank: 5,
      entry_id: "e-respect",
      base_gloss: "RESPECT",
      score: 0.55,
      entry_url: "/api/signs/e-respect",
      variants: [variant("v-respect", "RESPECT", 0.55)],
    },
  ];
}
