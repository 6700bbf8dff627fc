/**
 * Bootstrap: wires the API client, the flow state, and the views onto #app.
 */

import { Api, ApiError, ViolationPayload } from "./api.js";
import { LookupFlow, ViewState } from "./state.js";
import { validateUpload } from "./validate.js";
import {
  renderEntry,
  renderResults,
  renderSearch,
  renderUpload,
  renderVariantConfirm,
  ViewCallbacks,
} from "./views.js";

const api = new Api("");
const state = new ViewState();
const flow = new LookupFlow(api, state);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

let uploadViolations: ViolationPayload[] = [];

function rerender(): void {
  const r = root as HTMLElement;
  switch (state.route) {
    case "upload":
      renderUpload(r, uploadViolations, callbacks);
      break;
    case "results":
      renderResults(r, state, callbacks);
      break;
    case "variant_confirm":
      renderVariantConfirm(r, state, callbacks);
      break;
    case "entry":
      if (state.entryId) {
        const wanted = state.entryId;
        api
          .entry(wanted)
          .then((entry) => renderEntry(r, entry, callbacks))
          .catch(() =>
            renderSearch(r, null, callbacks, `No sign bank entry found for "${wanted}".`),
          );
      }
      break;
    case "search":
      renderSearch(r, null, callbacks);
      break;
  }
}

function videoDuration(file: File): Promise<number | null> {
  if (file.name.toLowerCase().endsWith(".features")) return Promise.resolve(null);
  return new Promise((resolve) => {
    const probe = document.createElement("video");
    probe.preload = "metadata";
    probe.onloadedmetadata = () => {
      URL.revokeObjectURL(probe.src);
      resolve(Number.isFinite(probe.duration) ? probe.duration : null);
    };
    probe.onerror = () => {
      URL.revokeObjectURL(probe.src);
      resolve(null);
    };
    probe.src = URL.createObjectURL(file);
  });
}

const callbacks: ViewCallbacks = {
  onSubmit(file, signType) {
    void (async () => {
      const duration = await videoDuration(file);
      uploadViolations = validateUpload(file.name, file.size, duration);
      if (uploadViolations.length > 0) {
        rerender();
        return;
      }
      const clipUrl = file.name.toLowerCase().endsWith(".features")
        ? null
        : URL.createObjectURL(file);
      try {
        await flow.submit({ name: file.name, blob: file }, signType, clipUrl);
      } catch (error) {
        if (error instanceof ApiError) {
          uploadViolations = error.violations.length
            ? error.violations
            : [{ rule: "server", message: error.message }];
        } else {
          uploadViolations = [{ rule: "network", message: String(error) }];
        }
        if (clipUrl) URL.revokeObjectURL(clipUrl);
      }
      rerender();
    })();
  },
  onSelect(rank) {
    state.select(rank);
    rerender();
  },
  onChooseVariant(variantId) {
    state.chooseVariant(variantId);
    rerender();
  },
  onConfirm() {
    void flow
      .confirmSelection()
      .catch(() => undefined)
      .finally(rerender);
  },
  onNone() {
    void flow
      .selectNone()
      .catch(() => undefined)
      .finally(rerender);
  },
  onRestart() {
    uploadViolations = [];
    state.reset((url) => URL.revokeObjectURL(url));
    rerender();
  },
  onSearch(params) {
    void api
      .search(params)
      .then((hits) => renderSearch(root as HTMLElement, hits, callbacks))
      .catch(() => renderSearch(root as HTMLElement, [], callbacks));
  },
  onOpenEntry(entryId) {
    state.openEntry(entryId);
    rerender();
  },
};

rerender();
