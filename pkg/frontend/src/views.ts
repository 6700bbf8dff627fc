/**
 * DOM rendering for each route. Views read from ViewState and call back into
 * the flow; they never reorder or filter what the API returned.
 */

import { EntryResponse, SearchHit, ViolationPayload } from "./api.js";
import { ViewState } from "./state.js";

export interface ViewCallbacks {
  onSubmit: (file: File, signType: "citation" | "segmented") => void;
  onSelect: (rank: number) => void;
  onChooseVariant: (variantId: string) => void;
  onConfirm: () => void;
  onNone: () => void;
  onRestart: () => void;
  onSearch: (params: { gloss?: string; word?: string; start_hs?: string; end_hs?: string }) => void;
  onOpenEntry: (entryId: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function media(url: string | null, className: string): HTMLElement {
  // Exemplar previews stream straight from the service media route; nothing
  // is cached client-side.
  if (!url) return el("div", `${className} placeholder`, "no preview");
  const video = el("video", className);
  video.src = url;
  video.controls = true;
  video.preload = "none";
  // double-click toggles the enlarged size, and again restores it
  video.addEventListener("dblclick", () => video.classList.toggle("enlarged"));
  return video;
}

export function renderUpload(
  root: HTMLElement,
  violations: ViolationPayload[],
  cb: ViewCallbacks,
): void {
  root.replaceChildren();
  const page = el("section", "page upload-page");
  page.append(el("h1", undefined, "Look up a sign by video example"));

  const form = el("form");
  const picker = el("input") as HTMLInputElement;
  picker.type = "file";
  picker.accept = ".mp4,.mov,.features";

  const radios = el("fieldset");
  radios.append(el("legend", undefined, "Select uploaded video sign type:"));
  for (const [value, label] of [
    ["citation", "Citation-form sign"],
    ["segmented", "Sign segmented from continuous signing"],
  ] as const) {
    const wrap = el("label");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "sign_type";
    radio.value = value;
    radio.checked = value === "citation";
    wrap.append(radio, document.createTextNode(` ${label}`));
    radios.append(wrap);
  }

  const submit = el("button", "primary", "Search by Video Example") as HTMLButtonElement;
  submit.type = "submit";
  submit.disabled = true; // no file chosen yet
  picker.addEventListener("change", () => {
    submit.disabled = !picker.files || picker.files.length === 0;
  });

  const report = el("ul", "violations");
  for (const violation of violations) {
    report.append(el("li", `violation rule-${violation.rule}`, violation.message));
  }

  const hints = el("ul", "hints");
  for (const hint of [
    "The clip should contain a single sign.",
    "Acceptable formats: mp4, mov, or pre-extracted .features.",
    "Keep the duration under 7 seconds.",
    "Filenames: letters, numbers, and the symbols - _ . only.",
  ]) {
    hints.append(el("li", undefined, hint));
  }

  const privacy = el(
    "p",
    "privacy-notice",
    "All uploads are deleted immediately after processing. No videos are retained.",
  );

  form.append(picker, radios, submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = picker.files?.[0];
    const signType =
      (form.querySelector('input[name="sign_type"]:checked') as HTMLInputElement | null)?.value ??
      "citation";
    if (file) cb.onSubmit(file, signType as "citation" | "segmented");
  });

  page.append(form, report, hints, privacy);
  root.append(page);
}

export function renderResults(root: HTMLElement, state: ViewState, cb: ViewCallbacks): void {
  root.replaceChildren();
  const page = el("section", "page results-page");
  page.append(
    el("h1", undefined, "Sign recognition results"),
    el(
      "p",
      "hint",
      "Double-click any video to enlarge it (and again to return to the smaller size).",
    ),
  );

  const row = el("div", "tiles");
  const source = el("figure", "tile source-tile");
  source.append(media(state.sourceClipUrl, "clip"), el("figcaption", undefined, "Source video"));
  row.append(source);

  // Tiles strictly follow the API candidate order.
  state.candidates.forEach((candidate, i) => {
    const tile = el("figure", "tile candidate-tile");
    tile.dataset.rank = String(candidate.rank);
    tile.append(
      media(candidate.variants[0]?.preview_url ?? null, "clip"),
      el("figcaption", "gloss", candidate.base_gloss),
    );
    const select = el("button", "select", `Select: ${candidate.base_gloss}`);
    select.addEventListener("click", () => cb.onSelect(i + 1));
    tile.append(select);
    if (candidate.variants.length >= 2) {
      tile.append(el("span", "see-variants", "See Variants"));
    }
    if (state.selection?.rank === i + 1) tile.classList.add("selected");
    row.append(tile);
  });
  page.append(row);

  const actions = el("div", "actions");
  const none = el("button", "none", "Select None of those");
  none.addEventListener("click", () => cb.onNone());
  const confirm = el("button", "primary", "Confirm selection") as HTMLButtonElement;
  confirm.disabled = !state.selectionComplete();
  confirm.addEventListener("click", () => cb.onConfirm());
  actions.append(none, confirm);
  page.append(actions);

  if (state.needsRestart) {
    const prompt = el("div", "restart-prompt");
    prompt.append(el("p", undefined, "This session already finished or expired."));
    const restart = el("button", undefined, "Start a new lookup");
    restart.addEventListener("click", () => cb.onRestart());
    prompt.append(restart);
    page.append(prompt);
  }
  root.append(page);
}

export function renderVariantConfirm(root: HTMLElement, state: ViewState, cb: ViewCallbacks): void {
  root.replaceChildren();
  const candidate = state.selectedCandidate();
  if (!candidate) return;
  const page = el("section", "page variant-page");
  page.append(el("h1", undefined, `Confirm which ${candidate.base_gloss} variant is right`));
  const row = el("div", "tiles");
  for (const variant of candidate.variants) {
    const tile = el("figure", "tile variant-tile");
    tile.append(media(variant.preview_url, "clip"), el("figcaption", "gloss", variant.label));
    const pick = el("button", "select", `Select: ${variant.label}`);
    pick.addEventListener("click", () => cb.onChooseVariant(variant.variant_id));
    if (state.selection?.variantId === variant.variant_id) tile.classList.add("selected");
    tile.append(pick);
    row.append(tile);
  }
  page.append(row);

  const actions = el("div", "actions");
  const confirm = el("button", "primary", "Confirm variant") as HTMLButtonElement;
  confirm.disabled = !state.selectionComplete();
  confirm.addEventListener("click", () => cb.onConfirm());
  actions.append(confirm);
  page.append(actions);
  root.append(page);
}

export function renderEntry(root: HTMLElement, entry: EntryResponse, cb: ViewCallbacks): void {
  root.replaceChildren();
  const page = el("section", "page entry-page");
  page.append(el("h1", undefined, `${entry.base_gloss}`), el("p", "sign-class", entry.sign_class));

  const toggle = el("button", undefined, "Show Related English Words");
  const wordTable = el("table", "related-words hidden");
  const head = el("tr");
  for (const caption of ["Variant ID", "Variant Label", "Related English Words"]) {
    head.append(el("th", undefined, caption));
  }
  wordTable.append(head);
  for (const variant of entry.variants) {
    const tr = el("tr");
    tr.append(
      el("td", undefined, variant.variant_id),
      el("td", undefined, variant.label),
      el("td", undefined, variant.related_english_words.join(", ")),
    );
    wordTable.append(tr);
  }
  toggle.addEventListener("click", () => wordTable.classList.toggle("hidden"));
  page.append(toggle, wordTable);

  for (const variant of entry.variants) {
    const section = el("section", "variant-exemplars");
    section.append(el("h2", undefined, variant.label));
    for (const [caption, group] of [
      ["Isolated signs", variant.isolated],
      ["Signs from sentences", variant.from_sentence],
    ] as const) {
      if (group.length === 0) continue; // hide empty provenance groups
      const block = el("div", "provenance-group");
      block.append(el("h3", undefined, caption));
      for (const exemplar of group) {
        block.append(media(exemplar.media_url, "clip small"));
        if (exemplar.source_utterance) {
          block.append(el("span", "utterance-ref", `from ${exemplar.source_utterance}`));
        }
      }
      section.append(block);
    }
    page.append(section);
  }
  const back = el("button", undefined, "New lookup");
  back.addEventListener("click", () => cb.onRestart());
  page.append(back);
  root.append(page);
}

export function renderSearch(
  root: HTMLElement,
  hits: SearchHit[] | null,
  cb: ViewCallbacks,
  notice?: string,
): void {
  root.replaceChildren();
  const page = el("section", "page search-page");
  if (notice) page.append(el("p", "notice", notice));
  page.append(el("h1", undefined, "Search the sign bank"));

  const form = el("form", "search-form");
  const fields: Array<[keyof Parameters<ViewCallbacks["onSearch"]>[0], string]> = [
    ["gloss", "Gloss text"],
    ["word", "Related English word"],
    ["start_hs", "Start handshape"],
    ["end_hs", "End handshape"],
  ];
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, label] of fields) {
    const wrap = el("label", undefined, `${label} `);
    const input = el("input") as HTMLInputElement;
    input.name = name;
    inputs.set(name, input);
    wrap.append(input);
    form.append(wrap);
  }
  const go = el("button", "primary", "Search");
  go.type = "submit";
  form.append(go);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const params: Record<string, string> = {};
    for (const [name, input] of inputs) {
      if (input.value.trim()) params[name] = input.value.trim();
    }
    cb.onSearch(params);
  });
  page.append(form);

  if (hits !== null) {
    const list = el("ul", "search-hits");
    for (const hit of hits) {
      const item = el("li");
      const link = el("a", undefined, `${hit.label} (${hit.base_gloss})`);
      link.href = "#";
      link.addEventListener("click", (event) => {
        event.preventDefault();
        cb.onOpenEntry(hit.entry_id);
      });
      item.append(link);
      list.append(item);
    }
    if (hits.length === 0) list.append(el("li", "empty", "No matches"));
    page.append(list);
  }
  const back = el("button", undefined, "New lookup");
  back.addEventListener("click", () => cb.onRestart());
  page.append(back);
  root.append(page);
}
