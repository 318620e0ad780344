// Screen wiring: hash router over three screens (upload, review, graph),
// all state derived from API responses.

import { ApiClient } from "./api";
import { ASSIGNABLE_TYPES, colorForType, formatConfidence } from "./format";
import { buildGraphView, layoutGraph } from "./graph";
import { ReviewQueue } from "./review";
import { describeUploadError, formatForFile, submitAndWait } from "./upload";
import type { Extraction, KbEntity } from "./types";

const api = new ApiClient("");
const app = document.getElementById("app")!;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function toast(message: string, kind: "error" | "info" = "info"): void {
  const box = el("div", { class: `toast ${kind}` }, message);
  document.body.append(box);
  setTimeout(() => box.remove(), 4000);
}

function nav(): HTMLElement {
  return el(
    "nav",
    {},
    el("a", { href: "#/upload" }, "Upload"),
    el("a", { href: "#/review" }, "Review queue"),
    el("span", { class: "brand" }, "stixpipe"),
  );
}

// ------------------------------------------------------------- upload

function uploadScreen(): void {
  const text = el("textarea", { placeholder: "Paste report text here…", rows: "12" });
  const file = el("input", { type: "file" });
  const submit = el("button", {}, "Extract");
  const status = el("div", { class: "status" });

  file.addEventListener("change", async () => {
    const f = file.files?.[0];
    if (f) text.value = await f.text();
  });

  submit.addEventListener("click", async () => {
    const content = text.value;
    if (!content.trim()) {
      toast("Nothing to submit", "error");
      return;
    }
    const fmt = formatForFile(file.files?.[0]?.name ?? "", content);
    submit.setAttribute("disabled", "true");
    status.textContent = "Extracting…";
    try {
      const { reportId } = await submitAndWait(api, content, fmt);
      location.hash = `#/report/${reportId}`;
    } catch (err) {
      status.textContent = "";
      toast(describeUploadError(err), "error");
    } finally {
      submit.removeAttribute("disabled");
    }
  });

  app.replaceChildren(nav(), el("h1", {}, "Submit a report"), text, file, submit, status);
}

// ------------------------------------------------------------- review

const queue = new ReviewQueue(api);

function reviewScreen(): void {
  const list = el("div", { class: "queue" });

  queue.onChange(() => renderQueue(list));
  void queue.refresh().then(() => renderQueue(list));

  app.replaceChildren(nav(), el("h1", {}, "Pending candidates"), list);
}

function renderQueue(list: HTMLElement): void {
  const { items, loading, error } = queue.state;
  list.replaceChildren();
  if (loading) {
    list.append(el("p", {}, "Loading…"));
    return;
  }
  if (error) {
    list.append(el("p", { class: "error" }, error));
    return;
  }
  const pending = items.filter((i) => i.phase !== "decided");
  if (pending.length === 0) {
    list.append(el("p", { class: "empty" }, "Queue is empty — nothing to review."));
    return;
  }
  for (const item of pending) {
    const c = item.candidate;
    const typeSelect = el("select", {});
    for (const t of ASSIGNABLE_TYPES) {
      const opt = el("option", { value: t }, t);
      if (t === c.proposed_type) opt.setAttribute("selected", "true");
      typeSelect.append(opt);
    }
    const accept = el("button", { class: "accept" }, "Accept");
    const reject = el("button", { class: "reject" }, "Reject");
    const busy = item.phase === "submitting" || item.phase === "decided";
    if (busy) {
      accept.setAttribute("disabled", "true");
      reject.setAttribute("disabled", "true");
    }
    accept.addEventListener("click", () => void queue.decide(c.id, "accept", typeSelect.value));
    reject.addEventListener("click", () => void queue.decide(c.id, "reject"));
    list.append(
      el(
        "div",
        { class: "card" },
        el("div", { class: "surface" }, c.surface, " ",
          el("span", { class: "badge", style: `background:${colorForType(c.proposed_type)}` }, c.proposed_type)),
        el("div", { class: "context" }, `…${c.context}…`),
        el("div", { class: "meta" }, `report ${c.report_id} · rule ${c.trigger}`),
        el("div", { class: "actions" }, typeSelect, accept, reject,
          el("span", { class: "msg" }, item.message ?? "")),
      ),
    );
  }
}

// ------------------------------------------------------------- graph

async function graphScreen(reportId: string): Promise<void> {
  let extraction: Extraction;
  try {
    extraction = await api.extraction(reportId);
  } catch (err) {
    app.replaceChildren(nav(), el("p", { class: "error" }, String(err)));
    return;
  }
  const view = buildGraphView(extraction);
  const width = 880;
  const height = 560;
  const positions = layoutGraph(view, { width, height });

  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "graph");

  for (const edge of view.edges) {
    const a = positions.get(edge.source)!;
    const b = positions.get(edge.target)!;
    const line = document.createElementNS(svgNS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("class", "edge");
    const title = document.createElementNS(svgNS, "title");
    title.textContent = edge.tooltip;
    line.append(title);
    svg.append(line);
    const label = document.createElementNS(svgNS, "text");
    label.setAttribute("x", String((a.x + b.x) / 2));
    label.setAttribute("y", String((a.y + b.y) / 2 - 4));
    label.setAttribute("class", "edge-label");
    label.textContent = `${edge.relationshipType} ${formatConfidence(edge.confidence)}`;
    svg.append(label);
  }
  const detail = el("div", { class: "detail" });
  for (const node of view.nodes) {
    const p = positions.get(node.id)!;
    const g = document.createElementNS(svgNS, "g");
    const circle = document.createElementNS(svgNS, "circle");
    circle.setAttribute("cx", String(p.x));
    circle.setAttribute("cy", String(p.y));
    circle.setAttribute("r", "16");
    circle.setAttribute("fill", colorForType(node.stixType));
    const title = document.createElementNS(svgNS, "title");
    title.textContent = `${node.stixType} (${node.provenance})`;
    circle.append(title);
    const label = document.createElementNS(svgNS, "text");
    label.setAttribute("x", String(p.x));
    label.setAttribute("y", String(p.y - 20));
    label.setAttribute("class", "node-label");
    label.textContent = node.label;
    g.append(circle, label);
    if (node.kbId) {
      g.addEventListener("click", () => void showKbDetail(detail, node.label));
      g.setAttribute("class", "kb-node");
    }
    svg.append(g);
  }

  app.replaceChildren(
    nav(),
    el("h1", {}, `Report ${reportId}`),
    el("p", { class: "meta" },
      `${view.nodes.length} entities, ${view.edges.length} relations · KB v${extraction.kb_version}`),
    svg as unknown as Node,
    detail,
  );
}

async function showKbDetail(target: HTMLElement, name: string): Promise<void> {
  const page = await api.kbEntities({ q: name, page_size: 5 });
  const hit: KbEntity | undefined = page.entities.find(
    (e) => e.name.toLowerCase() === name.toLowerCase() ||
      e.aliases.some((a) => a.toLowerCase() === name.toLowerCase()),
  ) ?? page.entities[0];
  if (!hit) {
    target.replaceChildren(el("p", {}, `No KB entry for ${name}`));
    return;
  }
  target.replaceChildren(
    el("h2", {}, hit.name),
    el("p", {}, `type: ${hit.stix_type} · source: ${hit.source}`),
    el("p", {}, hit.aliases.length ? `aliases: ${hit.aliases.join(", ")}` : "no aliases"),
  );
}

// ------------------------------------------------------------- router

function route(): void {
  const hash = location.hash || "#/upload";
  const graphMatch = hash.match(/^#\/report\/(.+)$/);
  if (graphMatch) {
    void graphScreen(graphMatch[1]);
  } else if (hash.startsWith("#/review")) {
    reviewScreen();
  } else {
    uploadScreen();
  }
}

window.addEventListener("hashchange", route);
route();
