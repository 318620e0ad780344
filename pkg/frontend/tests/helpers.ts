// Scripted in-memory stand-in for the extraction service, faithful to its
// JSON contract: candidates become KB entities on accept, after which the
// same text extracts with provenance "kb".

import type { FetchLike } from "../src/api";
import type { Candidate, Extraction } from "../src/types";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export const SAMPLE_REPORT = "APT29 used 7-Zip to decode the malware Raindrop.";

export function sampleExtraction(raindropProvenance: "novel" | "kb" = "novel"): Extraction {
  return {
    report_id: "r000001",
    kb_version: 1,
    mentions: [
      { surface: "APT29", span: [0, 5], stix_type: "intrusion-set", provenance: "kb", confidence: 1.0, kb_id: "kb--apt29" },
      { surface: "7-Zip", span: [11, 16], stix_type: "tool", provenance: "kb", confidence: 1.0, kb_id: "kb--7zip" },
      { surface: "Raindrop", span: [39, 47], stix_type: "malware", provenance: raindropProvenance, confidence: raindropProvenance === "kb" ? 1.0 : 0.8, kb_id: raindropProvenance === "kb" ? "kb--raindrop" : null },
    ],
    relations: [
      { source: "APT29", source_type: "intrusion-set", target: "7-Zip", target_type: "tool", relationship_type: "uses", confidence: 1.0, method: "rule" },
    ],
    candidates: [],
  };
}

export class FakeServer {
  decided = new Map<string, "accept" | "reject">();
  accepted = new Set<string>();
  reports = new Map<string, Extraction>();
  private counter = 0;
  requests: Array<{ method: string; url: string }> = [];

  candidates: Candidate[] = [
    {
      id: "cand--raindrop",
      surface: "Raindrop",
      proposed_type: "malware",
      report_id: "r000001",
      span: [39, 47],
      trigger: "type_noun_appos",
      status: "pending",
      context: "to decode the malware Raindrop.",
    },
  ];

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    this.requests.push({ method, url });

    if (method === "POST" && url.endsWith("/reports")) {
      const body = JSON.parse(String(init?.body ?? "{}"));
      if (!body.content || !body.content.trim()) {
        return jsonResponse({ error: "bad request", detail: "empty report body" }, 400);
      }
      if (body.content.length > 10000) {
        return jsonResponse({ error: "payload too large", detail: "limit" }, 413);
      }
      this.counter += 1;
      const id = `r${String(this.counter).padStart(6, "0")}`;
      const provenance = this.accepted.has("Raindrop") ? "kb" : "novel";
      this.reports.set(id, { ...sampleExtraction(provenance), report_id: id });
      return jsonResponse({ report_id: id, status: "done" }, 202);
    }

    const extraction = url.match(/\/reports\/([^/]+)\/extraction/);
    if (method === "GET" && extraction) {
      const report = this.reports.get(extraction[1]);
      if (!report) return jsonResponse({ error: "unknown report", detail: extraction[1] }, 404);
      return jsonResponse(report);
    }

    if (method === "GET" && url.includes("/candidates")) {
      const pending = this.candidates.filter((c) => !this.decided.has(c.id));
      return jsonResponse({ candidates: pending });
    }

    const decision = url.match(/\/candidates\/([^/]+)\/decision/);
    if (method === "POST" && decision) {
      const id = decision[1];
      const cand = this.candidates.find((c) => c.id === id);
      if (!cand) return jsonResponse({ error: "unknown candidate", detail: id }, 404);
      if (this.decided.has(id)) {
        return jsonResponse({ error: "already decided", detail: id }, 409);
      }
      const body = JSON.parse(String(init?.body ?? "{}"));
      this.decided.set(id, body.decision);
      if (body.decision === "accept") {
        this.accepted.add(cand.surface);
        return jsonResponse({
          candidate_id: id,
          decision: "accept",
          entity: { id: "kb--raindrop", stix_type: body.type ?? cand.proposed_type, name: cand.surface },
        });
      }
      return jsonResponse({ candidate_id: id, decision: "reject", entity: null });
    }

    if (method === "GET" && url.includes("/kb/entities")) {
      const entities = this.accepted.has("Raindrop")
        ? [{ id: "kb--raindrop", stix_type: "malware", name: "Raindrop", aliases: [], source: "novel-accepted" }]
        : [];
      return jsonResponse({ total: entities.length, page: 1, page_size: 50, entities });
    }

    return jsonResponse({ error: "not found", detail: url }, 404);
  };
}
