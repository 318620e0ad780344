import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { ReviewQueue } from "../src/review";
import { FakeServer, SAMPLE_REPORT } from "./helpers";

function setup() {
  const server = new FakeServer();
  const api = new ApiClient("", server.fetch);
  return { server, api, queue: new ReviewQueue(api) };
}

describe("review queue", () => {
  it("lists pending candidates with context", async () => {
    const { queue } = setup();
    await queue.refresh();
    expect(queue.state.items).toHaveLength(1);
    expect(queue.state.items[0].candidate.surface).toBe("Raindrop");
    expect(queue.state.items[0].candidate.context).toContain("malware Raindrop");
  });

  it("empty queue state", async () => {
    const { server, queue } = setup();
    server.decided.set("cand--raindrop", "accept");
    await queue.refresh();
    expect(queue.state.items).toHaveLength(0);
  });

  it("accept marks the item decided with the created entity", async () => {
    const { queue } = setup();
    await queue.refresh();
    const phase = await queue.decide("cand--raindrop", "accept");
    expect(phase).toBe("decided");
    expect(queue.item("cand--raindrop")!.message).toContain('malware "Raindrop"');
  });

  it("accept supports a type override", async () => {
    const { server, queue } = setup();
    await queue.refresh();
    await queue.decide("cand--raindrop", "accept", "tool");
    expect(server.decided.get("cand--raindrop")).toBe("accept");
    const last = server.requests.filter((r) => r.method === "POST").pop()!;
    expect(last.url).toContain("cand--raindrop/decision");
  });

  it("updates optimistically before the server responds", async () => {
    const { queue } = setup();
    await queue.refresh();
    const inFlight = queue.decide("cand--raindrop", "accept");
    expect(queue.item("cand--raindrop")!.phase).toBe("decided"); // before await
    await inFlight;
    expect(queue.item("cand--raindrop")!.message).toContain("accepted");
  });

  it("rolls the item back to pending on a transport error", async () => {
    const server = new FakeServer();
    let fail = true;
    const api = new ApiClient("", async (url, init) => {
      if (fail && (init?.method ?? "GET") === "POST" && url.includes("/decision")) {
        throw new Error("network down");
      }
      return server.fetch(url, init);
    });
    const queue = new ReviewQueue(api);
    await queue.refresh();
    const phase = await queue.decide("cand--raindrop", "accept");
    expect(phase).toBe("pending");
    expect(queue.item("cand--raindrop")!.message).toContain("network down");
    fail = false;
    expect(await queue.decide("cand--raindrop", "accept")).toBe("decided");
  });

  it("decision is issued at most once per candidate", async () => {
    const { server, queue } = setup();
    await queue.refresh();
    await queue.decide("cand--raindrop", "accept");
    await queue.decide("cand--raindrop", "reject");
    const posts = server.requests.filter((r) => r.method === "POST");
    expect(posts).toHaveLength(1);
    expect(server.decided.get("cand--raindrop")).toBe("accept");
  });

  it("409 from a concurrent decision surfaces as conflict and refetches", async () => {
    const { server, queue } = setup();
    await queue.refresh();
    server.decided.set("cand--raindrop", "reject"); // someone else decided
    const phase = await queue.decide("cand--raindrop", "accept");
    expect(phase).toBe("conflict");
    expect(queue.state.items).toHaveLength(0); // refreshed; no longer pending
  });
});

describe("analyst loop over the API contract", () => {
  it("accepting a candidate flips the next extraction to kb provenance", async () => {
    const { api, queue } = setup();

    const first = await api.submitReport(SAMPLE_REPORT);
    const before = await api.extraction(first.report_id);
    const raindropBefore = before.mentions.find((m) => m.surface === "Raindrop")!;
    expect(raindropBefore.provenance).toBe("novel");

    await queue.refresh();
    await queue.decide("cand--raindrop", "accept");

    const second = await api.submitReport(SAMPLE_REPORT);
    const after = await api.extraction(second.report_id);
    const raindropAfter = after.mentions.find((m) => m.surface === "Raindrop")!;
    expect(raindropAfter.provenance).toBe("kb");
    expect(raindropAfter.confidence).toBe(1.0);
  });
});
