import { describe, expect, it } from "vitest";

import { buildGraphView, layoutGraph } from "../src/graph";
import { sampleExtraction } from "./helpers";

describe("buildGraphView", () => {
  it("renders the worked-example report as 3 nodes and a uses edge", () => {
    const view = buildGraphView(sampleExtraction());
    expect(view.nodes).toHaveLength(3);
    expect(view.edges).toHaveLength(1);
    const edge = view.edges[0];
    expect(edge.relationshipType).toBe("uses");
    expect(edge.tooltip).toBe("uses 1.00 (rule)");
  });

  it("tooltip shows two-decimal confidence for 0.5", () => {
    const extraction = sampleExtraction();
    extraction.relations[0].confidence = 0.5;
    const view = buildGraphView(extraction);
    expect(view.edges[0].tooltip).toContain("0.50");
  });

  it("edges reference present nodes", () => {
    const view = buildGraphView(sampleExtraction());
    const ids = new Set(view.nodes.map((n) => n.id));
    for (const e of view.edges) {
      expect(ids.has(e.source)).toBe(true);
      expect(ids.has(e.target)).toBe(true);
    }
  });

  it("deduplicates repeated mentions of one entity", () => {
    const extraction = sampleExtraction();
    extraction.mentions.push({ ...extraction.mentions[0], span: [60, 65] });
    const view = buildGraphView(extraction);
    expect(view.nodes).toHaveLength(3);
  });

  it("report with no relations renders nodes only", () => {
    const extraction = sampleExtraction();
    extraction.relations = [];
    const view = buildGraphView(extraction);
    expect(view.nodes).toHaveLength(3);
    expect(view.edges).toHaveLength(0);
  });

  it("keeps provenance and kb link on nodes", () => {
    const view = buildGraphView(sampleExtraction("kb"));
    const raindrop = view.nodes.find((n) => n.label === "Raindrop")!;
    expect(raindrop.provenance).toBe("kb");
    expect(raindrop.kbId).toBe("kb--raindrop");
  });
});

describe("layoutGraph", () => {
  const opts = { width: 800, height: 600 };

  it("positions every node inside the viewport", () => {
    const view = buildGraphView(sampleExtraction());
    const positions = layoutGraph(view, opts);
    expect(positions.size).toBe(3);
    for (const p of positions.values()) {
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(800);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(600);
    }
  });

  it("is deterministic", () => {
    const view = buildGraphView(sampleExtraction());
    const a = layoutGraph(view, opts);
    const b = layoutGraph(view, opts);
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it("separates nodes", () => {
    const view = buildGraphView(sampleExtraction());
    const pos = [...layoutGraph(view, opts).values()];
    for (let i = 0; i < pos.length; i++) {
      for (let j = i + 1; j < pos.length; j++) {
        const d = Math.hypot(pos[i].x - pos[j].x, pos[i].y - pos[j].y);
        expect(d).toBeGreaterThan(20);
      }
    }
  });

  it("handles the empty graph", () => {
    expect(layoutGraph({ nodes: [], edges: [] }, opts).size).toBe(0);
  });
});
