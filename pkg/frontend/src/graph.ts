// Extraction result -> graph view model -> force-directed layout.
// Everything here is pure so it can be unit-tested without a DOM; rendering
// into SVG happens in main.ts.

import { formatConfidence } from "./format";
import type { Extraction } from "./types";

export interface GraphNode {
  id: string;
  label: string;
  stixType: string;
  provenance: string;
  kbId: string | null;
}

export interface GraphEdge {
  source: string;
  target: string;
  relationshipType: string;
  confidence: number;
  method: string;
  tooltip: string;
}

export interface GraphView {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

function nodeKey(m: { surface: string; stix_type: string; kb_id?: string | null }): string {
  return m.kb_id ? `kb:${m.kb_id}` : `sf:${m.surface.toLowerCase()}|${m.stix_type}`;
}

export function buildGraphView(extraction: Extraction): GraphView {
  const nodes = new Map<string, GraphNode>();
  for (const m of extraction.mentions) {
    const key = nodeKey(m);
    if (!nodes.has(key)) {
      nodes.set(key, {
        id: key,
        label: m.surface,
        stixType: m.stix_type,
        provenance: m.provenance,
        kbId: m.kb_id ?? null,
      });
    }
  }
  const edges: GraphEdge[] = [];
  for (const r of extraction.relations) {
    const sourceKey = findNode(nodes, r.source, r.source_type);
    const targetKey = findNode(nodes, r.target, r.target_type);
    if (sourceKey === null || targetKey === null) continue;
    edges.push({
      source: sourceKey,
      target: targetKey,
      relationshipType: r.relationship_type,
      confidence: r.confidence,
      method: r.method,
      tooltip: `${r.relationship_type} ${formatConfidence(r.confidence)} (${r.method})`,
    });
  }
  return { nodes: [...nodes.values()], edges };
}

function findNode(nodes: Map<string, GraphNode>, surface: string, stixType: string): string | null {
  for (const [key, n] of nodes) {
    if (n.stixType === stixType && n.label.toLowerCase() === surface.toLowerCase()) {
      return key;
    }
  }
  return null;
}

// ------------------------------------------------------------- layout

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
}

// Small deterministic force simulation: spring forces along edges, pairwise
// repulsion, centering pull. Initial positions come from a fixed golden-angle
// circle so two runs produce identical layouts.
export function layoutGraph(view: GraphView, opts: LayoutOptions): Map<string, Point> {
  const { width, height } = opts;
  const iterations = opts.iterations ?? 150;
  const positions = new Map<string, Point>();
  const n = view.nodes.length;
  if (n === 0) return positions;

  const radius = Math.min(width, height) / 3;
  view.nodes.forEach((node, i) => {
    const angle = i * 2.399963229728653; // golden angle, deterministic spread
    const r = n === 1 ? 0 : radius * Math.sqrt((i + 1) / n);
    positions.set(node.id, {
      x: width / 2 + r * Math.cos(angle),
      y: height / 2 + r * Math.sin(angle),
    });
  });

  const k = Math.sqrt((width * height) / Math.max(1, n)); // ideal spacing
  for (let it = 0; it < iterations; it++) {
    const disp = new Map<string, Point>(view.nodes.map((nd) => [nd.id, { x: 0, y: 0 }]));
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const a = view.nodes[i].id;
        const b = view.nodes[j].id;
        const pa = positions.get(a)!;
        const pb = positions.get(b)!;
        let dx = pa.x - pb.x;
        let dy = pb.y === pa.y && pb.x === pa.x ? 0.01 : pa.y - pb.y;
        const dist = Math.max(0.01, Math.hypot(dx, dy));
        const force = (k * k) / dist / dist;
        dx = (dx / dist) * force * k * 0.05;
        dy = (dy / dist) * force * k * 0.05;
        disp.get(a)!.x += dx;
        disp.get(a)!.y += dy;
        disp.get(b)!.x -= dx;
        disp.get(b)!.y -= dy;
      }
    }
    for (const e of view.edges) {
      const ps = positions.get(e.source)!;
      const pt = positions.get(e.target)!;
      const dx = pt.x - ps.x;
      const dy = pt.y - ps.y;
      const dist = Math.max(0.01, Math.hypot(dx, dy));
      const pull = ((dist - k) / dist) * 0.08;
      disp.get(e.source)!.x += dx * pull;
      disp.get(e.source)!.y += dy * pull;
      disp.get(e.target)!.x -= dx * pull;
      disp.get(e.target)!.y -= dy * pull;
    }
    const cool = 1 - it / iterations;
    for (const node of view.nodes) {
      const p = positions.get(node.id)!;
      const d = disp.get(node.id)!;
      p.x += d.x * cool + (width / 2 - p.x) * 0.01;
      p.y += d.y * cool + (height / 2 - p.y) * 0.01;
      p.x = Math.min(width - 30, Math.max(30, p.x));
      p.y = Math.min(height - 24, Math.max(24, p.y));
    }
  }
  return positions;
}
