import type { StixType } from "./types";

// Two-decimal confidence for tooltips and badges: 1 -> "1.00", 0.5 -> "0.50".
export function formatConfidence(value: number): string {
  return value.toFixed(2);
}

const TYPE_COLORS: Record<string, string> = {
  "intrusion-set": "#c0392b",
  "threat-actor": "#e74c3c",
  malware: "#8e44ad",
  tool: "#2980b9",
  campaign: "#d35400",
  indicator: "#16a085",
  vulnerability: "#f39c12",
  location: "#27ae60",
  identity: "#7f8c8d",
  infrastructure: "#2c3e50",
  "attack-pattern": "#a04000",
  "x-mitre-tactic": "#6c3483",
  "course-of-action": "#117864",
};

export function colorForType(stixType: StixType): string {
  return TYPE_COLORS[stixType] ?? "#555b61";
}

// STIX types an analyst can assign when accepting a candidate.
export const ASSIGNABLE_TYPES = [
  "malware",
  "intrusion-set",
  "tool",
  "campaign",
  "threat-actor",
  "identity",
  "infrastructure",
  "location",
  "vulnerability",
  "attack-pattern",
];

export function sniffFormat(fileName: string, content: string): "text" | "html" {
  if (/\.(html?|xhtml)$/i.test(fileName)) return "html";
  if (/^\s*(<!doctype html|<html)/i.test(content)) return "html";
  return "text";
}
