// DTOs mirroring the extraction service's JSON API.

export type StixType = string;

export interface Mention {
  surface: string;
  span: [number, number] | null;
  stix_type: StixType;
  provenance: "ioc" | "kb" | "novel" | "ttp";
  confidence: number;
  kb_id: string | null;
}

export interface Relation {
  source: string;
  source_type: StixType;
  target: string;
  target_type: StixType;
  relationship_type: string;
  confidence: number;
  method: "rule" | "embedding";
}

export interface Extraction {
  report_id: string;
  kb_version: number;
  mentions: Mention[];
  relations: Relation[];
  candidates: CandidateRef[];
}

export interface CandidateRef {
  id: string;
  surface: string;
  proposed_type: StixType;
  span: [number, number];
  trigger: string;
  status: string;
}

export interface Candidate extends CandidateRef {
  report_id: string;
  context: string;
}

export interface KbEntity {
  id: string;
  stix_type: StixType;
  name: string;
  aliases: string[];
  source: string;
}

export interface KbPage {
  total: number;
  page: number;
  page_size: number;
  entities: KbEntity[];
}

export interface DecisionResponse {
  candidate_id: string;
  decision: "accept" | "reject";
  entity: { id: string; stix_type: StixType; name: string } | null;
}

export interface ApiError {
  error: string;
  detail: string;
}
