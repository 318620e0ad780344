// Review-queue state machine. Decisions apply optimistically and reconcile
// with the server response; a 409 means someone else decided first, so we
// re-fetch and surface the decided state. The UI layer just renders
// ReviewState and forwards analyst actions.

import { ApiClient, ApiRequestError } from "./api";
import type { Candidate } from "./types";

export type ItemPhase = "pending" | "submitting" | "decided" | "conflict";

export interface ReviewItem {
  candidate: Candidate;
  phase: ItemPhase;
  decision?: "accept" | "reject";
  message?: string;
}

export interface ReviewState {
  items: ReviewItem[];
  loading: boolean;
  error?: string;
}

export class ReviewQueue {
  state: ReviewState = { items: [], loading: false };
  private listeners: Array<(s: ReviewState) => void> = [];

  constructor(private api: ApiClient) {}

  onChange(fn: (s: ReviewState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  async refresh(): Promise<void> {
    this.state = { ...this.state, loading: true, error: undefined };
    this.emit();
    try {
      const candidates = await this.api.pendingCandidates();
      this.state = {
        loading: false,
        items: candidates.map((candidate) => ({ candidate, phase: "pending" as const })),
      };
    } catch (err) {
      this.state = { ...this.state, loading: false, error: String(err) };
    }
    this.emit();
  }

  item(candidateId: string): ReviewItem | undefined {
    return this.state.items.find((i) => i.candidate.id === candidateId);
  }

  /** Decide a candidate: the item flips to "decided" optimistically (which
   * also blocks any second decision), then reconciles with the server
   * response — rolled back to pending on transport errors, flipped to
   * "conflict" plus a queue refresh on 409 (someone else decided first). */
  async decide(
    candidateId: string,
    decision: "accept" | "reject",
    typeOverride?: string,
  ): Promise<ItemPhase> {
    const item = this.item(candidateId);
    if (!item || item.phase === "decided" || item.phase === "submitting") {
      return item?.phase ?? "decided";
    }
    item.phase = "decided"; // optimistic
    item.decision = decision;
    item.message = decision === "accept" ? "accepting…" : "rejecting…";
    this.emit();
    try {
      const res = await this.api.decide(candidateId, decision, typeOverride);
      item.message =
        decision === "accept" && res.entity
          ? `accepted as ${res.entity.stix_type} "${res.entity.name}"`
          : decision === "accept"
            ? "accepted"
            : "rejected (stoplisted)";
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 409) {
        item.phase = "conflict";
        item.message = "already decided elsewhere";
        await this.refresh();
        return "conflict";
      }
      item.phase = "pending";
      item.decision = undefined;
      item.message = String(err);
    }
    this.emit();
    return item.phase;
  }
}
