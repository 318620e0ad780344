// Submit a report and poll until extraction is ready.

import { ApiClient, ApiRequestError } from "./api";
import { sniffFormat } from "./format";
import type { Extraction } from "./types";

export interface UploadOutcome {
  reportId: string;
  extraction: Extraction;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function submitAndWait(
  api: ApiClient,
  content: string,
  format: "text" | "html",
  pollMs = 150,
  maxPolls = 100,
): Promise<UploadOutcome> {
  const { report_id } = await api.submitReport(content, format);
  for (let i = 0; i < maxPolls; i++) {
    try {
      const extraction = await api.extraction(report_id);
      return { reportId: report_id, extraction };
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 409) {
        await sleep(pollMs); // still queued
        continue;
      }
      throw err;
    }
  }
  throw new Error(`report ${report_id} did not finish in time`);
}

export function describeUploadError(err: unknown): string {
  if (err instanceof ApiRequestError) {
    if (err.status === 413) return "Report is too large for the server.";
    return `${err.errorBody.error}: ${err.errorBody.detail}`;
  }
  return String(err);
}

export function formatForFile(name: string, content: string): "text" | "html" {
  return sniffFormat(name, content);
}
