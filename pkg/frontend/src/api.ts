// Thin typed client for the MailGuard API. Every mutation returns the
// server's answer; callers refetch rather than patching local state.

import type { DeleteAck, Entry, EntrySummary, InboxFilter, OpenResult, Rendering } from "./types.js";

async function expectOk(res: Response): Promise<Response> {
  if (!res.ok) {
    const detail = await res
      .json()
      .then((body) => body.detail ?? res.statusText)
      .catch(() => res.statusText);
    const error = new Error(`${res.status}: ${detail}`);
    (error as Error & { status?: number }).status = res.status;
    throw error;
  }
  return res;
}

export async function fetchMessages(filter: InboxFilter = {}): Promise<EntrySummary[]> {
  const params = new URLSearchParams();
  if (filter.verdict) params.set("verdict", filter.verdict);
  if (filter.state) params.set("state", filter.state);
  const query = params.toString();
  const res = await expectOk(await fetch(`/api/messages${query ? `?${query}` : ""}`));
  return res.json();
}

export async function fetchMessage(id: string): Promise<Entry> {
  const res = await expectOk(await fetch(`/api/messages/${id}`));
  return res.json();
}

export async function fetchSanitized(id: string): Promise<Rendering> {
  const res = await expectOk(await fetch(`/api/messages/${id}/sanitized`));
  return res.json();
}

export async function openMessage(id: string): Promise<OpenResult> {
  const res = await expectOk(await fetch(`/api/messages/${id}/open`, { method: "POST" }));
  return res.json();
}

export async function deleteMessage(id: string): Promise<DeleteAck> {
  const res = await expectOk(await fetch(`/api/messages/${id}`, { method: "DELETE" }));
  return res.json();
}

export function isGone(error: unknown): boolean {
  return error instanceof Error && (error as Error & { status?: number }).status === 410;
}
