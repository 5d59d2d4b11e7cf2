// Fixtures shaped exactly like the service's JSON responses, plus a fake
// fetch that routes to them and records every call for assertions.

import type { Entry, Finding, Rendering } from "./types.js";

export const PHISH_ID = "aa11";
export const SAFE_ID = "bb22";

const phishFinding: Finding = {
  kind: "unmatching_url",
  href: "http://phish.example/login",
  anchor_text: "https://secure.bank.example/review",
  detail: "anchor text shows http://secure.bank.example but the link goes to http://phish.example",
  node_path: [0, 1, 0],
  part_index: 0,
  affects_verdict: true,
};

const invisibleFinding: Finding = {
  kind: "invisible_link",
  href: "http://sneaky.example/x",
  anchor_text: "claim now",
  detail: "color difference 0 is below 500 (text #ffffff on #ffffff)",
  node_path: [0, 2, 0],
  part_index: 0,
  affects_verdict: true,
};

export function phishEntry(): Entry {
  return {
    id: PHISH_ID,
    subject: "Unusual sign-in detected",
    from_header: "Bank Security <alerts@secure-alerts.example>",
    received_at: "2026-08-10T10:00:00Z",
    state: "unread",
    verdict: "phishing_suspected",
    advisory: "delete",
    report: {
      message_label: "phish.eml",
      verdict: "phishing_suspected",
      advisory: "delete",
      features: { visible_links: 2, invisible_links: 1, unmatching_urls: 1 },
      findings: [phishFinding, invisibleFinding],
      warnings: [],
      engine_version: "0.1.0",
      scanned_at: "2026-08-10T10:00:00.000000Z",
    },
  };
}

export function safeEntry(): Entry {
  return {
    id: SAFE_ID,
    subject: "This week in technology",
    from_header: "Weekly News <news@gazette.example>",
    received_at: "2026-08-09T08:00:00Z",
    state: "unread",
    verdict: "safe",
    advisory: "none",
    report: {
      message_label: "news.eml",
      verdict: "safe",
      advisory: "none",
      features: { visible_links: 1, invisible_links: 0, unmatching_urls: 0 },
      findings: [],
      warnings: [],
      engine_version: "0.1.0",
      scanned_at: "2026-08-09T08:00:00.000000Z",
    },
  };
}

export function phishRendering(): Rendering {
  return {
    html:
      '<div class="mg-part" data-mg-part="0"><p>We blocked a sign-in attempt.</p>' +
      '<p><span class="mg-warning" data-mg-warning="unmatching_url">' +
      '<a class="mg-link" data-mg-href="http://phish.example/login" data-mg-path="0.1.0"' +
      ' data-mg-findings="unmatching_url">https://secure.bank.example/review</a></span></p>' +
      '<p><span class="mg-warning" data-mg-warning="invisible_link">' +
      '<a class="mg-link" data-mg-href="http://sneaky.example/x" data-mg-path="0.2.0"' +
      ' data-mg-findings="invisible_link">claim now</a></span></p></div>',
    annotations: [
      { node_path: [0, 1, 0], kind: "unmatching_url", part_index: 0 },
      { node_path: [0, 2, 0], kind: "invisible_link", part_index: 0 },
    ],
  };
}

export function safeRendering(): Rendering {
  return {
    html:
      '<div class="mg-part" data-mg-part="0"><p>Our top stories:</p>' +
      '<a class="mg-link" data-mg-href="http://gazette.example/story/1" data-mg-path="0.1">' +
      "Chips are getting smaller</a></div>",
    annotations: [],
  };
}

export interface RecordedCall {
  method: string;
  url: string;
}

export interface FakeService {
  calls: RecordedCall[];
  callsTo: (method: string, pattern: RegExp) => RecordedCall[];
  failNextListing: () => void;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Install a fake MailGuard API behind global fetch. */
export function installFakeService(): FakeService {
  const entries = new Map<string, Entry>([
    [PHISH_ID, phishEntry()],
    [SAFE_ID, safeEntry()],
  ]);
  const renderings = new Map<string, Rendering>([
    [PHISH_ID, phishRendering()],
    [SAFE_ID, safeRendering()],
  ]);
  const calls: RecordedCall[] = [];
  let failListing = false;

  globalThis.fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({ method, url });

    const idMatch = url.match(/\/api\/messages\/([0-9a-z]+)(\/(open|sanitized|rescan))?$/);
    if (url.startsWith("/api/messages") && !idMatch && method === "GET") {
      if (failListing) {
        failListing = false;
        return jsonResponse({ detail: "backend unavailable" }, 503);
      }
      const params = new URL(url, "http://test").searchParams;
      const verdict = params.get("verdict");
      const state = params.get("state");
      const listed = [...entries.values()]
        .filter((e) => (state ? e.state === state : e.state !== "deleted"))
        .filter((e) => !verdict || e.verdict === verdict)
        .sort((a, b) => b.received_at.localeCompare(a.received_at))
        .map(({ report: _report, ...summary }) => summary);
      return jsonResponse(listed);
    }

    const entry = idMatch ? entries.get(idMatch[1]!) : undefined;
    if (idMatch && !entry) {
      return jsonResponse({ detail: "not found" }, 404);
    }
    if (idMatch && entry) {
      const action = idMatch[3];
      if (method === "DELETE") {
        entry.state = "deleted";
        return jsonResponse({ id: entry.id, state: "deleted", acknowledged: true });
      }
      if (action === "open" && method === "POST") {
        if (entry.state === "deleted") {
          return jsonResponse({ detail: "message was deleted" }, 410);
        }
        if (entry.state === "unread") {
          entry.state = "opened";
        }
        return jsonResponse({ entry, rendering: renderings.get(entry.id) });
      }
      if (!action && method === "GET") {
        return jsonResponse(entry);
      }
    }
    return jsonResponse({ detail: `unhandled ${method} ${url}` }, 500);
  };

  return {
    calls,
    callsTo: (method, pattern) =>
      calls.filter((call) => call.method === method && pattern.test(call.url)),
    failNextListing: () => {
      failListing = true;
    },
  };
}
