// Shapes of the MailGuard HTTP/JSON API.

export type VerdictLabel = "phishing_suspected" | "safe";
export type Advisory = "delete" | "none";
export type EntryState = "unread" | "opened" | "deleted";
export type FindingKind =
  | "unmatching_url"
  | "invisible_link"
  | "ip_literal_host"
  | "long_hyperlink"
  | "hidden_by_css";

export interface LinkFeatures {
  visible_links: number;
  invisible_links: number;
  unmatching_urls: number;
}

export interface Finding {
  kind: FindingKind;
  href: string;
  anchor_text: string;
  detail: string;
  node_path: number[];
  part_index: number;
  affects_verdict: boolean;
}

export interface Report {
  message_label: string;
  verdict: VerdictLabel;
  advisory: Advisory;
  features: LinkFeatures;
  findings: Finding[];
  warnings: string[];
  engine_version: string;
  scanned_at: string;
}

export interface EntrySummary {
  id: string;
  subject: string;
  from_header: string;
  received_at: string;
  state: EntryState;
  verdict: VerdictLabel;
  advisory: Advisory;
}

export interface Entry extends EntrySummary {
  report: Report;
}

export interface Annotation {
  node_path: number[];
  kind: FindingKind;
  part_index: number;
}

export interface Rendering {
  html: string;
  annotations: Annotation[];
}

export interface OpenResult {
  entry: Entry;
  rendering: Rendering;
}

export interface DeleteAck {
  id: string;
  state: EntryState;
  acknowledged: boolean;
}

export interface InboxFilter {
  verdict?: VerdictLabel;
  state?: EntryState;
}

export interface InboxViewModel {
  entries: EntrySummary[];
  selectedId?: string;
  filter: InboxFilter;
}

export interface MessageViewModel {
  entry: Entry;
  rendering: Rendering;
  banner: "warning" | "safe";
}
