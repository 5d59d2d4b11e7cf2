// DOM builders. No framework: each view returns a root element and the
// controller wires the callbacks it passes in. Message HTML arrives
// pre-sanitized from the service; the viewer never adds a way for it to
// reach the network (anchors carry no href, clicks are swallowed).

import type {
  Entry,
  EntrySummary,
  Finding,
  InboxFilter,
  InboxViewModel,
  MessageViewModel,
} from "./types.js";

type Child = Node | string;

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElement {
  const element = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    element.setAttribute(name, value);
  }
  element.append(...children);
  return element;
}

function verdictBadge(entry: EntrySummary): HTMLElement {
  const flagged = entry.verdict === "phishing_suspected";
  return h(
    "span",
    { class: flagged ? "badge badge-phishing" : "badge badge-safe" },
    flagged ? "phishing suspected" : "safe",
  );
}

export interface InboxCallbacks {
  onSelect: (id: string) => void;
  onFilterChange: (filter: InboxFilter) => void;
}

export function renderInbox(view: InboxViewModel, callbacks: InboxCallbacks): HTMLElement {
  const filterSelect = h("select", { class: "verdict-filter", "aria-label": "verdict filter" });
  for (const [value, label] of [
    ["", "all messages"],
    ["phishing_suspected", "phishing suspected"],
    ["safe", "safe"],
  ] as const) {
    const option = h("option", { value }, label) as HTMLOptionElement;
    option.selected = (view.filter.verdict ?? "") === value;
    filterSelect.append(option);
  }
  filterSelect.addEventListener("change", () => {
    const value = (filterSelect as HTMLSelectElement).value;
    callbacks.onFilterChange(value === "" ? {} : { verdict: value as InboxFilter["verdict"] });
  });

  const list = h("ul", { class: "inbox-list" });
  for (const entry of view.entries) {
    const row = h(
      "li",
      {
        class: `inbox-row state-${entry.state}` +
          (entry.verdict === "phishing_suspected" ? " row-phishing" : "") +
          (entry.id === view.selectedId ? " selected" : ""),
        "data-id": entry.id,
        role: "button",
        tabindex: "0",
      },
      verdictBadge(entry),
      h("span", { class: "row-subject" }, entry.subject || "(no subject)"),
      h("span", { class: "row-from" }, entry.from_header),
      h("span", { class: "row-date" }, new Date(entry.received_at).toLocaleString()),
    );
    row.addEventListener("click", () => callbacks.onSelect(entry.id));
    list.append(row);
  }

  const body =
    view.entries.length > 0
      ? list
      : h("p", { class: "empty-state" }, "No messages here yet.");

  return h(
    "div",
    { class: "inbox" },
    h("header", { class: "inbox-header" }, h("h1", {}, "MailGuard inbox"), filterSelect),
    body,
  );
}

export interface ModalCallbacks {
  onDelete: () => void;
  onOpenAnyway: () => void;
}

export function renderWarningModal(entry: EntrySummary, callbacks: ModalCallbacks): HTMLElement {
  const deleteButton = h("button", { class: "modal-delete" }, "Delete");
  deleteButton.addEventListener("click", callbacks.onDelete);
  const openButton = h("button", { class: "modal-open-anyway" }, "Open anyway");
  openButton.addEventListener("click", callbacks.onOpenAnyway);
  return h(
    "div",
    { class: "modal-backdrop", role: "dialog", "aria-modal": "true" },
    h(
      "div",
      { class: "modal warning-modal" },
      h("h2", {}, "This could be a phishing attack"),
      h(
        "p",
        {},
        `"${entry.subject || "(no subject)"}" contains hidden or deceptive links. ` +
          "Deleting it is recommended.",
      ),
      h("div", { class: "modal-actions" }, deleteButton, openButton),
    ),
  );
}

function inspectionRow(label: string, value: Child): HTMLElement {
  return h("div", { class: "inspect-row" }, h("b", {}, label + ": "), value);
}

function swatch(color: string): HTMLElement {
  const box = h("span", { class: "swatch", title: color });
  box.style.backgroundColor = color;
  return box;
}

export function renderInspection(
  anchor: HTMLElement,
  findings: Finding[],
): HTMLElement {
  const panel = h("div", { class: "inspect-panel" });
  panel.append(inspectionRow("visible text", anchor.textContent ?? ""));
  panel.append(inspectionRow("goes to", h("code", {}, anchor.dataset.mgHref ?? "")));
  if (findings.length === 0) {
    panel.append(h("div", { class: "inspect-ok" }, "No findings for this link."));
    return panel;
  }
  for (const finding of findings) {
    const block = h("div", {
      class: finding.affects_verdict ? "inspect-finding inspect-warn" : "inspect-finding",
    });
    block.append(h("b", {}, finding.kind.replaceAll("_", " ")));
    if (finding.kind === "unmatching_url") {
      block.append(
        h(
          "div",
          { class: "inspect-compare" },
          h("code", {}, finding.anchor_text),
          " shown, but goes to ",
          h("code", {}, finding.href),
        ),
      );
    } else if (finding.kind === "invisible_link") {
      const difference = finding.detail.match(/color difference (\d+)/)?.[1];
      const colors = finding.detail.match(/text (#[0-9a-f]{6}) on (#[0-9a-f]{6})/);
      const line = h("div", { class: "inspect-colors" });
      if (colors) {
        line.append("text ", swatch(colors[1]!), " on ", swatch(colors[2]!), " ");
      }
      if (difference) {
        line.append(`(difference ${difference})`);
      }
      block.append(line);
    }
    block.append(h("div", { class: "inspect-detail" }, finding.detail));
    panel.append(block);
  }
  return panel;
}

export interface MessageCallbacks {
  onBack: () => void;
  onDelete: () => void;
  onInspect: (anchor: HTMLElement) => void;
}

export function renderMessage(view: MessageViewModel, callbacks: MessageCallbacks): HTMLElement {
  const backButton = h("button", { class: "back-button" }, "← inbox");
  backButton.addEventListener("click", callbacks.onBack);
  const deleteButton = h("button", { class: "delete-button" }, "Delete");
  deleteButton.addEventListener("click", callbacks.onDelete);

  const banner =
    view.banner === "warning"
      ? h(
          "div",
          { class: "banner banner-warning", role: "alert" },
          "Suspected phishing: deceptive links are highlighted below. Deleting this message is advised.",
        )
      : h("div", { class: "banner banner-safe" }, "This message is marked as safe.");

  const content = h("div", { class: "message-content" });
  content.innerHTML = view.rendering.html;
  // Message anchors have no href (sanitized away); swallow clicks anyway
  // and turn them into inspection instead of navigation.
  content.addEventListener("click", (event) => {
    const anchor = (event.target as HTMLElement).closest("a");
    if (anchor) {
      event.preventDefault();
      callbacks.onInspect(anchor as HTMLElement);
    }
  });
  content.addEventListener("mouseover", (event) => {
    const anchor = (event.target as HTMLElement).closest("a.mg-link");
    if (anchor) {
      callbacks.onInspect(anchor as HTMLElement);
    }
  });

  return h(
    "div",
    { class: "message-view" },
    h(
      "header",
      { class: "message-header" },
      backButton,
      h("h2", {}, view.entry.subject || "(no subject)"),
      h("div", { class: "message-from" }, view.entry.from_header),
      deleteButton,
    ),
    banner,
    content,
    h("aside", { class: "inspect-host" }),
  );
}

export function renderNotice(message: string, onBack: () => void): HTMLElement {
  const button = h("button", { class: "back-button" }, "Back to inbox");
  button.addEventListener("click", onBack);
  return h("div", { class: "notice" }, h("p", {}, message), button);
}

export function renderError(message: string, onRetry: () => void): HTMLElement {
  const retry = h("button", { class: "retry-button" }, "Retry");
  retry.addEventListener("click", onRetry);
  return h(
    "div",
    { class: "error-state", role: "alert" },
    h("p", {}, `Something went wrong: ${message}`),
    retry,
  );
}
