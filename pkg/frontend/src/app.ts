// Controller: hash routing plus the warn-then-decide flow. All state is
// a projection of API responses; every mutation waits for the server and
// then refetches. The phishing warning modal runs off the verdict check
// in openFlow, so deep links cannot skip it.

import * as api from "./api.js";
import type { Entry, Finding, InboxFilter } from "./types.js";
import {
  renderError,
  renderInbox,
  renderInspection,
  renderMessage,
  renderNotice,
  renderWarningModal,
} from "./views.js";

export class App {
  private filter: InboxFilter = {};

  constructor(private root: HTMLElement) {}

  start(): void {
    window.addEventListener("hashchange", () => void this.route());
    void this.route();
  }

  async route(): Promise<void> {
    const match = window.location.hash.match(/^#\/message\/([0-9a-f]+)$/);
    if (match && match[1]) {
      await this.openFlow(match[1]);
    } else {
      await this.showInbox();
    }
  }

  private show(view: HTMLElement): void {
    this.root.replaceChildren(view);
  }

  async showInbox(): Promise<void> {
    let entries;
    try {
      entries = await api.fetchMessages(this.filter);
    } catch (error) {
      this.show(renderError(String(error), () => void this.showInbox()));
      return;
    }
    this.show(
      renderInbox(
        { entries, filter: this.filter },
        {
          onSelect: (id) => {
            window.location.hash = `#/message/${id}`;
          },
          onFilterChange: (filter) => {
            this.filter = filter;
            void this.showInbox();
          },
        },
      ),
    );
  }

  /**
   * Verdict first, content later: a flagged entry gets the warning modal
   * before any message content is requested or rendered.
   */
  async openFlow(id: string): Promise<void> {
    let entry: Entry;
    try {
      entry = await api.fetchMessage(id);
    } catch (error) {
      this.show(renderError(String(error), () => void this.openFlow(id)));
      return;
    }
    if (entry.state === "deleted") {
      this.backToInboxWithNotice("That message was deleted.");
      return;
    }
    if (entry.verdict === "phishing_suspected") {
      this.show(
        renderWarningModal(entry, {
          onDelete: () => void this.deleteAndReturn(id),
          onOpenAnyway: () => void this.openAndRender(id, "warning"),
        }),
      );
      return;
    }
    await this.openAndRender(id, "safe");
  }

  private async openAndRender(id: string, banner: "warning" | "safe"): Promise<void> {
    let result;
    try {
      result = await api.openMessage(id);
    } catch (error) {
      if (api.isGone(error)) {
        this.backToInboxWithNotice("That message was deleted.");
        return;
      }
      this.show(renderError(String(error), () => void this.openAndRender(id, banner)));
      return;
    }
    const view = renderMessage(
      { entry: result.entry, rendering: result.rendering, banner },
      {
        onBack: () => this.backToInbox(),
        onDelete: () => void this.deleteAndReturn(id),
        onInspect: (anchor) => this.inspect(result.entry, anchor),
      },
    );
    this.show(view);
  }

  private inspect(entry: Entry, anchor: HTMLElement): void {
    const host = this.root.querySelector(".inspect-host");
    if (!host) {
      return;
    }
    const path = anchor.dataset.mgPath ?? "";
    const matched: Finding[] = entry.report.findings.filter(
      (finding) => finding.node_path.join(".") === path,
    );
    host.replaceChildren(renderInspection(anchor, matched));
  }

  private async deleteAndReturn(id: string): Promise<void> {
    try {
      await api.deleteMessage(id);
    } catch (error) {
      this.show(renderError(String(error), () => void this.deleteAndReturn(id)));
      return;
    }
    this.backToInbox();
  }

  private backToInbox(): void {
    if (window.location.hash !== "" && window.location.hash !== "#/") {
      window.location.hash = "#/";
    } else {
      void this.showInbox();
    }
  }

  private backToInboxWithNotice(message: string): void {
    this.show(renderNotice(message, () => this.backToInbox()));
  }
}

export function mount(root: HTMLElement): App {
  const app = new App(root);
  app.start();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
