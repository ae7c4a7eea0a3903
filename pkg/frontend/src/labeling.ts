/**
 * Claim-and-label view.
 *
 * Flow: claim next item -> render fields in schema order -> label buttons
 * (keys 1..9 map to labels in label-set order) -> submit with the claim
 * token -> auto-advance. A countdown shows the remaining lease; an expired
 * or rejected claim surfaces a stale notice with a re-claim affordance,
 * and a drained queue shows the completion screen with the ledger summary.
 */

import {
  ApiClient,
  ClaimedItem,
  StaleClaimError,
  TaskInfo,
} from "./api.js";

export type LabelingPhase = "idle" | "item" | "stale" | "error" | "done";

export interface LabelingOptions {
  leaseSeconds?: number;
  /** Countdown tick in ms; tests shrink it. */
  tickMs?: number;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function isInputFocused(): boolean {
  const active = document.activeElement;
  if (!active) return false;
  const tag = active.tagName.toLowerCase();
  return tag === "input" || tag === "textarea" || tag === "select";
}

export class LabelingView {
  phase: LabelingPhase = "idle";
  current: ClaimedItem | null = null;
  labeledCount = 0;

  private task: TaskInfo | null = null;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;
  private keyHandler: ((ev: KeyboardEvent) => void) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly options: LabelingOptions = {},
  ) {}

  async start(): Promise<void> {
    this.task = await this.client.taskInfo();
    this.installShortcuts();
    await this.next();
  }

  stop(): void {
    this.clearCountdown();
    if (this.keyHandler) {
      document.removeEventListener("keydown", this.keyHandler);
      this.keyHandler = null;
    }
  }

  /** Claim and render the next item (or the completion screen). */
  async next(): Promise<void> {
    this.clearCountdown();
    try {
      this.current = await this.client.claimNext(this.options.leaseSeconds);
    } catch (err) {
      this.renderError(String(err));
      return;
    }
    if (this.current === null) {
      await this.renderDone();
      return;
    }
    this.renderItem(this.current);
  }

  /** Submit a label for the current claim; advances on success. */
  async submitLabel(label: string): Promise<void> {
    if (!this.current) return;
    const token = this.current.claim_token;
    try {
      await this.client.submit(token, label);
    } catch (err) {
      if (err instanceof StaleClaimError) {
        this.renderStale();
      } else {
        this.renderError(String(err));
      }
      return;
    }
    this.labeledCount += 1;
    await this.next();
  }

  // -- rendering -------------------------------------------------------------

  private renderItem(item: ClaimedItem): void {
    this.phase = "item";
    const task = this.task!;
    this.root.replaceChildren();

    const header = el("div", "item-header");
    header.append(
      el("span", "instance-id", item.instance_id),
      el("span", "lease-countdown", ""),
    );
    if (item.escalated) header.append(el("span", "escalated-badge", "escalated"));
    this.root.append(header);

    this.root.append(el("p", "instruction", task.instruction_text));

    const fields = el("dl", "fields");
    for (const slot of task.field_schema) {
      fields.append(el("dt", "slot-name", slot));
      fields.append(el("dd", "slot-value", item.fields[slot] ?? ""));
    }
    this.root.append(fields);

    const buttons = el("div", "label-buttons");
    task.label_set.forEach((label, index) => {
      const button = el("button", "label-button", label);
      button.dataset.label = label;
      if (index < 9) {
        button.append(el("kbd", "shortcut-hint", String(index + 1)));
      }
      button.addEventListener("click", () => void this.submitLabel(label));
      buttons.append(button);
    });
    this.root.append(buttons);

    this.startCountdown(item);
  }

  private renderStale(): void {
    this.phase = "stale";
    this.clearCountdown();
    this.root.replaceChildren();
    this.root.append(el("p", "stale-notice", "This claim expired before the label was saved."));
    const retry = el("button", "reclaim-button", "Claim next item");
    retry.addEventListener("click", () => void this.next());
    this.root.append(retry);
  }

  private renderError(message: string): void {
    this.phase = "error";
    this.clearCountdown();
    this.root.replaceChildren();
    this.root.append(el("p", "error-notice", `Service error: ${message}`));
    const retry = el("button", "retry-button", "Retry");
    retry.addEventListener("click", () => void this.next());
    this.root.append(retry);
  }

  private async renderDone(): Promise<void> {
    this.phase = "done";
    this.root.replaceChildren();
    this.root.append(el("h2", "done-title", "Queue drained"));
    try {
      const ledger = await this.client.ledger();
      const summary = el("dl", "done-summary");
      const rows: Array<[string, string]> = [
        ["labeled", String(ledger.labeled)],
        ["total", String(ledger.total)],
        ["human cost accrued", ledger.human_cost_accrued === null ? "—" : String(ledger.human_cost_accrued)],
      ];
      for (const [name, value] of rows) {
        summary.append(el("dt", undefined, name));
        summary.append(el("dd", undefined, value));
      }
      this.root.append(summary);
    } catch {
      this.root.append(el("p", "error-notice", "Ledger unavailable."));
    }
  }

  // -- lease countdown and shortcuts ------------------------------------------

  private startCountdown(item: ClaimedItem): void {
    // The service reports absolute expiry on its own clock; we only count
    // down the lease duration locally from claim time.
    const expiresAtMs = Date.now() + item.lease_seconds * 1000;
    const update = () => {
      const node = this.root.querySelector(".lease-countdown");
      if (!node) return;
      const left = Math.max(0, Math.round((expiresAtMs - Date.now()) / 1000));
      node.textContent = `lease ${left}s`;
      if (left === 0 && this.phase === "item") this.renderStale();
    };
    update();
    this.countdownTimer = setInterval(update, this.options.tickMs ?? 1000);
  }

  private clearCountdown(): void {
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
      this.countdownTimer = null;
    }
  }

  private installShortcuts(): void {
    this.keyHandler = (ev: KeyboardEvent) => {
      if (this.phase !== "item" || isInputFocused()) return;
      const index = "123456789".indexOf(ev.key);
      if (index === -1 || !this.task || index >= this.task.label_set.length) return;
      ev.preventDefault();
      void this.submitLabel(this.task.label_set[index]);
    };
    document.addEventListener("keydown", this.keyHandler);
  }
}
