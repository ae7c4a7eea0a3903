/**
 * Practitioner dashboard: queue progress, accrued costs per channel, and
 * the cost-quality point set with the efficient frontier highlighted.
 *
 * Every displayed number comes verbatim from /ledger and /pareto; the view
 * only formats. On a fetch failure it keeps the last snapshot and shows a
 * staleness badge.
 */

import { ApiClient, Ledger, ParetoAnalysis, ParetoPoint } from "./api.js";

const PLOT_WIDTH = 520;
const PLOT_HEIGHT = 300;
const MARGIN = 36;

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

/** Raw value for exact display; null renders as an em dash. */
function show(value: number | null): string {
  return value === null ? "—" : String(value);
}

export class DashboardView {
  ledger: Ledger | null = null;
  pareto: ParetoAnalysis | null = null;
  stale = false;

  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    public client: ApiClient,  // swappable so a reconfigured URL takes effect
    private readonly refreshMs = 3000,
  ) {}

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.refreshMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async refresh(): Promise<void> {
    try {
      this.ledger = await this.client.ledger();
      this.pareto = await this.client.pareto();
      this.stale = false;
    } catch {
      this.stale = true; // keep the last snapshot
    }
    this.render();
  }

  private render(): void {
    this.root.replaceChildren();
    if (this.stale) {
      this.root.append(el("span", "stale-badge", "stale: showing last known snapshot"));
    }
    if (!this.ledger) {
      this.root.append(el("p", "empty-state", "No ledger yet."));
      return;
    }
    this.renderLedger(this.ledger);
    this.renderPareto(this.pareto);
  }

  private renderLedger(ledger: Ledger): void {
    const cards = el("div", "ledger-cards");
    const entries: Array<[string, string, string]> = [
      ["pending", String(ledger.pending), "stat-pending"],
      ["claimed", String(ledger.claimed), "stat-claimed"],
      ["labeled", String(ledger.labeled), "stat-labeled"],
      ["total", String(ledger.total), "stat-total"],
      ["human cost", show(ledger.human_cost_accrued), "stat-human-cost"],
      ["LLM cost", show(ledger.llm_cost_accrued), "stat-llm-cost"],
      ["alignment", show(ledger.alignment), "stat-alignment"],
    ];
    for (const [name, value, cls] of entries) {
      const card = el("div", `ledger-card ${cls}`);
      card.append(el("dt", "stat-name", name), el("dd", "stat-value", value));
      cards.append(card);
    }
    this.root.append(cards);

    const progress = el("div", "progress-bar");
    const fill = el("div", "progress-fill");
    const fraction = ledger.total > 0 ? ledger.labeled / ledger.total : 0;
    fill.style.width = `${(fraction * 100).toFixed(1)}%`;
    progress.append(fill);
    progress.setAttribute("aria-label", `${ledger.labeled}/${ledger.total} labeled`);
    this.root.append(progress);
  }

  private renderPareto(pareto: ParetoAnalysis | null): void {
    const section = el("div", "pareto-section");
    section.append(el("h3", undefined, "Cost vs quality"));
    if (!pareto || pareto.points.length === 0) {
      section.append(el("p", "empty-state", "No cost-quality analysis available."));
      this.root.append(section);
      return;
    }
    section.append(this.scatter(pareto));
    this.root.append(section);
  }

  private scatter(pareto: ParetoAnalysis): SVGSVGElement {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("viewBox", `0 0 ${PLOT_WIDTH} ${PLOT_HEIGHT}`);
    svg.setAttribute("class", "pareto-plot");

    const costs = pareto.points.map((p) => p.total_cost);
    const minCost = Math.min(...costs);
    const maxCost = Math.max(...costs);
    const span = maxCost - minCost || 1;
    const x = (cost: number) =>
      MARGIN + ((cost - minCost) / span) * (PLOT_WIDTH - 2 * MARGIN);
    const y = (quality: number) =>
      PLOT_HEIGHT - MARGIN - quality * (PLOT_HEIGHT - 2 * MARGIN);

    const frontier = [...pareto.frontier].sort((a, b) => a.total_cost - b.total_cost);
    if (frontier.length > 1) {
      const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
      line.setAttribute(
        "points",
        frontier.map((p) => `${x(p.total_cost)},${y(p.quality)}`).join(" "),
      );
      line.setAttribute("class", "frontier-line");
      line.setAttribute("fill", "none");
      svg.append(line);
    }

    for (const point of pareto.points) {
      svg.append(this.dot(point, x(point.total_cost), y(point.quality)));
    }
    return svg;
  }

  private dot(point: ParetoPoint, cx: number, cy: number): SVGCircleElement {
    const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", point.efficient ? "5" : "3.5");
    circle.setAttribute(
      "class",
      `point strategy-${point.strategy}${point.efficient ? " efficient" : ""}`,
    );
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent =
      `${point.strategy} @ ${point.llm_fraction}: cost ${point.total_cost}, ` +
      `quality ${point.quality}`;
    circle.append(title);
    return circle;
  }
}
