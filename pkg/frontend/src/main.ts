/**
 * Console entry point: a two-tab single-page app over the service API.
 *
 * Configuration is limited to the service base URL, task id, and annotator
 * id, read from query parameters (?service=...&task=...&annotator=...).
 */

import { ApiClient } from "./api.js";
import { DashboardView } from "./dashboard.js";
import { LabelingView } from "./labeling.js";

export interface ConsoleConfig {
  serviceUrl: string;
  taskId: string;
  annotatorId: string;
}

export function configFromLocation(search: string): ConsoleConfig {
  const params = new URLSearchParams(search);
  return {
    serviceUrl: params.get("service") ?? "http://127.0.0.1:8400",
    taskId: params.get("task") ?? "demo-pairs",
    annotatorId: params.get("annotator") ?? `annotator-${Math.random().toString(36).slice(2, 8)}`,
  };
}

export interface ConsoleApp {
  client: ApiClient;
  labeling: LabelingView;
  dashboard: DashboardView;
  showTab(tab: "label" | "dashboard"): void;
  stop(): void;
}

export function mountConsole(root: HTMLElement, config: ConsoleConfig): ConsoleApp {
  const client = new ApiClient(config.serviceUrl, config.taskId, config.annotatorId);

  root.replaceChildren();
  const nav = document.createElement("nav");
  nav.className = "tabs";
  const labelTab = document.createElement("button");
  labelTab.textContent = "Label";
  labelTab.className = "tab tab-label";
  const dashboardTab = document.createElement("button");
  dashboardTab.textContent = "Dashboard";
  dashboardTab.className = "tab tab-dashboard";
  nav.append(labelTab, dashboardTab);

  const labelRoot = document.createElement("main");
  labelRoot.className = "view labeling-view";
  const dashboardRoot = document.createElement("main");
  dashboardRoot.className = "view dashboard-view";
  dashboardRoot.hidden = true;
  root.append(nav, labelRoot, dashboardRoot);

  const labeling = new LabelingView(labelRoot, client);
  const dashboard = new DashboardView(dashboardRoot, client);

  function showTab(tab: "label" | "dashboard"): void {
    labelRoot.hidden = tab !== "label";
    dashboardRoot.hidden = tab !== "dashboard";
    labelTab.classList.toggle("active", tab === "label");
    dashboardTab.classList.toggle("active", tab === "dashboard");
  }

  labelTab.addEventListener("click", () => showTab("label"));
  dashboardTab.addEventListener("click", () => showTab("dashboard"));
  showTab("label");

  return {
    client,
    labeling,
    dashboard,
    showTab,
    stop() {
      labeling.stop();
      dashboard.stop();
    },
  };
}

// Browser bootstrap; tests mount the console themselves.
declare global {
  interface Window {
    annosplitConsole?: ConsoleApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const config = configFromLocation(window.location.search);
  const app = mountConsole(document.getElementById("app")!, config);
  void app.labeling.start();
  app.dashboard.start();
  window.annosplitConsole = app;
}
