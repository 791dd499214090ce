// Entry point: wire the api client, session and view together.

import { AnnotationApi } from "./api.js";
import { AnnotatorSession } from "./session.js";
import { AnnotatorView } from "./view.js";

function annotatorId(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("annotator");
  if (fromQuery) {
    localStorage.setItem("annotator_id", fromQuery);
    return fromQuery;
  }
  const stored = localStorage.getItem("annotator_id");
  if (stored) return stored;
  const entered = window.prompt("Annotator id:") || `anon-${Date.now()}`;
  localStorage.setItem("annotator_id", entered);
  return entered;
}

export function boot(root: HTMLElement): AnnotatorSession {
  const api = new AnnotationApi("");
  let view: AnnotatorView;
  const session = new AnnotatorSession(api, annotatorId(), {
    onTask: (task) => view.renderTask(task),
    onEmpty: () => view.renderEmpty(),
    onGateChange: (open) => view.setGate(open),
    onProgress: (progress, stale) => view.renderProgress(progress, stale),
    onError: (message) => view.renderError(message, () => void session.loadNext()),
    onReloadPrompt: (message) => view.renderReloadPrompt(message),
  });
  view = new AnnotatorView(root, session, api);
  void session.refreshProgress();
  void session.loadNext();
  return session;
}

const rootElement = document.getElementById("app");
if (rootElement) boot(rootElement);
