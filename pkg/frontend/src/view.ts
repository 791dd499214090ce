// DOM layer: renders tasks, wires the review gate to actual image load
// events, and maps buttons/keyboard onto the session.

import { AnnotationClient, Progress, StanceLabel, TaskView } from "./api.js";
import { AnnotatorSession } from "./session.js";

const LABEL_KEYS: Record<string, StanceLabel> = {
  "1": "against",
  "2": "favor",
  "3": "none",
};

export class AnnotatorView {
  private readonly taskPane: HTMLElement;
  private readonly statusPane: HTMLElement;
  private readonly progressPane: HTMLElement;
  private readonly buttons = new Map<StanceLabel, HTMLButtonElement>();
  private visionToggle: HTMLInputElement | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly session: AnnotatorSession,
    private readonly api: AnnotationClient,
    doc: Document = document,
  ) {
    this.taskPane = doc.createElement("main");
    this.taskPane.className = "task-pane";
    this.statusPane = doc.createElement("div");
    this.statusPane.className = "status-pane";
    this.progressPane = doc.createElement("aside");
    this.progressPane.className = "progress-pane";
    root.append(this.statusPane, this.taskPane, this.progressPane);
    doc.addEventListener("keydown", (event) => this.onKey(event));
  }

  // -- task rendering ------------------------------------------------

  renderTask(task: TaskView): void {
    const doc = this.taskPane.ownerDocument;
    this.taskPane.replaceChildren();
    this.statusPane.replaceChildren();

    const banner = doc.createElement("header");
    banner.className = "target-banner";
    banner.textContent =
      `Target: ${task.target} — judge ${lastAuthor(task)}'s stance ` +
      `(${task.round} pass)`;
    this.taskPane.append(banner);

    const conversation = doc.createElement("ol");
    conversation.className = "conversation";
    for (const line of task.lines) {
      const item = doc.createElement("li");
      const author = doc.createElement("strong");
      author.textContent = `${line.author}: `;
      item.append(author, doc.createTextNode(line.text));
      conversation.append(item);
    }
    this.taskPane.append(conversation);

    const gallery = doc.createElement("div");
    gallery.className = "gallery";
    this.taskPane.append(gallery);

    this.taskPane.append(this.buildControls(doc));
    this.setGate(false);

    // the path is in the document now; images gate separately below
    this.session.markPathRendered();

    let pending = task.image_refs.length;
    if (pending === 0) {
      this.session.markImagesLoaded();
    } else {
      const oneDone = () => {
        pending -= 1;
        if (pending === 0) this.session.markImagesLoaded();
      };
      task.image_refs.forEach((ref, index) => {
        const figure = doc.createElement("figure");
        const img = doc.createElement("img");
        img.src = this.api.imageUrl(ref);
        img.alt = task.captions[index] ?? ref;
        img.addEventListener("load", oneDone);
        img.addEventListener("error", oneDone); // a broken image must not wedge the queue
        const caption = doc.createElement("figcaption");
        caption.textContent = task.captions[index] ?? "";
        figure.append(img, caption);
        gallery.append(figure);
      });
    }
  }

  private buildControls(doc: Document): HTMLElement {
    const controls = doc.createElement("div");
    controls.className = "controls";
    this.buttons.clear();

    (["against", "favor", "none"] as StanceLabel[]).forEach((label, index) => {
      const button = doc.createElement("button");
      button.textContent = `${label} [${index + 1}]`;
      button.dataset.label = label;
      button.disabled = true;
      button.addEventListener("click", () => void this.session.submit(label));
      this.buttons.set(label, button);
      controls.append(button);
    });

    const visionWrap = doc.createElement("label");
    visionWrap.className = "vision-toggle";
    const checkbox = doc.createElement("input");
    checkbox.type = "checkbox";
    checkbox.disabled = true;
    checkbox.addEventListener("change", () => this.session.toggleVision());
    visionWrap.append(checkbox, doc.createTextNode(" related to the image [v]"));
    this.visionToggle = checkbox;
    controls.append(visionWrap);
    return controls;
  }

  setGate(open: boolean): void {
    for (const button of this.buttons.values()) button.disabled = !open;
    if (this.visionToggle) this.visionToggle.disabled = !open;
  }

  // -- auxiliary panes -----------------------------------------------

  renderEmpty(): void {
    this.taskPane.replaceChildren();
    this.statusPane.textContent = "Queue empty — nothing left to annotate.";
    this.statusPane.className = "status-pane empty";
  }

  renderError(message: string, retry: () => void): void {
    this.statusPane.replaceChildren();
    this.statusPane.className = "status-pane error";
    this.statusPane.append(
      this.statusPane.ownerDocument.createTextNode(`Service unavailable: ${message} `));
    const button = this.statusPane.ownerDocument.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    this.statusPane.append(button);
  }

  renderReloadPrompt(message: string): void {
    this.statusPane.className = "status-pane warning";
    this.statusPane.textContent = `${message} (press Reload in your browser)`;
  }

  renderProgress(progress: Progress | null, stale: boolean): void {
    this.progressPane.replaceChildren();
    const doc = this.progressPane.ownerDocument;
    const heading = doc.createElement("h3");
    heading.textContent = stale ? "Progress (stale)" : "Progress";
    if (stale) this.progressPane.classList.add("stale");
    else this.progressPane.classList.remove("stale");
    this.progressPane.append(heading);
    if (progress === null) return;
    const mine = progress.per_annotator[this.session.annotatorId] ?? 0;
    const rows: [string, string][] = [
      ["your labels", String(mine)],
      ["first / second / tiebreak",
       `${progress.records_per_round.first} / ${progress.records_per_round.second}` +
       ` / ${progress.records_per_round.tiebreak}`],
      ["resolved", String(progress.resolved)],
      ["awaiting tie-break", String(progress.awaiting_tiebreak)],
      ["unresolved", String(progress.unresolved.length)],
    ];
    const list = doc.createElement("dl");
    for (const [term, value] of rows) {
      const dt = doc.createElement("dt");
      dt.textContent = term;
      const dd = doc.createElement("dd");
      dd.textContent = value;
      list.append(dt, dd);
    }
    this.progressPane.append(list);
  }

  // -- keyboard ------------------------------------------------------

  private onKey(event: KeyboardEvent): void {
    const label = LABEL_KEYS[event.key];
    if (label !== undefined) {
      void this.session.submit(label);
      return;
    }
    if (event.key === "v" && this.visionToggle && !this.visionToggle.disabled) {
      this.visionToggle.checked = !this.visionToggle.checked;
      this.session.toggleVision();
    }
  }
}

function lastAuthor(task: TaskView): string {
  const last = task.lines[task.lines.length - 1];
  return last ? last.author : "?";
}
