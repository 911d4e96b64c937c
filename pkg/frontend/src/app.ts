/**
 * Interactive shell: composer form, pipeline/compare/language toggles, and
 * the submit flow. One query in flight at a time — the send button disables
 * until the response lands or the user cancels. All rendering goes through
 * the pure builders in render.ts over the current AppState.
 */

import { ApiError, NetworkError, submitQuery, type FetchLike } from "./api.js";
import { stringsFor, type Strings, type UiLanguage } from "./i18n.js";
import { renderThread } from "./render.js";
import {
  cancelQuery,
  failQuery,
  initialState,
  resolveQuery,
  startQuery,
  type AppState,
} from "./state.js";
import type { ChatTurn, Pipeline, QueryResponse } from "./types.js";

export interface AppConfig {
  baseUrl: string;
  corpus: string;
  language?: UiLanguage;
  fetchImpl?: FetchLike;
  now?: () => number;
}

export class ChatApp {
  private state: AppState = initialState();
  private language: UiLanguage;
  private abort: AbortController | null = null;
  private readonly now: () => number;

  private threadHost!: HTMLElement;
  private form!: HTMLFormElement;
  private questionInput!: HTMLTextAreaElement;
  private pipelineSelect!: HTMLSelectElement;
  private compareToggle!: HTMLInputElement;
  private languageSelect!: HTMLSelectElement;
  private corpusInput!: HTMLInputElement;
  private sendButton!: HTMLButtonElement;
  private cancelButton!: HTMLButtonElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: AppConfig,
  ) {
    this.language = config.language ?? "en";
    this.now = config.now ?? Date.now;
    this.buildChrome();
    this.redraw();
  }

  get strings(): Strings {
    return stringsFor(this.language);
  }

  private buildChrome(): void {
    this.root.innerHTML = "";
    const t = this.strings;

    const header = document.createElement("header");
    header.className = "app-header";
    const title = document.createElement("h1");
    title.textContent = t.appTitle;
    header.appendChild(title);

    this.languageSelect = document.createElement("select");
    this.languageSelect.className = "language-select";
    for (const code of ["en", "bn"] as const) {
      const option = document.createElement("option");
      option.value = code;
      option.textContent = code === "en" ? "English" : "বাংলা";
      option.selected = code === this.language;
      this.languageSelect.appendChild(option);
    }
    this.languageSelect.addEventListener("change", () => {
      this.language = this.languageSelect.value as UiLanguage;
      this.buildChrome();
      this.redraw();
    });
    header.appendChild(this.languageSelect);
    this.root.appendChild(header);

    this.threadHost = document.createElement("main");
    this.threadHost.className = "thread-host";
    this.root.appendChild(this.threadHost);

    this.form = document.createElement("form");
    this.form.className = "composer";

    this.corpusInput = document.createElement("input");
    this.corpusInput.className = "corpus-input";
    this.corpusInput.value = this.config.corpus;
    this.corpusInput.title = t.corpusLabel;
    this.form.appendChild(this.corpusInput);

    this.questionInput = document.createElement("textarea");
    this.questionInput.className = "question-input";
    this.questionInput.placeholder = t.questionPlaceholder;
    this.questionInput.rows = 2;
    this.form.appendChild(this.questionInput);

    this.pipelineSelect = document.createElement("select");
    this.pipelineSelect.className = "pipeline-select";
    for (const [value, label] of [
      ["vanilla", t.pipelineVanilla],
      ["advanced", t.pipelineAdvanced],
    ] as const) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      option.selected = value === "advanced";
      this.pipelineSelect.appendChild(option);
    }
    this.pipelineSelect.title = t.pipelineLabel;
    this.form.appendChild(this.pipelineSelect);

    const compareWrap = document.createElement("label");
    compareWrap.className = "compare-toggle";
    this.compareToggle = document.createElement("input");
    this.compareToggle.type = "checkbox";
    compareWrap.appendChild(this.compareToggle);
    compareWrap.appendChild(document.createTextNode(t.compareLabel));
    this.form.appendChild(compareWrap);

    this.sendButton = document.createElement("button");
    this.sendButton.type = "submit";
    this.sendButton.className = "send-button";
    this.sendButton.textContent = t.send;
    this.form.appendChild(this.sendButton);

    this.cancelButton = document.createElement("button");
    this.cancelButton.type = "button";
    this.cancelButton.className = "cancel-button";
    this.cancelButton.textContent = t.cancel;
    this.cancelButton.hidden = true;
    this.cancelButton.addEventListener("click", () => this.cancelInFlight());
    this.form.appendChild(this.cancelButton);

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(
        this.questionInput.value.trim(),
        this.pipelineSelect.value as Pipeline,
        this.compareToggle.checked,
      );
    });
    this.root.appendChild(this.form);

    // Retry buttons inside error cards resubmit the recorded question.
    this.threadHost.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      if (target.classList.contains("retry-button")) {
        void this.submit(
          target.dataset.question ?? "",
          (target.dataset.pipeline as Pipeline) ?? "advanced",
          target.dataset.compare === "true",
        );
      }
    });
  }

  /** Re-render the thread from state; the input box is left untouched. */
  private redraw(): void {
    this.threadHost.innerHTML = "";
    this.threadHost.appendChild(renderThread(this.state, this.strings));
    const busy = this.state.inFlight !== null;
    this.sendButton.disabled = busy;
    this.questionInput.disabled = busy;
    this.cancelButton.hidden = !busy;
  }

  async submit(question: string, pipeline: Pipeline, compare: boolean): Promise<void> {
    if (!question || this.state.inFlight) return;
    this.state = startQuery(this.state, { question, pipeline, compare });
    this.abort = new AbortController();
    this.redraw();
    const options = { fetchImpl: this.config.fetchImpl, signal: this.abort.signal };
    try {
      let turn: ChatTurn;
      if (compare) {
        const [vanilla, advanced] = await Promise.all([
          submitQuery(this.config.baseUrl, this.corpusInput.value, question, "vanilla", options),
          submitQuery(this.config.baseUrl, this.corpusInput.value, question, "advanced", options),
        ]);
        turn = { kind: "compare", question, vanilla, advanced, timestamp: this.now() };
      } else {
        const response: QueryResponse = await submitQuery(
          this.config.baseUrl,
          this.corpusInput.value,
          question,
          pipeline,
          options,
        );
        turn = { kind: "single", question, pipeline, response, timestamp: this.now() };
      }
      this.state = resolveQuery(this.state, turn);
      this.questionInput.value = "";
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        this.state = cancelQuery(this.state);
      } else {
        const t = this.strings;
        const retryable = err instanceof NetworkError;
        const message =
          err instanceof ApiError
            ? err.message
            : err instanceof NetworkError
              ? t.networkError
              : String(err);
        // the question survives in the input box so the user can edit it
        this.state = failQuery(this.state, {
          kind: "error",
          question,
          pipeline,
          compare,
          message,
          retryable,
          timestamp: this.now(),
        });
      }
    } finally {
      this.abort = null;
      this.redraw();
    }
  }

  cancelInFlight(): void {
    this.abort?.abort();
  }

  /** Snapshot hook for tests: current thread DOM as HTML. */
  threadHtml(): string {
    return this.threadHost.innerHTML;
  }
}

export function mount(root: HTMLElement, config: AppConfig): ChatApp {
  return new ChatApp(root, config);
}
