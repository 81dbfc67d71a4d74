// Dashboard bootstrap: wires the threshold slider, queue row selection,
// scoring, and disposition form into the state container, and polls the
// queue on a fixed interval.

import { Dashboard } from "./state.js";
import { renderDetail, renderErrorBanner, renderQueue } from "./render.js";

const POLL_INTERVAL_MS = 10_000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export function bootstrap(): Dashboard {
  const dashboard = new Dashboard();
  const banner = el<HTMLDivElement>("banner");
  const queue = el<HTMLDivElement>("queue");
  const detail = el<HTMLDivElement>("detail");
  const slider = el<HTMLInputElement>("threshold");
  const sliderValue = el<HTMLSpanElement>("threshold-value");

  dashboard.subscribe((state) => {
    banner.innerHTML = renderErrorBanner(state);
    queue.innerHTML = renderQueue(state);
    detail.innerHTML = renderDetail(state);
    sliderValue.textContent = String(state.threshold);
    queue.classList.toggle("stale", state.stale);
  });

  slider.addEventListener("input", () => {
    void dashboard.setThreshold(Number(slider.value));
  });

  queue.addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest<HTMLElement>(".queue-row");
    if (row?.dataset.threadId) {
      void dashboard.select(row.dataset.threadId);
    }
  });

  detail.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.closest(".close-detail")) {
      dashboard.closeDetail();
      return;
    }
    if (target.closest(".score-button")) {
      const article = target.closest<HTMLElement>(".detail");
      const strategy =
        detail.querySelector<HTMLSelectElement>(".strategy-select")?.value ?? "ltm";
      if (article?.dataset.threadId) {
        void dashboard.score(article.dataset.threadId, strategy);
      }
    }
  });

  detail.addEventListener("submit", (event) => {
    const form = (event.target as HTMLElement).closest<HTMLFormElement>(
      ".disposition-form",
    );
    if (!form) {
      return;
    }
    event.preventDefault();
    const data = new FormData(form);
    const category = String(data.get("error_category") ?? "");
    if (form.dataset.threadId) {
      void dashboard.submitDisposition(form.dataset.threadId, {
        action_taken: String(data.get("action_taken") ?? ""),
        error_category: category === "" ? null : category,
        note: String(data.get("note") ?? ""),
        actor: "dashboard",
      });
    }
  });

  void dashboard.refreshQueue();
  setInterval(() => void dashboard.refreshQueue(), POLL_INTERVAL_MS);
  return dashboard;
}

if (typeof document !== "undefined" && document.getElementById("queue")) {
  bootstrap();
}
