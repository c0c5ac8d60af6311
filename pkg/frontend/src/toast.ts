// Alert toast rendering: one element per visible toast plus one summary
// element when older toasts have been collapsed.

import { UiState } from "./state.js";

export class ToastPane {
  constructor(private readonly root: HTMLElement, private readonly state: UiState) {
    state.subscribe(() => this.render());
  }

  render(): void {
    this.root.replaceChildren();
    if (this.state.collapsedToasts > 0) {
      const summary = document.createElement("div");
      summary.className = "toast toast-summary";
      summary.dataset.role = "toast-summary";
      summary.textContent = `${this.state.collapsedToasts} more alerts`;
      summary.addEventListener("click", () => this.state.clearCollapsedSummary());
      this.root.appendChild(summary);
    }
    for (const toast of this.state.toasts) {
      const el = document.createElement("div");
      el.className = "toast toast-alert";
      el.dataset.role = "toast";
      el.dataset.count = String(toast.count);
      el.textContent =
        `Fence crossing #${toast.count} (camera ${toast.camera_id}, t=${toast.t_ms} ms)`;
      const close = document.createElement("button");
      close.textContent = "x";
      close.addEventListener("click", () => this.state.dismissToast(toast.id));
      el.appendChild(close);
      this.root.appendChild(el);
    }
  }
}
