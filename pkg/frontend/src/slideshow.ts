/**
 * Interactive slideshow: keyframes become slides; hovering reveals the
 * description; clicking animates the viewer toward the slide's view.
 */

import type { StudioApi } from "./api.js";
import type { DatasetManifest, TourDoc, ViewState } from "./codec.js";
import { keyframeView } from "./model.js";

export class SlideshowPanel {
  onFly: (target: ViewState) => void = () => {};

  constructor(
    private readonly root: HTMLElement,
    private readonly api: StudioApi,
    private manifest: DatasetManifest,
  ) {}

  setManifest(manifest: DatasetManifest): void {
    this.manifest = manifest;
  }

  setTour(doc: TourDoc): void {
    this.root.innerHTML = "";
    const list = document.createElement("div");
    list.className = "slides";
    doc.keyframes.forEach((kf, index) => {
      const slide = document.createElement("div");
      slide.className = "slide";

      const image = document.createElement("img");
      const frame = Math.min(
        Math.max(Math.round(kf.frame), 0),
        this.manifest.frame_count - 1,
      );
      image.src = this.api.tileUrl(this.manifest.name, frame, 0, 0, 0);
      image.alt = kf.desc || `slide ${index}`;
      slide.appendChild(image);

      const message = document.createElement("div");
      message.className = "slide-message";
      message.textContent = kf.desc;
      slide.appendChild(message);

      slide.addEventListener("mouseenter", () => message.classList.add("visible"));
      slide.addEventListener("mouseleave", () => message.classList.remove("visible"));
      slide.addEventListener("click", () => this.onFly(keyframeView(kf)));
      list.appendChild(slide);
    });
    this.root.appendChild(list);
  }

  setVisible(visible: boolean): void {
    this.root.style.display = visible ? "block" : "none";
  }
}
