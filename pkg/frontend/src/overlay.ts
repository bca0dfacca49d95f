/**
 * Tour playback overlay: timestamp, scale bar, overview inset with a
 * view rectangle, the active keyframe's caption, and a stop control.
 * The inset renders pyramid level 0 (the whole-image thumbnail tile).
 */

import type { StudioApi } from "./api.js";
import type { DatasetManifest, ViewState } from "./codec.js";
import { qualityIndicator } from "./viewer.js";

const INSET_WIDTH = 160;

export class PlaybackOverlay {
  readonly root: HTMLElement;
  onStop: () => void = () => {};

  private timestamp: HTMLElement;
  private caption: HTMLElement;
  private quality: HTMLElement;
  private scaleBarLabel: HTMLElement;
  private scaleBarLine: HTMLElement;
  private inset: HTMLCanvasElement;
  private insetImage: HTMLImageElement | null = null;
  private manifest: DatasetManifest;

  constructor(container: HTMLElement, api: StudioApi, manifest: DatasetManifest) {
    this.manifest = manifest;
    this.root = document.createElement("div");
    this.root.className = "overlay";
    this.root.innerHTML = `
      <button class="overlay-stop" title="Stop the tour">&#9632; Stop</button>
      <div class="overlay-timestamp"></div>
      <div class="overlay-quality" title="Image quality relative to native resolution"></div>
      <div class="overlay-scalebar"><div class="overlay-scalebar-line"></div>
        <span class="overlay-scalebar-label"></span></div>
      <canvas class="overlay-inset" width="${INSET_WIDTH}" height="120"></canvas>
      <div class="overlay-caption"></div>
    `;
    container.appendChild(this.root);
    this.timestamp = this.root.querySelector(".overlay-timestamp")!;
    this.caption = this.root.querySelector(".overlay-caption")!;
    this.quality = this.root.querySelector(".overlay-quality")!;
    this.scaleBarLabel = this.root.querySelector(".overlay-scalebar-label")!;
    this.scaleBarLine = this.root.querySelector(".overlay-scalebar-line")!;
    this.inset = this.root.querySelector(".overlay-inset")!;
    this.root
      .querySelector(".overlay-stop")!
      .addEventListener("click", () => this.onStop());

    const insetHeight = Math.max(
      20,
      Math.round((INSET_WIDTH * manifest.height) / manifest.width),
    );
    this.inset.height = insetHeight;
    const image = new Image();
    image.onload = () => {
      this.insetImage = image;
    };
    image.src = api.tileUrl(manifest.name, 0, 0, 0, 0);
  }

  setVisible(visible: boolean): void {
    this.root.style.display = visible ? "block" : "none";
  }

  frameLabel(frame: number): string {
    const index = Math.min(
      Math.max(Math.floor(frame + 0.5), 0),
      this.manifest.frame_count - 1,
    );
    const labels = this.manifest.frame_labels;
    return labels ? labels[index] : `frame ${index}`;
  }

  update(view: ViewState, caption: string, viewportWidth: number, viewportHeight: number): void {
    this.timestamp.textContent = this.frameLabel(view.frame);
    this.caption.textContent = caption;
    this.caption.style.opacity = caption ? "1" : "0";
    this.quality.textContent = `quality ${Math.round(qualityIndicator(view.scale))}%`;

    // a 100-screen-pixel bar covers 100/scale native pixels
    const nativeSpan = 100 / view.scale;
    this.scaleBarLine.style.width = "100px";
    this.scaleBarLabel.textContent = `${nativeSpan >= 10 ? Math.round(nativeSpan) : nativeSpan.toFixed(1)} px`;

    const ctx = this.inset.getContext("2d")!;
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, this.inset.width, this.inset.height);
    const sx = this.inset.width / this.manifest.width;
    const sy = this.inset.height / this.manifest.height;
    if (this.insetImage) {
      const factor = Math.pow(2, this.manifest.levels - 1);
      const levelW = Math.ceil(this.manifest.width / factor);
      const levelH = Math.ceil(this.manifest.height / factor);
      ctx.drawImage(
        this.insetImage,
        0, 0, levelW, levelH,
        0, 0, this.inset.width, this.inset.height,
      );
    }
    ctx.strokeStyle = "#ff5050";
    ctx.lineWidth = 1.5;
    const halfW = viewportWidth / 2 / view.scale;
    const halfH = viewportHeight / 2 / view.scale;
    ctx.strokeRect(
      (view.cx - halfW) * sx,
      (view.cy - halfH) * sy,
      2 * halfW * sx,
      2 * halfH * sy,
    );
  }
}
