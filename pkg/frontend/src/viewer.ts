/**
 * Zoomable, pannable canvas viewer over the tile pyramid.
 *
 * Wheel zoom anchors the dataset point under the cursor; the drawn level
 * is the one whose minification factor sits in (0.5, 1], matching the
 * server-side renderer exactly.
 */

import type { StudioApi } from "./api.js";
import type { DatasetManifest, ViewState } from "./codec.js";
import { TileLoader } from "./tiles.js";

export function selectLevel(scale: number, levels: number): number {
  const level = levels - 1 - Math.floor(Math.log2(1.0 / scale));
  return Math.min(Math.max(level, 0), levels - 1);
}

export function qualityIndicator(scale: number): number {
  return Math.min(100, 100 / scale);
}

/** New camera after zooming by `factor` with the cursor at (px, py):
 * the dataset point under the cursor stays put. */
export function zoomAt(
  view: ViewState,
  factor: number,
  px: number,
  py: number,
  viewportWidth: number,
  viewportHeight: number,
  minScale = 1 / 4096,
  maxScale = 64,
): ViewState {
  const scale = Math.min(Math.max(view.scale * factor, minScale), maxScale);
  const anchorX = view.cx + (px - viewportWidth / 2) / view.scale;
  const anchorY = view.cy + (py - viewportHeight / 2) / view.scale;
  return {
    cx: anchorX - (px - viewportWidth / 2) / scale,
    cy: anchorY - (py - viewportHeight / 2) / scale,
    scale,
    frame: view.frame,
  };
}

export function fitDatasetView(manifest: DatasetManifest, width: number, height: number): ViewState {
  return {
    cx: manifest.width / 2,
    cy: manifest.height / 2,
    scale: Math.min(width / manifest.width, height / manifest.height),
    frame: 0,
  };
}

export class Viewer {
  view: ViewState;
  onViewChange: (view: ViewState) => void = () => {};

  private ctx: CanvasRenderingContext2D;
  private loader: TileLoader;
  private dragging = false;
  private lastX = 0;
  private lastY = 0;
  private redrawQueued = false;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly api: StudioApi,
    private manifest: DatasetManifest,
  ) {
    this.ctx = canvas.getContext("2d")!;
    this.loader = new TileLoader(() => this.requestDraw());
    this.view = fitDatasetView(manifest, canvas.width, canvas.height);

    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
    canvas.addEventListener("mousedown", (e) => this.onMouseDown(e));
    window.addEventListener("mousemove", (e) => this.onMouseMove(e));
    window.addEventListener("mouseup", () => (this.dragging = false));
  }

  setManifest(manifest: DatasetManifest): void {
    this.manifest = manifest;
    this.view = fitDatasetView(manifest, this.canvas.width, this.canvas.height);
    this.emit();
  }

  setView(view: ViewState): void {
    this.view = { ...view };
    this.emit();
  }

  setFrame(frame: number): void {
    this.view = { ...this.view, frame };
    this.emit();
  }

  private emit(): void {
    this.onViewChange(this.view);
    this.requestDraw();
  }

  private onWheel(event: WheelEvent): void {
    event.preventDefault();
    const rect = this.canvas.getBoundingClientRect();
    const factor = Math.pow(2, -event.deltaY / 240);
    this.view = zoomAt(
      this.view,
      factor,
      event.clientX - rect.left,
      event.clientY - rect.top,
      this.canvas.width,
      this.canvas.height,
    );
    this.emit();
  }

  private onMouseDown(event: MouseEvent): void {
    this.dragging = true;
    this.lastX = event.clientX;
    this.lastY = event.clientY;
  }

  private onMouseMove(event: MouseEvent): void {
    if (!this.dragging) return;
    const dx = event.clientX - this.lastX;
    const dy = event.clientY - this.lastY;
    this.lastX = event.clientX;
    this.lastY = event.clientY;
    this.view = {
      ...this.view,
      cx: this.view.cx - dx / this.view.scale,
      cy: this.view.cy - dy / this.view.scale,
    };
    this.emit();
  }

  requestDraw(): void {
    if (this.redrawQueued) return;
    this.redrawQueued = true;
    requestAnimationFrame(() => {
      this.redrawQueued = false;
      this.draw();
    });
  }

  draw(): void {
    const { canvas, ctx, manifest, view } = this;
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    const frame = Math.min(
      Math.max(Math.floor(view.frame + 0.5), 0),
      manifest.frame_count - 1,
    );
    const level = selectLevel(view.scale, manifest.levels);
    const factor = Math.pow(2, manifest.levels - 1 - level);
    const ts = manifest.tile_size;
    const levelW = Math.ceil(manifest.width / factor);
    const levelH = Math.ceil(manifest.height / factor);
    const tileScreen = ts * factor * view.scale;

    const x0 = view.cx - canvas.width / 2 / view.scale;
    const y0 = view.cy - canvas.height / 2 / view.scale;
    const firstCol = Math.max(Math.floor(x0 / factor / ts), 0);
    const firstRow = Math.max(Math.floor(y0 / factor / ts), 0);
    const lastCol = Math.min(
      Math.ceil((x0 + canvas.width / view.scale) / factor / ts),
      Math.ceil(levelW / ts) - 1,
    );
    const lastRow = Math.min(
      Math.ceil((y0 + canvas.height / view.scale) / factor / ts),
      Math.ceil(levelH / ts) - 1,
    );

    const wanted = new Set<string>();
    for (let row = firstRow; row <= lastRow; row++) {
      for (let col = firstCol; col <= lastCol; col++) {
        const key = `${manifest.name}/${frame}/${level}/${col}_${row}`;
        wanted.add(key);
        const image = this.loader.get(
          key,
          this.api.tileUrl(manifest.name, frame, level, col, row),
        );
        if (!image) continue;
        const sx = (col * ts * factor - view.cx) * view.scale + canvas.width / 2;
        const sy = (row * ts * factor - view.cy) * view.scale + canvas.height / 2;
        ctx.imageSmoothingEnabled = view.scale * factor < 1;
        ctx.drawImage(image, sx, sy, tileScreen, tileScreen);
      }
    }
    this.loader.retain(wanted);

    // mask anything past the dataset edge (edge tiles carry padding)
    const rightEdge = (manifest.width - view.cx) * view.scale + canvas.width / 2;
    const bottomEdge = (manifest.height - view.cy) * view.scale + canvas.height / 2;
    ctx.fillStyle = "#000";
    if (rightEdge < canvas.width) {
      ctx.fillRect(rightEdge, 0, canvas.width - rightEdge, canvas.height);
    }
    if (bottomEdge < canvas.height) {
      ctx.fillRect(0, bottomEdge, canvas.width, canvas.height - bottomEdge);
    }
  }
}
