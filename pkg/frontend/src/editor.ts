/**
 * Keyframe editor bar: thumbnails, drag reordering, per-gap transition
 * controls, descriptions, and the per-keyframe auxiliary actions
 * (update to current view, duplicate, delete).
 */

import type { StudioApi } from "./api.js";
import type { DatasetManifest, TourDoc, TransitionDoc, ViewState } from "./codec.js";
import {
  deleteKeyframe,
  duplicateKeyframe,
  keyframeView,
  moveKeyframe,
  setDescription,
  setTransition,
  updateKeyframeView,
} from "./model.js";
import { classifyMotion, TimelineError } from "./timeline.js";

const THUMB_WIDTH = 96;
const THUMB_HEIGHT = 54;

export class EditorBar {
  onChange: (doc: TourDoc) => void = () => {};
  onJumpTo: (view: ViewState) => void = () => {};
  currentView: () => ViewState = () => ({ cx: 0, cy: 0, scale: 1, frame: 0 });

  private doc: TourDoc | null = null;
  private selected: string | null = null;
  private dragId: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: StudioApi,
    private manifest: DatasetManifest,
  ) {}

  setManifest(manifest: DatasetManifest): void {
    this.manifest = manifest;
  }

  setTour(doc: TourDoc): void {
    this.doc = doc;
    this.render();
  }

  get tour(): TourDoc | null {
    return this.doc;
  }

  private change(doc: TourDoc): void {
    this.doc = doc;
    this.render();
    this.onChange(doc);
  }

  private render(): void {
    this.root.innerHTML = "";
    if (!this.doc) return;
    const strip = document.createElement("div");
    strip.className = "kf-strip";
    this.doc.keyframes.forEach((kf, index) => {
      strip.appendChild(this.keyframeCard(kf.id, index));
      if (this.doc!.kind === "tour" && index < this.doc!.keyframes.length - 1) {
        strip.appendChild(this.gapCard(index));
      }
    });
    this.root.appendChild(strip);
  }

  private keyframeCard(id: string, index: number): HTMLElement {
    const doc = this.doc!;
    const kf = doc.keyframes[index];
    const card = document.createElement("div");
    card.className = "kf-card" + (this.selected === id ? " selected" : "");
    card.draggable = true;

    const thumb = document.createElement("canvas");
    thumb.width = THUMB_WIDTH;
    thumb.height = THUMB_HEIGHT;
    thumb.className = "kf-thumb";
    thumb.title = `frame ${kf.frame}, scale ${kf.scale}`;
    this.drawThumbnail(thumb, keyframeView(kf));
    thumb.addEventListener("click", () => {
      this.selected = id;
      this.onJumpTo(keyframeView(kf));
      this.render();
    });
    card.appendChild(thumb);

    const label = document.createElement("div");
    label.className = "kf-label";
    label.textContent = `#${index} · f${kf.frame}`;
    card.appendChild(label);

    const desc = document.createElement("input");
    desc.className = "kf-desc";
    desc.placeholder = "description";
    desc.value = kf.desc;
    desc.addEventListener("change", () => this.change(setDescription(doc, id, desc.value)));
    card.appendChild(desc);

    const actions = document.createElement("div");
    actions.className = "kf-actions";
    const updateBtn = document.createElement("button");
    updateBtn.textContent = "⟳";
    updateBtn.title = "Update the keyframe to the current view";
    updateBtn.addEventListener("click", () =>
      this.change(updateKeyframeView(doc, id, this.currentView())),
    );
    const dupBtn = document.createElement("button");
    dupBtn.textContent = "⧉";
    dupBtn.title = "Duplicate the keyframe";
    dupBtn.addEventListener("click", () => this.change(duplicateKeyframe(doc, id)));
    const delBtn = document.createElement("button");
    delBtn.textContent = "✕";
    delBtn.title = "Delete the keyframe";
    delBtn.addEventListener("click", () => this.change(deleteKeyframe(doc, id)));
    actions.append(updateBtn, dupBtn, delBtn);
    card.appendChild(actions);

    card.addEventListener("dragstart", () => (this.dragId = id));
    card.addEventListener("dragover", (e) => e.preventDefault());
    card.addEventListener("drop", (e) => {
      e.preventDefault();
      if (this.dragId && this.dragId !== id) {
        this.change(moveKeyframe(doc, this.dragId, index));
      }
      this.dragId = null;
    });
    return card;
  }

  private gapCard(gap: number): HTMLElement {
    const doc = this.doc!;
    const transition = doc.transitions[gap];
    const card = document.createElement("div");
    card.className = "gap-card";

    const kindSel = document.createElement("select");
    for (const kind of ["speed", "duration"]) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      option.selected = transition.kind === kind;
      kindSel.appendChild(option);
    }
    const valueIn = document.createElement("input");
    valueIn.type = "number";
    valueIn.step = "0.1";
    valueIn.min = "0";
    valueIn.value = String(transition.kind === "speed" ? transition.value * 100 : transition.value);
    const unit = document.createElement("span");
    unit.className = "gap-unit";
    unit.textContent = transition.kind === "speed" ? "%" : "s";

    const loopsIn = document.createElement("input");
    loopsIn.type = "number";
    loopsIn.step = "1";
    loopsIn.min = "0";
    loopsIn.value = String(transition.loops);
    loopsIn.title = "Times to loop through the entire timelapse";

    const badge = document.createElement("span");
    badge.className = "gap-badge";
    const error = document.createElement("div");
    error.className = "gap-error";

    const apply = () => {
      const kind = kindSel.value as TransitionDoc["kind"];
      const raw = Number(valueIn.value);
      const next: TransitionDoc = {
        kind,
        value: kind === "speed" ? raw / 100 : raw,
        loops: Math.max(0, Math.round(Number(loopsIn.value))),
      };
      unit.textContent = kind === "speed" ? "%" : "s";
      error.textContent = "";
      try {
        if (kind === "speed" && next.value <= 0) throw new TimelineError("speed must be > 0");
        if (next.value < 0) throw new TimelineError("duration must be >= 0");
        classifyMotion(
          keyframeView(doc.keyframes[gap]),
          keyframeView(doc.keyframes[gap + 1]),
          next,
        );
      } catch (err) {
        error.textContent = err instanceof Error ? err.message : String(err);
        return;
      }
      this.change(setTransition(doc, gap, next));
    };
    kindSel.addEventListener("change", apply);
    valueIn.addEventListener("change", apply);
    loopsIn.addEventListener("change", apply);

    badge.textContent =
      transition.kind === "duration" && transition.value === 0 ? "JUMP" : "";

    const loopsLabel = document.createElement("span");
    loopsLabel.className = "gap-unit";
    loopsLabel.textContent = "loops";
    card.append(kindSel, valueIn, unit, loopsIn, loopsLabel, badge, error);
    return card;
  }

  /** Draw the keyframe's visible region from the whole-image thumbnail
   * tile (level 0 always fits in a single tile). */
  private drawThumbnail(canvas: HTMLCanvasElement, view: ViewState): void {
    const manifest = this.manifest;
    const ctx = canvas.getContext("2d")!;
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const image = new Image();
    image.onload = () => {
      const factor = Math.pow(2, manifest.levels - 1);
      // region of the dataset visible in a nominal 16:9 viewport
      const nominalW = 960 / view.scale;
      const nominalH = 540 / view.scale;
      ctx.drawImage(
        image,
        (view.cx - nominalW / 2) / factor,
        (view.cy - nominalH / 2) / factor,
        nominalW / factor,
        nominalH / factor,
        0, 0, canvas.width, canvas.height,
      );
    };
    const frame = Math.min(
      Math.max(Math.round(view.frame), 0),
      manifest.frame_count - 1,
    );
    image.src = this.api.tileUrl(manifest.name, frame, 0, 0, 0);
  }
}
