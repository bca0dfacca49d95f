/** Editor application bootstrap: viewer + editor bar + playback + share. */

import { StudioApi } from "./api.js";
import type { DatasetManifest, TourDoc, ViewState } from "./codec.js";
import { EditorBar } from "./editor.js";
import { addKeyframe, emptyTour } from "./model.js";
import { PlaybackOverlay } from "./overlay.js";
import { restoreFromFragment, embedUrl, writeTourFragment, writeViewFragment } from "./share.js";
import { SlideshowPanel } from "./slideshow.js";
import {
  compileTour,
  flyTo,
  sample,
  segmentIndexAt,
  TimelineError,
  type CompiledTimeline,
} from "./timeline.js";
import { fitDatasetView, qualityIndicator, Viewer } from "./viewer.js";

type Mode = "idle" | "touring" | "flying";

class App {
  private api = new StudioApi("");
  private manifest!: DatasetManifest;
  private viewer!: Viewer;
  private editor!: EditorBar;
  private overlay!: PlaybackOverlay;
  private slideshow!: SlideshowPanel;
  private doc!: TourDoc;
  private savedTourId: string | null = null;

  private mode: Mode = "idle";
  private playback: CompiledTimeline | null = null;
  private playbackStarted = 0;

  private canvas = document.getElementById("viewer") as HTMLCanvasElement;
  private scrubber = document.getElementById("scrubber") as HTMLInputElement;
  private frameReadout = document.getElementById("frame-readout")!;
  private qualityBox = document.getElementById("quality")!;
  private status = document.getElementById("status")!;

  async start(): Promise<void> {
    const datasets = await this.api.datasets();
    if (!datasets.length) {
      this.status.textContent = "No datasets ingested; run `studio ingest` first.";
      return;
    }
    const picker = document.getElementById("dataset") as HTMLSelectElement;
    for (const manifest of datasets) {
      const option = document.createElement("option");
      option.value = manifest.name;
      option.textContent = `${manifest.name} (${manifest.width}x${manifest.height}, ${manifest.frame_count} frames)`;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => this.loadDataset(picker.value, datasets));
    await this.loadDataset(datasets[0].name, datasets);
  }

  private async loadDataset(name: string, datasets: DatasetManifest[]): Promise<void> {
    this.manifest = datasets.find((m) => m.name === name)!;
    this.doc = emptyTour(this.manifest.name);
    this.savedTourId = null;

    if (!this.viewer) {
      this.viewer = new Viewer(this.canvas, this.api, this.manifest);
      this.editor = new EditorBar(
        document.getElementById("editor-bar")!,
        this.api,
        this.manifest,
      );
      this.overlay = new PlaybackOverlay(
        document.getElementById("viewer-wrap")!,
        this.api,
        this.manifest,
      );
      this.slideshow = new SlideshowPanel(
        document.getElementById("slides")!,
        this.api,
        this.manifest,
      );
      this.wire();
    } else {
      this.viewer.setManifest(this.manifest);
      this.editor.setManifest(this.manifest);
      this.slideshow.setManifest(this.manifest);
    }

    this.scrubber.max = String(this.manifest.frame_count - 1);
    this.scrubber.value = "0";
    this.editor.setTour(this.doc);
    this.slideshow.setTour(this.doc);
    this.overlay.setVisible(false);

    const restored = restoreFromFragment(window.location.hash, this.manifest);
    if (restored.kind === "tour" && restored.doc.dataset === this.manifest.name) {
      this.doc = restored.doc;
      this.editor.setTour(this.doc);
      this.slideshow.setTour(this.doc);
      this.status.textContent = "Restored tour from the share link.";
    } else if (restored.kind === "view") {
      this.viewer.setView(restored.view);
    } else if (restored.kind === "error") {
      this.status.textContent = `Share link invalid: ${restored.message}`;
    }
  }

  private wire(): void {
    this.viewer.onViewChange = (view) => {
      if (this.mode === "idle") {
        this.scrubber.value = String(Math.round(view.frame));
      }
      this.frameReadout.textContent = this.overlay.frameLabel(view.frame);
      this.qualityBox.textContent = `quality ${Math.round(qualityIndicator(view.scale))}%`;
    };
    this.viewer.setView(this.viewer.view); // prime the readouts

    this.scrubber.addEventListener("input", () => {
      this.stopPlayback();
      this.viewer.setFrame(Number(this.scrubber.value));
    });

    this.editor.currentView = () => this.viewer.view;
    this.editor.onChange = (doc) => {
      this.doc = doc;
      this.slideshow.setTour(doc);
    };
    this.editor.onJumpTo = (view) => this.viewer.setView(view);

    this.overlay.onStop = () => this.stopPlayback();
    this.slideshow.onFly = (target) => this.startFlight(target);

    document.getElementById("add-keyframe")!.addEventListener("click", () => {
      this.doc = addKeyframe(this.doc, this.viewer.view);
      this.editor.setTour(this.doc);
      this.slideshow.setTour(this.doc);
    });

    document.getElementById("play")!.addEventListener("click", () => this.startTour());

    const modeToggle = document.getElementById("mode") as HTMLSelectElement;
    modeToggle.addEventListener("change", () => {
      this.doc = { ...this.doc, kind: modeToggle.value as TourDoc["kind"] };
      if (this.doc.kind === "slideshow") {
        this.doc = { ...this.doc, transitions: [] };
        this.viewer.setView(
          fitDatasetView(this.manifest, this.canvas.width, this.canvas.height),
        );
      } else if (this.doc.keyframes.length > 1) {
        this.doc = {
          ...this.doc,
          transitions: Array.from({ length: this.doc.keyframes.length - 1 }, () => ({
            kind: "speed" as const,
            value: 1.0,
            loops: 0,
          })),
        };
      }
      this.editor.setTour(this.doc);
      this.slideshow.setTour(this.doc);
      this.slideshow.setVisible(this.doc.kind === "slideshow");
    });

    document.getElementById("share")!.addEventListener("click", () => {
      try {
        const fragment = writeTourFragment(this.doc);
        const box = document.getElementById("share-url") as HTMLInputElement;
        box.value = embedUrl(fragment);
        box.select();
        this.status.textContent = "Share URL written to the address bar.";
      } catch (error) {
        this.status.textContent = `Cannot share: ${error}`;
      }
    });

    document.getElementById("share-view")!.addEventListener("click", () => {
      const fragment = writeViewFragment(this.viewer.view);
      (document.getElementById("share-url") as HTMLInputElement).value = embedUrl(fragment);
    });

    document.getElementById("save")!.addEventListener("click", async () => {
      try {
        const record = await this.api.saveTour(this.doc, this.savedTourId ?? undefined);
        this.savedTourId = record.tour_id;
        this.status.textContent = `Saved tour ${record.tour_id}.`;
      } catch (error) {
        this.status.textContent = `Save failed: ${error}`;
      }
    });

    document.getElementById("render")!.addEventListener("click", async () => {
      try {
        if (!this.savedTourId) {
          const record = await this.api.saveTour(this.doc);
          this.savedTourId = record.tour_id;
        }
        let job = await this.api.submitRender(this.savedTourId, 1280, 720, 30);
        this.status.textContent = `Render job ${job.job_id} queued.`;
        while (job.status === "queued" || job.status === "running") {
          await new Promise((resolve) => setTimeout(resolve, 500));
          job = await this.api.job(job.job_id);
          this.status.textContent = `Render ${job.status}: ${Math.round(job.progress * 100)}%`;
        }
        this.status.textContent =
          job.status === "done"
            ? `Render done: ${job.frames?.length} frames in ${job.output_dir}`
            : `Render failed: ${job.error}`;
      } catch (error) {
        this.status.textContent = `Render failed: ${error}`;
      }
    });
  }

  private startTour(): void {
    this.stopPlayback();
    try {
      this.playback = compileTour(this.doc, this.manifest);
    } catch (error) {
      this.status.textContent =
        error instanceof TimelineError ? `Cannot play: ${error.message}` : String(error);
      return;
    }
    this.mode = "touring";
    this.overlay.setVisible(true);
    this.playbackStarted = performance.now();
    requestAnimationFrame(() => this.tick());
  }

  private startFlight(target: ViewState): void {
    this.stopPlayback();
    this.playback = flyTo(this.viewer.view, target, this.manifest);
    this.mode = "flying";
    this.playbackStarted = performance.now();
    requestAnimationFrame(() => this.tick());
  }

  private stopPlayback(): void {
    this.mode = "idle";
    this.playback = null;
    this.overlay.setVisible(false);
  }

  private tick(): void {
    if (this.mode === "idle" || !this.playback) return;
    const elapsed = (performance.now() - this.playbackStarted) / 1000;
    const t = Math.min(elapsed, this.playback.totalSeconds);
    const view = sample(this.playback, t);
    this.viewer.setView(view);

    if (this.mode === "touring") {
      const index = segmentIndexAt(this.playback, t);
      const caption = this.doc.keyframes[index]?.desc ?? "";
      this.overlay.update(view, caption, this.canvas.width, this.canvas.height);
    }

    if (elapsed >= this.playback.totalSeconds) {
      const finished = this.mode;
      this.mode = "idle";
      this.playback = null;
      if (finished === "touring") this.overlay.setVisible(false);
      return;
    }
    requestAnimationFrame(() => this.tick());
  }
}

window.addEventListener("DOMContentLoaded", () => {
  new App().start().catch((error) => {
    document.getElementById("status")!.textContent = `Startup failed: ${error}`;
  });
});
