/** Thin client for the studio service endpoints. */

import type { DatasetManifest, TourDoc } from "./codec.js";

export interface TourRecord {
  tour_id: string;
  created_at: string;
  updated_at: string;
  tour: TourDoc;
}

export interface JobRecord {
  job_id: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  frames_done: number;
  frames_total: number | null;
  output_dir: string | null;
  frames: string[] | null;
  error: string | null;
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.error === "string") detail = body.error;
    } catch {
      /* keep the status code */
    }
    throw new Error(detail);
  }
  return (await response.json()) as T;
}

export class StudioApi {
  constructor(private readonly base: string = "") {}

  async datasets(): Promise<DatasetManifest[]> {
    return asJson(await fetch(`${this.base}/api/datasets`));
  }

  async manifest(name: string): Promise<DatasetManifest> {
    return asJson(await fetch(`${this.base}/api/datasets/${encodeURIComponent(name)}/manifest`));
  }

  tileUrl(dataset: string, frame: number, level: number, col: number, row: number): string {
    return `${this.base}/tiles/${encodeURIComponent(dataset)}/${frame}/${level}/${col}_${row}.png`;
  }

  async listTours(): Promise<TourRecord[]> {
    return asJson(await fetch(`${this.base}/api/tours`));
  }

  async saveTour(document: TourDoc, tourId?: string): Promise<TourRecord> {
    const url = tourId ? `${this.base}/api/tours/${tourId}` : `${this.base}/api/tours`;
    return asJson(
      await fetch(url, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(document),
      }),
    );
  }

  async deleteTour(tourId: string): Promise<void> {
    const response = await fetch(`${this.base}/api/tours/${tourId}`, { method: "DELETE" });
    if (!response.ok) throw new Error(`${response.status}`);
  }

  async submitRender(
    tourId: string,
    width: number,
    height: number,
    outputFps: number,
  ): Promise<JobRecord> {
    return asJson(
      await fetch(`${this.base}/api/render`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ tour_id: tourId, width, height, output_fps: outputFps }),
      }),
    );
  }

  async job(jobId: string): Promise<JobRecord> {
    return asJson(await fetch(`${this.base}/api/jobs/${jobId}`));
  }
}
