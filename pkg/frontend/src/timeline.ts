/**
 * Client-side timeline: the same transition semantics as the engine so
 * playback can sample at display refresh without round-tripping.
 *
 * A speed gap fixes playback rate relative to native fps; a duration gap
 * fixes wall seconds (0 = jump).  Loops traverse the whole timelapse
 * forward with wraparound, pausing 0.5 s at each arrival on the first or
 * last frame; backward gaps run direct and never pause.  Centers move
 * linearly, scale exponentially, time linearly along the frame path; the
 * whole view freezes during a dwell.
 */

import type { DatasetManifest, TourDoc, TransitionDoc, ViewState } from "./codec.js";

export const DWELL_SECONDS = 0.5;
export const FLY_TO_SECONDS = 2.0;

export type MotionKind = "full_motion" | "time_only" | "space_only" | "hold" | "jump";

export interface Segment {
  startView: ViewState;
  endView: ViewState;
  activeSeconds: number;
  dwellOffsets: number[];
  framePath: number;
  tStart: number;
}

export interface CompiledTimeline {
  dataset: string;
  frameCount: number;
  segments: Segment[];
  totalSeconds: number;
  startView: ViewState;
}

export class TimelineError extends Error {
  gapIndex: number | null = null;
}

function modulo(value: number, period: number): number {
  return ((value % period) + period) % period;
}

export function traversalPath(frameDelta: number, loops: number, frameCount: number): number {
  if (loops > 0 && frameCount < 2) {
    throw new TimelineError("looping requires a timelapse of at least 2 frames");
  }
  if (loops === 0 && frameDelta < 0) return frameDelta;
  return loops * frameCount + modulo(frameDelta, frameCount);
}

function dwellOffsets(
  startFrame: number,
  path: number,
  frameCount: number,
  secondsPerStep: number,
): number[] {
  if (path <= 0 || secondsPerStep <= 0 || frameCount < 2) return [];
  const offsets: number[] = [];
  for (const station of [frameCount - 1, 0]) {
    let k = modulo(station - startFrame, frameCount);
    if (k <= 1e-9) k += frameCount;
    for (; k <= path + 1e-9; k += frameCount) {
      offsets.push(k * secondsPerStep);
    }
  }
  return offsets.sort((a, b) => a - b);
}

export function segmentDuration(
  transition: TransitionDoc,
  frameDelta: number,
  fps: number,
  frameCount: number,
  startFrame = 0,
): { active: number; path: number; dwells: number[] } {
  if (Math.abs(frameDelta) > frameCount - 1) {
    throw new TimelineError(`frame delta ${frameDelta} exceeds the timelapse span`);
  }
  const path = traversalPath(frameDelta, transition.loops, frameCount);
  let active: number;
  if (transition.kind === "speed") {
    if (path === 0) throw new TimelineError("speed transition requires differing times");
    active = Math.abs(path) / (fps * transition.value);
  } else {
    active = transition.value;
  }
  const dwells =
    active > 0 && path > 0 ? dwellOffsets(startFrame, path, frameCount, active / path) : [];
  return { active, path, dwells };
}

export function classifyMotion(
  first: ViewState,
  second: ViewState,
  transition: TransitionDoc,
): MotionKind {
  if (transition.kind === "duration" && transition.value === 0) return "jump";
  const timeMoves = first.frame !== second.frame || transition.loops > 0;
  if (transition.kind === "speed" && !timeMoves) {
    throw new TimelineError("speed transition requires differing times");
  }
  const spaceMoves =
    first.cx !== second.cx || first.cy !== second.cy || first.scale !== second.scale;
  if (timeMoves && spaceMoves) return "full_motion";
  if (timeMoves) return "time_only";
  if (spaceMoves) return "space_only";
  return "hold";
}

function segmentWall(segment: Segment): number {
  return segment.activeSeconds + segment.dwellOffsets.length * DWELL_SECONDS;
}

export function compileTour(document: TourDoc, manifest: DatasetManifest): CompiledTimeline {
  if (document.kind !== "tour") throw new TimelineError("only kind=tour compiles");
  if (!document.keyframes.length) throw new TimelineError("cannot compile an empty tour");
  const segments: Segment[] = [];
  let clock = 0;
  for (let gap = 0; gap < document.keyframes.length - 1; gap++) {
    const a = document.keyframes[gap];
    const b = document.keyframes[gap + 1];
    let resolved;
    try {
      resolved = segmentDuration(
        document.transitions[gap],
        b.frame - a.frame,
        manifest.fps,
        manifest.frame_count,
        a.frame,
      );
    } catch (error) {
      if (error instanceof TimelineError) {
        const tagged = new TimelineError(`gap ${gap}: ${error.message}`);
        tagged.gapIndex = gap;
        throw tagged;
      }
      throw error;
    }
    segments.push({
      startView: { cx: a.cx, cy: a.cy, scale: a.scale, frame: a.frame },
      endView: { cx: b.cx, cy: b.cy, scale: b.scale, frame: b.frame },
      activeSeconds: resolved.active,
      dwellOffsets: resolved.dwells,
      framePath: resolved.path,
      tStart: clock,
    });
    clock += segmentWall(segments[segments.length - 1]);
  }
  const first = document.keyframes[0];
  return {
    dataset: document.dataset,
    frameCount: manifest.frame_count,
    segments,
    totalSeconds: clock,
    startView: { cx: first.cx, cy: first.cy, scale: first.scale, frame: first.frame },
  };
}

export function flyTo(
  current: ViewState,
  target: ViewState,
  manifest: DatasetManifest,
): CompiledTimeline {
  const { path } = segmentDuration(
    { kind: "duration", value: FLY_TO_SECONDS, loops: 0 },
    target.frame - current.frame,
    manifest.fps,
    manifest.frame_count,
    current.frame,
  );
  return {
    dataset: manifest.name,
    frameCount: manifest.frame_count,
    segments: [
      {
        startView: { ...current },
        endView: { ...target },
        activeSeconds: FLY_TO_SECONDS,
        dwellOffsets: [], // navigation hops never pause
        framePath: path,
        tStart: 0,
      },
    ],
    totalSeconds: FLY_TO_SECONDS,
    startView: { ...current },
  };
}

function activeTime(segment: Segment, wallOffset: number): number {
  let consumed = 0;
  for (const offset of segment.dwellOffsets) {
    const holdStart = offset + consumed;
    if (wallOffset < holdStart) break;
    if (wallOffset <= holdStart + DWELL_SECONDS) return offset;
    consumed += DWELL_SECONDS;
  }
  return wallOffset - consumed;
}

export function sample(timeline: CompiledTimeline, wallTime: number): ViewState {
  if (wallTime < -1e-9 || wallTime > timeline.totalSeconds + 1e-9) {
    throw new TimelineError(`wall time ${wallTime} outside [0, ${timeline.totalSeconds}]`);
  }
  const t = Math.min(Math.max(wallTime, 0), timeline.totalSeconds);
  if (!timeline.segments.length) return { ...timeline.startView };

  let segment = timeline.segments[0];
  for (const candidate of timeline.segments) {
    if (candidate.tStart <= t) segment = candidate;
    else break;
  }
  const offset = t - segment.tStart;
  if (offset >= segmentWall(segment)) return { ...segment.endView };
  if (offset <= 0) return { ...segment.startView };

  const active = activeTime(segment, offset);
  if (segment.activeSeconds <= 0) return { ...segment.endView };
  const u = active / segment.activeSeconds;
  if (u <= 0) return { ...segment.startView };
  if (u >= 1) return { ...segment.endView };

  const a = segment.startView;
  const b = segment.endView;
  let frame = modulo(a.frame + u * segment.framePath, timeline.frameCount);
  frame = Math.min(frame, timeline.frameCount - 1);
  return {
    cx: a.cx + u * (b.cx - a.cx),
    cy: a.cy + u * (b.cy - a.cy),
    scale: a.scale * Math.pow(b.scale / a.scale, u),
    frame,
  };
}

/** Index of the segment owning a wall time; drives caption switching. */
export function segmentIndexAt(timeline: CompiledTimeline, wallTime: number): number {
  let index = 0;
  for (let i = 0; i < timeline.segments.length; i++) {
    if (timeline.segments[i].tStart <= wallTime) index = i;
  }
  return index;
}
