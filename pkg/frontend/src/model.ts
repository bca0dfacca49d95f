/**
 * Editor operations over tour documents.
 *
 * Pure functions: every gesture returns a fresh document, leaving the
 * input untouched, and preserves the transitions-per-gap invariant so
 * any edited document is accepted by the service as-is.
 */

import type { KeyframeDoc, TourDoc, TransitionDoc, ViewState } from "./codec.js";

export const DEFAULT_TRANSITION: TransitionDoc = { kind: "speed", value: 1.0, loops: 0 };

function freshId(document: TourDoc): string {
  let highest = -1;
  for (const kf of document.keyframes) {
    if (/^\d+$/.test(kf.id)) highest = Math.max(highest, parseInt(kf.id, 10));
  }
  return String(highest + 1);
}

function cloneDoc(document: TourDoc): TourDoc {
  return {
    version: document.version,
    dataset: document.dataset,
    kind: document.kind,
    keyframes: document.keyframes.map((kf) => ({ ...kf })),
    transitions: document.transitions.map((t) => ({ ...t })),
  };
}

export function indexOf(document: TourDoc, id: string): number {
  const index = document.keyframes.findIndex((kf) => kf.id === id);
  if (index < 0) throw new Error(`no keyframe with id ${id}`);
  return index;
}

/** Insert a keyframe capturing the given view (append by default); its
 * incoming gap receives the default 100%-speed transition. */
export function addKeyframe(document: TourDoc, view: ViewState, at?: number): TourDoc {
  const next = cloneDoc(document);
  const n = next.keyframes.length;
  const index = at ?? n;
  if (index < 0 || index > n) throw new Error(`insert index ${index} out of range`);
  next.keyframes.splice(index, 0, {
    id: freshId(document),
    cx: view.cx,
    cy: view.cy,
    scale: view.scale,
    frame: Math.round(view.frame),
    desc: "",
  });
  if (next.kind === "tour" && n >= 1) {
    next.transitions.splice(Math.max(index - 1, 0), 0, { ...DEFAULT_TRANSITION });
  }
  return next;
}

/** Remove a keyframe; flanking transitions collapse to the earlier one. */
export function deleteKeyframe(document: TourDoc, id: string): TourDoc {
  const next = cloneDoc(document);
  const index = indexOf(next, id);
  next.keyframes.splice(index, 1);
  if (next.transitions.length) {
    next.transitions.splice(Math.min(index, next.transitions.length - 1), 1);
  }
  return next;
}

/** Reorder a keyframe; transitions stay attached to gap positions. */
export function moveKeyframe(document: TourDoc, id: string, to: number): TourDoc {
  const next = cloneDoc(document);
  const from = indexOf(next, id);
  if (to < 0 || to >= next.keyframes.length) throw new Error(`move index ${to} out of range`);
  const [kf] = next.keyframes.splice(from, 1);
  next.keyframes.splice(to, 0, kf);
  return next;
}

/** Clone a keyframe right after itself; the original->copy gap gets the
 * default transition and the copy inherits the outgoing one. */
export function duplicateKeyframe(document: TourDoc, id: string): TourDoc {
  const next = cloneDoc(document);
  const index = indexOf(next, id);
  const copy = { ...next.keyframes[index], id: freshId(document) };
  next.keyframes.splice(index + 1, 0, copy);
  if (next.kind === "tour") {
    next.transitions.splice(index, 0, { ...DEFAULT_TRANSITION });
  }
  return next;
}

export function updateKeyframeView(document: TourDoc, id: string, view: ViewState): TourDoc {
  const next = cloneDoc(document);
  const kf = next.keyframes[indexOf(next, id)];
  kf.cx = view.cx;
  kf.cy = view.cy;
  kf.scale = view.scale;
  kf.frame = Math.round(view.frame);
  return next;
}

export function setDescription(document: TourDoc, id: string, text: string): TourDoc {
  const next = cloneDoc(document);
  next.keyframes[indexOf(next, id)].desc = text;
  return next;
}

export function setTransition(document: TourDoc, gap: number, t: TransitionDoc): TourDoc {
  if (document.kind === "slideshow") throw new Error("slideshows have no transitions");
  if (gap < 0 || gap >= document.transitions.length) throw new Error(`gap ${gap} out of range`);
  const next = cloneDoc(document);
  next.transitions[gap] = { ...t };
  return next;
}

export function keyframeView(kf: KeyframeDoc): ViewState {
  return { cx: kf.cx, cy: kf.cy, scale: kf.scale, frame: kf.frame };
}

export function emptyTour(dataset: string, kind: "tour" | "slideshow" = "tour"): TourDoc {
  return { version: 1, dataset, kind, keyframes: [], transitions: [] };
}
