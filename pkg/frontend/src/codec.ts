/**
 * Tour documents and shareable URL fragments.
 *
 * Mirrors the service's wire contract exactly: canonical JSON is UTF-8
 * with lexicographically sorted keys, no whitespace, integral reals
 * written as integers, and fragments are unpadded base64url prefixed
 * with "tour=".  A single camera state deep-links as
 * "v=<cx>,<cy>,<scale>&t=<frame>".
 */

export interface ViewState {
  cx: number;
  cy: number;
  scale: number;
  frame: number;
}

export interface KeyframeDoc {
  id: string;
  cx: number;
  cy: number;
  scale: number;
  frame: number;
  desc: string;
}

export interface TransitionDoc {
  kind: "speed" | "duration";
  value: number;
  loops: number;
}

export interface TourDoc {
  version: 1;
  dataset: string;
  kind: "tour" | "slideshow";
  keyframes: KeyframeDoc[];
  transitions: TransitionDoc[];
}

export interface DatasetManifest {
  name: string;
  width: number;
  height: number;
  tile_size: number;
  levels: number;
  frame_count: number;
  fps: number;
  frame_labels: string[] | null;
  tile_format: string;
}

export class CodecError extends Error {}

function sortedForJson(node: unknown): unknown {
  if (Array.isArray(node)) {
    return node.map(sortedForJson);
  }
  if (node !== null && typeof node === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(node as Record<string, unknown>).sort()) {
      out[key] = sortedForJson((node as Record<string, unknown>)[key]);
    }
    return out;
  }
  if (typeof node === "number" && !Number.isFinite(node)) {
    throw new CodecError(`cannot encode non-finite number ${node}`);
  }
  return node;
}

/** Canonical UTF-8 JSON: sorted keys, compact, stable numbers. */
export function canonicalJson(document: unknown): string {
  return JSON.stringify(sortedForJson(document));
}

const B64_ALPHABET =
  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

export function base64UrlEncode(bytes: Uint8Array): string {
  let out = "";
  for (let i = 0; i < bytes.length; i += 3) {
    const a = bytes[i];
    const b = i + 1 < bytes.length ? bytes[i + 1] : 0;
    const c = i + 2 < bytes.length ? bytes[i + 2] : 0;
    out += B64_ALPHABET[a >> 2];
    out += B64_ALPHABET[((a & 3) << 4) | (b >> 4)];
    if (i + 1 < bytes.length) out += B64_ALPHABET[((b & 15) << 2) | (c >> 6)];
    if (i + 2 < bytes.length) out += B64_ALPHABET[c & 63];
  }
  return out;
}

export function base64UrlDecode(text: string): Uint8Array {
  const cleaned = text.replace(/=+$/, "");
  const values: number[] = [];
  for (const ch of cleaned) {
    const index = B64_ALPHABET.indexOf(ch);
    if (index < 0) throw new CodecError(`malformed base64 character ${JSON.stringify(ch)}`);
    values.push(index);
  }
  if (values.length % 4 === 1) throw new CodecError("truncated base64 payload");
  const bytes: number[] = [];
  for (let i = 0; i < values.length; i += 4) {
    const [a, b, c, d] = [values[i], values[i + 1] ?? 0, values[i + 2] ?? 0, values[i + 3] ?? 0];
    bytes.push((a << 2) | (b >> 4));
    if (i + 2 < values.length) bytes.push(((b & 15) << 4) | (c >> 2));
    if (i + 3 < values.length) bytes.push(((c & 3) << 6) | d);
  }
  return new Uint8Array(bytes);
}

export function formatReal(value: number): string {
  if (!Number.isFinite(value)) throw new CodecError(`cannot encode ${value}`);
  return Object.is(value, -0) ? "0" : String(value);
}

export function encodeTour(document: TourDoc): string {
  validateTourDoc(document);
  return "tour=" + base64UrlEncode(new TextEncoder().encode(canonicalJson(document)));
}

export function decodeTour(fragment: string, manifest?: DatasetManifest): TourDoc {
  if (!fragment.startsWith("tour=")) {
    throw new CodecError('fragment does not start with "tour="');
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(new TextDecoder("utf-8", { fatal: true }).decode(
      base64UrlDecode(fragment.slice("tour=".length)),
    ));
  } catch (error) {
    if (error instanceof CodecError) throw error;
    throw new CodecError(`fragment payload is not valid JSON: ${error}`);
  }
  const document = parsed as TourDoc;
  validateTourDoc(document, manifest);
  return document;
}

export function encodeView(view: ViewState): string {
  return `v=${formatReal(view.cx)},${formatReal(view.cy)},${formatReal(view.scale)}&t=${formatReal(view.frame)}`;
}

export function decodeView(fragment: string, manifest?: DatasetManifest): ViewState {
  const match = /^v=([^,&]+),([^,&]+),([^,&]+)&t=([^&]+)$/.exec(fragment);
  if (!match) throw new CodecError(`view fragment does not match v=cx,cy,scale&t=frame`);
  const numbers = match.slice(1).map(Number);
  if (numbers.some((n) => !Number.isFinite(n))) {
    throw new CodecError("view fragment has a malformed number");
  }
  const view = { cx: numbers[0], cy: numbers[1], scale: numbers[2], frame: numbers[3] };
  if (view.scale <= 0) throw new CodecError("view scale must be positive");
  if (view.frame < 0) throw new CodecError("view frame must be >= 0");
  if (manifest && view.frame > manifest.frame_count - 1) {
    throw new CodecError(`view frame ${view.frame} exceeds the timelapse`);
  }
  return view;
}

function fail(message: string): never {
  throw new CodecError(message);
}

/** Structural + invariant validation matching the service's rules. */
export function validateTourDoc(document: TourDoc, manifest?: DatasetManifest): void {
  if (typeof document !== "object" || document === null) fail("document must be an object");
  if (document.version !== 1) fail(`unsupported document version ${document.version}`);
  if (typeof document.dataset !== "string") fail("dataset must be a string");
  if (document.kind !== "tour" && document.kind !== "slideshow") {
    fail(`kind must be tour|slideshow, got ${document.kind}`);
  }
  if (!Array.isArray(document.keyframes)) fail("keyframes must be a list");
  if (!Array.isArray(document.transitions)) fail("transitions must be a list");
  const expected = document.kind === "tour" ? Math.max(0, document.keyframes.length - 1) : 0;
  if (document.transitions.length !== expected) {
    fail(`expected ${expected} transitions, got ${document.transitions.length}`);
  }
  const seen = new Set<string>();
  document.keyframes.forEach((kf, i) => {
    const where = `keyframes[${i}]`;
    if (typeof kf.id !== "string") fail(`${where}.id must be a string`);
    if (seen.has(kf.id)) fail(`${where}.id duplicates ${kf.id}`);
    seen.add(kf.id);
    if (typeof kf.desc !== "string") fail(`${where}.desc must be a string`);
    for (const field of ["cx", "cy", "scale", "frame"] as const) {
      if (typeof kf[field] !== "number" || !Number.isFinite(kf[field])) {
        fail(`${where}.${field} must be a finite number`);
      }
    }
    if (kf.scale <= 0) fail(`${where}.scale must be positive`);
    if (kf.frame < 0) fail(`${where}.frame must be >= 0`);
    if (manifest && kf.frame > manifest.frame_count - 1) {
      fail(`${where}.frame exceeds the timelapse`);
    }
  });
  document.transitions.forEach((t, i) => {
    const where = `transitions[${i}]`;
    if (t.kind !== "speed" && t.kind !== "duration") fail(`${where}.kind must be speed|duration`);
    if (typeof t.value !== "number" || !Number.isFinite(t.value)) {
      fail(`${where}.value must be a finite number`);
    }
    if (t.kind === "speed" && t.value <= 0) fail(`${where}: speed requires value > 0`);
    if (t.kind === "duration" && t.value < 0) fail(`${where}: duration requires value >= 0`);
    if (!Number.isInteger(t.loops) || t.loops < 0) {
      fail(`${where}.loops must be a non-negative integer`);
    }
  });
}
