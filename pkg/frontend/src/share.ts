/** Share flow: the address-bar fragment is the document of record. */

import {
  CodecError,
  decodeTour,
  decodeView,
  encodeTour,
  encodeView,
  type DatasetManifest,
  type TourDoc,
  type ViewState,
} from "./codec.js";

export function writeTourFragment(doc: TourDoc): string {
  const fragment = encodeTour(doc);
  window.location.hash = fragment;
  return fragment;
}

export function writeViewFragment(view: ViewState): string {
  const fragment = encodeView(view);
  window.location.hash = fragment;
  return fragment;
}

export function embedUrl(fragment: string): string {
  const base = window.location.href.split("#")[0];
  return `${base}#${fragment}`;
}

export type RestoredState =
  | { kind: "tour"; doc: TourDoc }
  | { kind: "view"; view: ViewState }
  | { kind: "none" }
  | { kind: "error"; message: string };

/** Parse the location hash back into editor state. */
export function restoreFromFragment(
  hash: string,
  manifest?: DatasetManifest,
): RestoredState {
  const fragment = hash.replace(/^#/, "");
  if (!fragment) return { kind: "none" };
  try {
    if (fragment.startsWith("tour=")) {
      return { kind: "tour", doc: decodeTour(fragment, manifest) };
    }
    if (fragment.startsWith("v=")) {
      return { kind: "view", view: decodeView(fragment, manifest) };
    }
    return { kind: "none" };
  } catch (error) {
    if (error instanceof CodecError) {
      return { kind: "error", message: error.message };
    }
    throw error;
  }
}
