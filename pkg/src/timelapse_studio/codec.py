"""Canonical tour documents and shareable URL fragments.

Document schema, version 1:

    {
      "version": 1,
      "dataset": "<name>",
      "kind": "tour" | "slideshow",
      "keyframes": [{"id", "cx", "cy", "scale", "frame", "desc"}, ...],
      "transitions": [{"kind", "value", "loops"}, ...]
    }

Canonical bytes: UTF-8, keys sorted lexicographically at every object
level, no insignificant whitespace, integral reals written as integers
and the rest as shortest round-trip decimals.  Two value-equal tours
always canonicalize to identical bytes, so the URL fragment
``tour=<base64url(bytes) without padding>`` is stable and comparable.

A single view deep-links as ``v=<cx>,<cy>,<scale>&t=<frame>``.
"""

from __future__ import annotations

import base64
import binascii
import json
import math
import re

from .errors import (
    DecodeError,
    InvalidArgumentError,
    UnsupportedVersionError,
    ValidationError,
)
from .pyramid import DatasetManifest
from .tours import Keyframe, Tour, Transition, View, validate_view

SCHEMA_VERSION = 1

TOUR_PREFIX = "tour="

_VIEW_RE = re.compile(r"^v=([^,&]+),([^,&]+),([^,&]+)&t=([^&]+)$")


def format_real(value: float) -> str:
    """Shortest decimal that round-trips; integral values drop the '.0'."""
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"cannot encode non-finite number {value}")
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _canonical_numbers(node):
    if isinstance(node, dict):
        return {key: _canonical_numbers(value) for key, value in node.items()}
    if isinstance(node, (list, tuple)):
        return [_canonical_numbers(item) for item in node]
    if isinstance(node, float):
        if not math.isfinite(node):
            raise InvalidArgumentError(f"cannot encode non-finite number {node}")
        if node.is_integer():
            return int(node)
    return node


def canonical_bytes(document) -> bytes:
    """Serialize a JSON-shaped value to its canonical UTF-8 byte form."""
    return json.dumps(
        _canonical_numbers(document),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    ).encode("utf-8")


def tour_to_document(tour: Tour) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "dataset": tour.dataset,
        "kind": tour.kind,
        "keyframes": [
            {
                "id": kf.id,
                "cx": kf.view.cx,
                "cy": kf.view.cy,
                "scale": kf.view.scale,
                "frame": kf.view.frame,
                "desc": kf.description,
            }
            for kf in tour.keyframes
        ],
        "transitions": [
            {"kind": t.kind, "value": t.value, "loops": t.loops}
            for t in tour.transitions
        ],
    }


def _require(doc: dict, field: str, kinds, where: str = "document"):
    if field not in doc:
        raise ValidationError(f"{where} is missing field {field!r}")
    value = doc[field]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ValidationError(f"{where} field {field!r} has the wrong type")
    return value


def document_to_tour(doc, manifest: DatasetManifest | None = None) -> Tour:
    """Parse and fully validate a version-1 tour document."""
    if not isinstance(doc, dict):
        raise ValidationError("document must be a JSON object")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise UnsupportedVersionError(f"unsupported document version {version!r}")
    dataset = _require(doc, "dataset", str)
    kind = _require(doc, "kind", str)
    raw_keyframes = _require(doc, "keyframes", list)
    raw_transitions = _require(doc, "transitions", list)

    keyframes = []
    for i, item in enumerate(raw_keyframes):
        where = f"keyframes[{i}]"
        if not isinstance(item, dict):
            raise ValidationError(f"{where} must be an object")
        try:
            view = View(
                cx=_require(item, "cx", (int, float), where),
                cy=_require(item, "cy", (int, float), where),
                scale=_require(item, "scale", (int, float), where),
                frame=_require(item, "frame", (int, float), where),
            )
        except InvalidArgumentError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
        keyframes.append(
            Keyframe(
                id=_require(item, "id", str, where),
                view=view,
                description=_require(item, "desc", str, where),
            )
        )

    transitions = []
    for i, item in enumerate(raw_transitions):
        where = f"transitions[{i}]"
        if not isinstance(item, dict):
            raise ValidationError(f"{where} must be an object")
        try:
            transitions.append(
                Transition(
                    kind=_require(item, "kind", str, where),
                    value=_require(item, "value", (int, float), where),
                    loops=_require(item, "loops", int, where),
                )
            )
        except InvalidArgumentError as exc:
            raise ValidationError(f"{where}: {exc}") from exc

    try:
        tour = Tour(dataset=dataset, kind=kind, keyframes=tuple(keyframes),
                    transitions=tuple(transitions))
    except InvalidArgumentError as exc:
        raise ValidationError(str(exc)) from exc
    if manifest is not None:
        if manifest.name != dataset:
            raise ValidationError(
                f"dataset {dataset!r} does not match manifest {manifest.name!r}"
            )
        for i, kf in enumerate(tour.keyframes):
            try:
                validate_view(kf.view, manifest)
            except InvalidArgumentError as exc:
                raise ValidationError(f"keyframes[{i}]: {exc}") from exc
    return tour


def _b64encode(payload: bytes) -> str:
    return base64.urlsafe_b64encode(payload).rstrip(b"=").decode("ascii")


def _b64decode(text: str) -> bytes:
    padding = -len(text) % 4
    try:
        return base64.urlsafe_b64decode(text + "=" * padding)
    except (binascii.Error, ValueError) as exc:
        raise DecodeError(f"malformed base64 payload: {exc}") from exc


def encode_tour(tour: Tour) -> str:
    """URL hash fragment carrying the whole tour."""
    return TOUR_PREFIX + _b64encode(canonical_bytes(tour_to_document(tour)))


def decode_tour(fragment: str, manifest: DatasetManifest | None = None) -> Tour:
    if not fragment.startswith(TOUR_PREFIX):
        raise DecodeError(f"fragment does not start with {TOUR_PREFIX!r}")
    payload = _b64decode(fragment[len(TOUR_PREFIX):])
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecodeError(f"fragment payload is not valid JSON: {exc}") from exc
    return document_to_tour(doc, manifest)


def encode_view(view: View) -> str:
    return (
        f"v={format_real(view.cx)},{format_real(view.cy)},"
        f"{format_real(view.scale)}&t={format_real(view.frame)}"
    )


def decode_view(fragment: str, manifest: DatasetManifest | None = None) -> View:
    match = _VIEW_RE.match(fragment)
    if match is None:
        raise DecodeError(f"view fragment {fragment!r} does not match v=cx,cy,scale&t=frame")
    try:
        numbers = [float(group) for group in match.groups()]
    except ValueError as exc:
        raise DecodeError(f"view fragment has a malformed number: {exc}") from exc
    try:
        view = View(cx=numbers[0], cy=numbers[1], scale=numbers[2], frame=numbers[3])
    except InvalidArgumentError as exc:
        raise DecodeError(str(exc)) from exc
    if manifest is not None:
        try:
            validate_view(view, manifest)
        except InvalidArgumentError as exc:
            raise DecodeError(str(exc)) from exc
    return view
