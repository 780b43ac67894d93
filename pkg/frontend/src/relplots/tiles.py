"""Tile-set loading and validation against the published schemas."""

from __future__ import annotations

import csv
import json
import os

import jsonschema

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")


class TileError(ValueError):
    """Schema violation, empty tile set, or out-of-region samples."""


def _schema(name: str):
    with open(os.path.join(SCHEMA_DIR, name)) as fh:
        return json.load(fh)


class TileSet:
    """Locus samples plus region and generation metadata."""

    def __init__(self, kind, region, samples, metadata=None, stats=None):
        self.kind = kind
        self.region = region
        self.samples = samples
        self.metadata = metadata or {}
        self.stats = stats or {}
        if not samples:
            raise TileError("empty tile set")
        re0, re1, im0, im1 = (region[k] for k in ("re0", "re1", "im0", "im1"))
        slack_re = 0.05 * (re1 - re0)
        slack_im = 0.05 * (im1 - im0)
        for s in samples:
            if not (re0 - slack_re <= s["re"] <= re1 + slack_re):
                raise TileError(f"sample at {s['re']}+{s['im']}i outside the declared region")
            if not (im0 - slack_im <= s["im"] <= im1 + slack_im):
                raise TileError(f"sample at {s['re']}+{s['im']}i outside the declared region")

    @staticmethod
    def load(path: str) -> "TileSet":
        if path.endswith(".csv"):
            return TileSet._load_csv(path)
        with open(path) as fh:
            data = json.load(fh)
        try:
            jsonschema.validate(data, _schema("tiles.json"))
        except jsonschema.ValidationError as exc:
            raise TileError(f"tile file {path} fails the schema: {exc.message}") from exc
        return TileSet(
            data["kind"],
            data["region"],
            data["samples"],
            data.get("metadata"),
            data.get("stats"),
        )

    @staticmethod
    def _load_csv(path: str) -> "TileSet":
        samples = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["re", "im", "class", "witness", "residual"]
            if reader.fieldnames != expected:
                raise TileError(f"CSV header must be {','.join(expected)}")
            for row in reader:
                try:
                    samples.append(
                        {
                            "re": float(row["re"]),
                            "im": float(row["im"]),
                            "class": row["class"],
                            "witness": row["witness"],
                            "residual": float(row["residual"]) if row["residual"] else None,
                        }
                    )
                except ValueError as exc:
                    raise TileError(f"bad CSV row {row}: {exc}") from exc
        if not samples:
            raise TileError("empty tile set")
        kind = "zero-atlas" if any(s["class"] == "zero" for s in samples) else "activity-scan"
        lo = min(min(s["re"] for s in samples), -1.0)
        hi = max(max(s["re"] for s in samples), 1.0)
        lo_i = min(min(s["im"] for s in samples), -1.0)
        hi_i = max(max(s["im"] for s in samples), 1.0)
        region = {"re0": lo, "re1": hi, "im0": lo_i, "im1": hi_i}
        return TileSet(kind, region, samples)


def load_curve(path: str) -> dict:
    """Pentagon curve samples (schema relpoly-curve-v1)."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        jsonschema.validate(data, _schema("curve.json"))
    except jsonschema.ValidationError as exc:
        raise TileError(f"curve file {path} fails the schema: {exc.message}") from exc
    if not data["samples"]:
        raise TileError("empty curve")
    return data
