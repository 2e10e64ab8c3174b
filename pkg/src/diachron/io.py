"""Deterministic export helpers: provenance headers, CSV/JSON writers.

Outputs never embed timestamps, so identical inputs reproduce identical
bytes. Every artifact carries a provenance block: catalog version,
corpus content hash, and a digest of the options that shaped it.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Optional, Sequence

from .patterns import FeatureMatrix


def config_digest(options: dict) -> str:
    canon = json.dumps(options, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def provenance(
    catalog_version: Optional[str],
    corpus_hash: Optional[str],
    options: Optional[dict] = None,
) -> dict:
    return {
        "catalog_version": catalog_version,
        "corpus_hash": corpus_hash,
        "config_digest": config_digest(options or {}),
    }


def provenance_comment(prov: dict) -> str:
    return (
        f"# catalog_version={prov['catalog_version']}"
        f" corpus_hash={prov['corpus_hash']}"
        f" config_digest={prov['config_digest']}"
    )


def write_json(path: Path, doc: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return path


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence], prov: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(provenance_comment(prov) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def matrix_csv_rows(matrix: FeatureMatrix) -> tuple[list[str], list[list]]:
    header = ["feature_id", *matrix.texts]
    rows = [
        [fid, *(float(v) for v in matrix.freq[i, :])]
        for i, fid in enumerate(matrix.features)
    ]
    return header, rows


def matrix_to_doc(matrix: FeatureMatrix) -> dict:
    doc = {
        "method": matrix.method.value,
        "texts": matrix.texts,
        "features": matrix.features,
        "frequencies": [[float(v) for v in row] for row in matrix.freq],
        "detected": [[bool(v) for v in row] for row in matrix.detected],
    }
    if matrix.counts is not None:
        doc["match_counts"] = [[int(v) for v in row] for row in matrix.counts]
    if matrix.confidence is not None:
        doc["confidence"] = [[float(v) for v in row] for row in matrix.confidence]
    return doc
