"""Command-line pipeline chaining ingestion, detection, ensembling and stats.

Exit codes: 0 success, 1 usage error (bad flags or inputs that do not
exist), 2 data/validation error, 3 internal error. Diagnostics go to
stderr; artifacts are deterministic (re-running on identical inputs
reproduces identical bytes).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .corpus import corpus_hash, corpus_summary, load_corpus, read_manifest
from .ensemble import (
    EnsembleConfig,
    combine_matrix,
    read_ensemble_config,
    read_predictions,
)
from .errors import DiachronError
from .evaluation import (
    DEFAULT_BINS,
    GoldPrediction,
    compare_methods,
    ece,
    evaluate_gold,
    read_gold,
)
from .io import (
    matrix_csv_rows,
    matrix_to_doc,
    provenance,
    write_csv,
    write_json,
)
from .patterns import (
    DEFAULT_WINDOW,
    MatrixMethod,
    detect_all,
    read_catalog,
    scan_text,
)
from .stats import DEFAULT_EFFECT_GROUP_SIZE, classify_trends, cluster, pca
from .weak_labels import export_labels, generate_labels

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

OUT_DIR_ENV = "DIACHRON_OUT"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the documented contract is 1."""

    def error(self, message: str) -> "None":  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diachron", description=__doc__)
    parser.add_argument("--version", action="version", version=f"diachron {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p: argparse.ArgumentParser, *, catalog: bool = True) -> None:
        p.add_argument("--manifest", required=True, help="corpus manifest JSON")
        if catalog:
            p.add_argument("--catalog", required=True, help="pattern catalog JSON")
        p.add_argument(
            "--out",
            default=os.environ.get(OUT_DIR_ENV, "out"),
            help=f"output directory (default: ${OUT_DIR_ENV} or ./out)",
        )
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="restrict tabular exports to one format (default: both)")

    p = sub.add_parser("ingest", help="tokenize the corpus and cache it")
    add_common(p, catalog=False)

    p = sub.add_parser("detect", help="regex feature matrix")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)

    p = sub.add_parser("labels", help="weak supervision labels (JSONL)")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)

    def add_ensemble_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--neural", help="neural predictions JSONL", default=None)
        p.add_argument("--regex-weight", type=float, default=0.65)
        p.add_argument("--high-conf", type=float, default=0.75)
        p.add_argument("--low-conf", type=float, default=0.25)
        p.add_argument(
            "--ensemble-config",
            default=None,
            help="JSON config for the ensemble; overrides the individual flags",
        )

    p = sub.add_parser("ensemble", help="confidence-weighted combined matrix")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    add_ensemble_opts(p)

    p = sub.add_parser("evaluate", help="agreement, calibration, gold metrics")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--neural", help="neural predictions JSONL", default=None)
    p.add_argument("--gold", help="gold standard JSON", default=None)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)

    p = sub.add_parser("trends", help="per-feature diachronic statistics")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    add_ensemble_opts(p)
    p.add_argument("--effect-group", type=int, default=DEFAULT_EFFECT_GROUP_SIZE,
                   help="texts per end for the standardized mean difference")
    p.add_argument("--cluster-cut", type=int, default=3)

    p = sub.add_parser("report", help="consolidated report + plot data")
    add_common(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    add_ensemble_opts(p)
    p.add_argument("--gold", help="gold standard JSON", default=None)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--effect-group", type=int, default=DEFAULT_EFFECT_GROUP_SIZE)
    p.add_argument("--cluster-cut", type=int, default=3)
    p.add_argument("--seed", type=int, default=0, help="reserved for sampled diagnostics")
    return parser


def _check_inputs_exist(args: argparse.Namespace, parser_prog: str) -> None:
    for flag in ("manifest", "catalog", "neural", "gold", "ensemble_config"):
        path = getattr(args, flag, None)
        if path is not None and not Path(path).exists():
            print(
                f"{parser_prog}: error: --{flag.replace('_', '-')} file does not exist: {path}",
                file=sys.stderr,
            )
            raise SystemExit(EXIT_USAGE)


def _options_dict(args: argparse.Namespace) -> dict:
    skip = {"command", "manifest", "catalog", "neural", "gold", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _ensemble_config(args: argparse.Namespace) -> EnsembleConfig:
    if getattr(args, "ensemble_config", None):
        return read_ensemble_config(args.ensemble_config)
    return EnsembleConfig(
        regex_weight=args.regex_weight,
        high_conf=args.high_conf,
        low_conf=args.low_conf,
    )


def _load_corpus_catalog(args: argparse.Namespace):
    manifest = read_manifest(args.manifest)
    docs = load_corpus(manifest)
    catalog = read_catalog(args.catalog) if getattr(args, "catalog", None) else None
    prov = provenance(
        catalog.version if catalog else None,
        corpus_hash(docs),
        _options_dict(args),
    )
    return docs, catalog, prov


def _write_matrix(out: Path, stem: str, matrix, prov: dict, fmt: Optional[str]) -> None:
    if fmt in (None, "csv"):
        header, rows = matrix_csv_rows(matrix)
        write_csv(out / f"{stem}.csv", header, rows, prov)
    if fmt in (None, "json"):
        write_json(out / f"{stem}.json", {"provenance": prov, **matrix_to_doc(matrix)})


def cmd_ingest(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    docs = load_corpus(manifest)
    prov = provenance(None, corpus_hash(docs), _options_dict(args))
    out = Path(args.out)
    cache = {
        "provenance": prov,
        "documents": [
            {
                "id": d.id,
                "title": d.title,
                "period": d.period.value,
                "chrono_index": d.chrono_index,
                "word_count": d.word_count,
                "tokens": [[t.surface, t.byte_span[0], t.byte_span[1]] for t in d.tokens],
            }
            for d in docs
        ],
    }
    write_json(out / "corpus_cache.json", cache)
    write_json(out / "corpus_summary.json", {"provenance": prov, **corpus_summary(docs)})
    logger.info("ingested %d texts, %d words", len(docs), sum(d.word_count for d in docs))
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    matrix = detect_all(docs, catalog, window=args.window)
    _write_matrix(Path(args.out), "regex_matrix", matrix, prov, args.format)
    detections = int(matrix.detected.sum())
    logger.info(
        "detected %d / %d feature-text combinations", detections, matrix.detected.size
    )
    return EXIT_OK


def cmd_labels(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    label_set = generate_labels(docs, catalog, window=args.window)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export_labels(label_set, out / "labels.jsonl")
    logger.info("wrote %d weak labels", len(label_set))
    return EXIT_OK


def _ensemble_result(args: argparse.Namespace, docs, catalog):
    matrix = detect_all(docs, catalog, window=args.window)
    if args.neural is None:
        logger.warning("no neural predictions supplied; ensembling regex-only")
        predictions = []
    else:
        predictions = read_predictions(args.neural)
    categories = {p.feature_id: p.category.value for p in catalog.patterns}
    return matrix, combine_matrix(matrix, predictions, _ensemble_config(args), categories)


def cmd_ensemble(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    regex_matrix, result = _ensemble_result(args, docs, catalog)
    out = Path(args.out)
    _write_matrix(out, "ensemble_matrix", result.matrix, prov, args.format)
    cells_doc = {
        "provenance": prov,
        "high_conf": result.config.high_conf,
        "low_conf": result.config.low_conf,
        "cells": [
            {
                "text_id": c.text_id,
                "feature_id": c.feature_id,
                "f_r": c.f_r,
                "f_t": c.f_t,
                "c": c.c,
                "w_t": c.w_t,
                "w_r": c.w_r,
                "f_ensemble": c.f_ensemble,
                "detected": c.detected,
                "decision_source": c.decision_source.value,
            }
            for c in result.cells
        ],
    }
    write_json(out / "ensemble_cells.json", cells_doc)
    logger.info(
        "ensemble detections: %d (regex alone: %d)",
        int(result.matrix.detected.sum()),
        int(regex_matrix.detected.sum()),
    )
    return EXIT_OK


def _neural_matrix(args: argparse.Namespace, regex_matrix):
    from .ensemble import predictions_to_matrix

    predictions = read_predictions(args.neural)
    return predictions_to_matrix(predictions, regex_matrix.texts, regex_matrix.features)


def _reliability_rows(report) -> tuple[list[str], list[list]]:
    header = ["bin_lower", "bin_upper", "count", "mean_confidence", "accuracy"]
    rows = [
        [b.lower, b.upper, b.count, b.mean_confidence, b.accuracy]
        for b in report.bins
    ]
    return header, rows


def cmd_evaluate(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    out = Path(args.out)
    regex_matrix = detect_all(docs, catalog, window=args.window)
    doc: dict = {"provenance": prov}
    if args.neural is not None:
        neural_matrix = _neural_matrix(args, regex_matrix)
        agreement_report = compare_methods(regex_matrix, neural_matrix)
        doc["agreement"] = agreement_report.to_doc()
        # Calibration proxy without gold data: a neural confidence counts
        # as "correct" when the two methods agree on detection.
        assert neural_matrix.confidence is not None
        conf = neural_matrix.confidence.ravel()
        correct = (regex_matrix.detected.ravel() == neural_matrix.detected.ravel())
        cal = ece(conf.tolist(), correct.tolist(), bins=args.bins)
        doc["calibration_vs_regex"] = cal.to_doc()
        if args.format in (None, "csv"):
            header, rows = _reliability_rows(cal)
            write_csv(out / "reliability_diagram.csv", header, rows, prov)
    else:
        logger.warning("no neural predictions; skipping agreement and calibration")
    if args.gold is not None:
        gold = read_gold(args.gold)
        predictions = [
            _gold_prediction(ex, catalog, window=args.window) for ex in gold
        ]
        gold_report = evaluate_gold(gold, predictions, bins=args.bins)
        doc["gold"] = gold_report.to_doc()
        if args.format in (None, "csv"):
            header, rows = _reliability_rows(gold_report.calibration)
            write_csv(out / "gold_reliability_diagram.csv", header, rows, prov)
    write_json(out / "evaluation_report.json", doc)
    return EXIT_OK


def _gold_prediction(example, catalog, window: int) -> GoldPrediction:
    """Scan a gold example's context and collect detected features."""
    from .corpus import TextDocument, normalize, tokenize
    from .corpus import PeriodId

    doc = TextDocument(
        id="gold",
        title="gold context",
        period=PeriodId.EARLY_VEDIC,
        chrono_index=0,
        raw=example.context,
        tokens=tokenize(normalize(example.context)),
    )
    detected: set[str] = set()
    confidences = []
    for pattern in catalog.patterns:
        matches = scan_text(doc, pattern, window=window)
        if matches:
            detected.add(pattern.feature_id)
            confidences.extend(m.confidence for m in matches)
    confidence = float(np.mean(confidences)) if confidences else 0.0
    return GoldPrediction(features=frozenset(detected), confidence=confidence)


def _trend_artifacts(args: argparse.Namespace, docs, catalog, prov: dict, out: Path) -> dict:
    regex_matrix, result = _ensemble_result(args, docs, catalog)
    matrix = result.matrix if args.neural is not None else regex_matrix
    trends = classify_trends(matrix, effect_group_size=args.effect_group)
    trend_rows = [t.to_row() for t in trends]
    if args.format in (None, "csv"):
        header = list(trend_rows[0].keys()) if trend_rows else []
        write_csv(
            out / "trend_stats.csv",
            header,
            [[r[k] for k in header] for r in trend_rows],
            prov,
        )
    write_json(out / "trend_stats.json", {"provenance": prov, "features": trend_rows})

    pca_result = pca(matrix)
    write_json(
        out / "pca.json",
        {
            "provenance": prov,
            "explained_variance_ratio": pca_result.explained_variance_ratio.tolist(),
            "eigenvalues": pca_result.eigenvalues.tolist(),
            "feature_ids": pca_result.feature_ids,
            "dropped_features": pca_result.dropped_features,
            "loadings": pca_result.loadings.tolist(),
            "scores": pca_result.scores.tolist(),
            "scree": [
                {"component": i + 1, "ratio": float(r)}
                for i, r in enumerate(pca_result.explained_variance_ratio)
            ],
        },
    )
    tree = cluster(matrix)
    k = min(args.cluster_cut, tree.n_leaves)
    write_json(
        out / "clusters.json",
        {
            "provenance": prov,
            "text_ids": tree.text_ids,
            "merges": [
                {"left": m.left, "right": m.right, "height": m.height, "size": m.size}
                for m in tree.merges
            ],
            "cut_k": k,
            "labels": tree.cut(k),
        },
    )
    if args.format in (None, "csv"):
        header = ["feature_id", "text_id", "chrono_index", "frequency"]
        rows = [
            [fid, tid, j, float(matrix.freq[i, j])]
            for i, fid in enumerate(matrix.features)
            for j, tid in enumerate(matrix.texts)
        ]
        write_csv(out / "trend_series.csv", header, rows, prov)
    return {
        "trends": trend_rows,
        "matrix_method": matrix.method.value,
        "regex_matrix": regex_matrix,
        "ensemble_result": result,
    }


def cmd_trends(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    _trend_artifacts(args, docs, catalog, prov, Path(args.out))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    docs, catalog, prov = _load_corpus_catalog(args)
    assert catalog is not None
    out = Path(args.out)
    artifacts = _trend_artifacts(args, docs, catalog, prov, out)
    regex_matrix = artifacts["regex_matrix"]
    result = artifacts["ensemble_result"]
    neural_matrix = None
    if args.neural is not None:
        neural_matrix = _neural_matrix(args, regex_matrix)

    # Period-level detection rates (plot data for detection-rate bars).
    period_rows = []
    by_period: dict[str, list[int]] = {}
    for j, d in enumerate(docs):
        by_period.setdefault(d.period.value, []).append(j)
    for period, cols in by_period.items():
        n_checks = len(cols) * len(regex_matrix.features)
        regex_det = int(regex_matrix.detected[:, cols].sum())
        ens_det = int(result.matrix.detected[:, cols].sum())
        row = {
            "period": period,
            "checks": n_checks,
            "regex_detections": regex_det,
            "ensemble_detections": ens_det,
            "regex_rate": regex_det / n_checks if n_checks else 0.0,
            "ensemble_rate": ens_det / n_checks if n_checks else 0.0,
        }
        if neural_matrix is not None:
            neural_det = int(neural_matrix.detected[:, cols].sum())
            agreement_report = compare_methods(
                _slice_matrix(regex_matrix, cols), _slice_matrix(neural_matrix, cols)
            )
            row["neural_detections"] = neural_det
            row["neural_rate"] = neural_det / n_checks if n_checks else 0.0
            row["agreement_rate"] = agreement_report.agreement_rate
        period_rows.append(row)
    if args.format in (None, "csv") and period_rows:
        header = list(period_rows[0].keys())
        write_csv(
            out / "period_detection_rates.csv",
            header,
            [[r.get(k) for k in header] for r in period_rows],
            prov,
        )

    doc: dict = {
        "provenance": prov,
        "summary": corpus_summary(docs),
        "catalog": {
            "version": catalog.version,
            "features": len(catalog.patterns),
            "category_counts": catalog.category_counts,
        },
        "detections": {
            "checks": int(regex_matrix.detected.size),
            "regex": int(regex_matrix.detected.sum()),
            "ensemble": int(result.matrix.detected.sum()),
        },
        "periods": period_rows,
        "trends": artifacts["trends"],
    }
    if neural_matrix is not None:
        doc["detections"]["neural"] = int(neural_matrix.detected.sum())
        agreement_report = compare_methods(regex_matrix, neural_matrix)
        doc["agreement"] = agreement_report.to_doc()
        assert neural_matrix.confidence is not None
        cal = ece(
            neural_matrix.confidence.ravel().tolist(),
            (regex_matrix.detected.ravel() == neural_matrix.detected.ravel()).tolist(),
            bins=args.bins,
        )
        doc["calibration_vs_regex"] = cal.to_doc()
        if args.format in (None, "csv"):
            header, rows = _reliability_rows(cal)
            write_csv(out / "reliability_diagram.csv", header, rows, prov)
    if args.gold is not None:
        gold = read_gold(args.gold)
        predictions = [_gold_prediction(ex, catalog, window=args.window) for ex in gold]
        doc["gold"] = evaluate_gold(gold, predictions, bins=args.bins).to_doc()
    write_json(out / "report.json", doc)
    return EXIT_OK


def _slice_matrix(matrix, cols: list[int]):
    from .patterns import FeatureMatrix

    return FeatureMatrix(
        method=matrix.method,
        texts=[matrix.texts[j] for j in cols],
        features=list(matrix.features),
        freq=matrix.freq[:, cols],
        detected=matrix.detected[:, cols],
        counts=None if matrix.counts is None else matrix.counts[:, cols],
        confidence=None if matrix.confidence is None else matrix.confidence[:, cols],
    )


_COMMANDS = {
    "ingest": cmd_ingest,
    "detect": cmd_detect,
    "labels": cmd_labels,
    "ensemble": cmd_ensemble,
    "evaluate": cmd_evaluate,
    "trends": cmd_trends,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="diachron: %(levelname)s: %(message)s",
    )
    parser = _build_parser()
    args = parser.parse_args(argv)
    _check_inputs_exist(args, parser.prog)
    try:
        return _COMMANDS[args.command](args)
    except DiachronError as exc:
        print(f"diachron {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError) as exc:
        print(f"diachron {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"diachron {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
