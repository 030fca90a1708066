"""Panoptic symbol spotting on vector floor plans.

Drawings are JSON-lines text: a header line followed by one entity per line.
"""

import json
from pathlib import Path

from ._pancad import (
    InvariantViolation,
    PancadError,
    __version__,
    assemble,
    evaluate_instance,
    evaluate_panoptic,
    evaluate_semantic,
    generate,
    graph_edges,
    gt_boxes,
    infer,
    parse_dxf,
    render_mask_pgm,
    run_cli,
    to_dxf,
    train,
)


def load(path):
    return Path(path).read_text()


def save(drawing, path):
    Path(path).write_text(drawing)


def header(drawing):
    return json.loads(drawing.splitlines()[0])


def entities(drawing):
    """Entity records as dicts, in file order."""
    return [json.loads(line) for line in drawing.splitlines()[1:] if line.strip()]


def labels(drawing):
    """Label index per entity, -1 for background."""
    names = header(drawing)["classes"]
    index = {name: i for i, name in enumerate(names)}
    return [index.get(e.get("label"), -1) for e in entities(drawing)]


__all__ = [
    "InvariantViolation",
    "PancadError",
    "__version__",
    "assemble",
    "entities",
    "evaluate_instance",
    "evaluate_panoptic",
    "evaluate_semantic",
    "generate",
    "graph_edges",
    "gt_boxes",
    "header",
    "infer",
    "labels",
    "load",
    "parse_dxf",
    "render_mask_pgm",
    "run_cli",
    "save",
    "to_dxf",
    "train",
]
