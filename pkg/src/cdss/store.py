"""Versioned case-base persistence.

One JSON document holds the schema, bin edges, class labels, all cases, and
optionally the fitted retrieval model, so a service restart reproduces the
exact snapshot it last wrote. Writes go through a temp file and an atomic
rename. The format is documented in the README.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional, Union

from .casebase import AttributeSchema, Case, CaseBase
from .errors import CaseBaseIOError, StaleModelError
from .similarity import VdmModel

FORMAT_NAME = "cdss-casebase"
FORMAT_VERSION = 1


def model_to_dict(model: VdmModel) -> dict:
    return {
        "alpha": model.alpha,
        "q": model.q,
        "classes": list(model.classes),
        "train_version": model.train_version,
        "bin_edges": [list(e) for e in model.bin_edges],
        "tables": {
            str(attr): {str(v): list(p) for v, p in rows.items()}
            for attr, rows in model.tables.items()
        },
    }


def model_from_dict(payload: dict) -> VdmModel:
    return VdmModel(
        tables={
            int(attr): {int(v): tuple(p) for v, p in rows.items()}
            for attr, rows in payload["tables"].items()
        },
        classes=tuple(payload["classes"]),
        alpha=payload["alpha"],
        q=payload["q"],
        bin_edges=tuple(tuple(e) for e in payload["bin_edges"]),
        train_version=payload["train_version"],
    )


def case_base_to_dict(cb: CaseBase, model: Optional[VdmModel] = None) -> dict:
    doc = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "version": cb.version,
        "class_labels": {str(c): label for c, label in cb.class_labels.items()},
        "schema": [
            {
                "index": a.index,
                "name": a.name,
                "kind": a.kind,
                "missing_code_is_zero": a.missing_code_is_zero,
                "bin_count": a.bin_count,
            }
            for a in cb.schema
        ],
        "bin_edges": None if cb.bin_edges is None else [list(e) for e in cb.bin_edges],
        "cases": [
            {
                "id": c.id,
                "descriptors": list(c.descriptors),
                "discretized": None if c.discretized is None else list(c.discretized),
                "actions": list(c.actions),
                "diagnosis": c.diagnosis,
            }
            for c in cb.cases
        ],
    }
    if model is not None:
        doc["vdm_model"] = model_to_dict(model)
    return doc


def case_base_from_dict(doc: dict) -> tuple[CaseBase, Optional[VdmModel]]:
    if doc.get("format") != FORMAT_NAME:
        raise CaseBaseIOError(f"not a {FORMAT_NAME} document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise CaseBaseIOError(f"unsupported format_version {doc.get('format_version')!r}")
    try:
        schema = tuple(
            AttributeSchema(
                index=a["index"],
                name=a["name"],
                kind=a["kind"],
                missing_code_is_zero=a["missing_code_is_zero"],
                bin_count=a["bin_count"],
            )
            for a in doc["schema"]
        )
        cases = tuple(
            Case(
                id=c["id"],
                descriptors=tuple(c["descriptors"]),
                discretized=None if c.get("discretized") is None else tuple(c["discretized"]),
                actions=tuple(c.get("actions", ())),
                diagnosis=c.get("diagnosis"),
            )
            for c in doc["cases"]
        )
        cb = CaseBase(
            schema=schema,
            cases=cases,
            class_labels={int(k): v for k, v in doc["class_labels"].items()},
            version=doc["version"],
            bin_edges=None if doc.get("bin_edges") is None
            else tuple(tuple(e) for e in doc["bin_edges"]),
        )
    except (KeyError, TypeError) as exc:
        raise CaseBaseIOError(f"corrupt case-base document: {exc}") from None
    ids = [c.id for c in cb.cases]
    if len(set(ids)) != len(ids):
        raise CaseBaseIOError("corrupt case-base document: duplicate case ids")
    model = model_from_dict(doc["vdm_model"]) if "vdm_model" in doc else None
    if model is not None and model.train_version != cb.version:
        raise StaleModelError(
            f"stored model was fitted on version {model.train_version}, "
            f"case-base is version {cb.version}")
    return cb, model


def save_case_base(
    cb: CaseBase, path: Union[str, Path], model: Optional[VdmModel] = None
):
    """Atomically write the snapshot (temp file + rename)."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(case_base_to_dict(cb, model), fh)
        os.replace(tmp, path)
    except OSError as exc:
        raise CaseBaseIOError(f"cannot write case-base file: {exc}") from None


def load_saved_case_base(path: Union[str, Path]) -> tuple[CaseBase, Optional[VdmModel]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CaseBaseIOError(f"cannot read case-base file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CaseBaseIOError(f"case-base file is not valid JSON: {exc}") from None
    return case_base_from_dict(doc)
