"""Weight file: one JSON document with decimal-string numbers and a checksum.

Every float is written as its shortest round-trip ``repr`` so a reload gives
bit-identical arrays (including ``inf`` weights of very large instances).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import AffineLayer, Network, audit_architecture

FORMAT_VERSION = 1


class IntegrityError(ValueError):
    """Weight file is corrupt or its checksum does not match."""


def _num(x: float) -> str:
    return repr(float(x))


def layers_to_json(net: Network) -> list[dict]:
    return [
        {
            "activation": layer.activation.value,
            "rows": layer.rows,
            "cols": layer.cols,
            "weights": [_num(v) for v in layer.weights.reshape(-1)],
            "bias": [_num(v) for v in layer.bias],
        }
        for layer in net.layers
    ]


def canonical(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def network_checksum(input_dim: int, layers: list[dict], tags: dict | None) -> str:
    body = {"input_dim": input_dim, "layers": layers, "structure_tags": tags}
    return hashlib.sha256(canonical(body)).hexdigest()


def network_document(net: Network, manifest: dict | None = None) -> dict:
    layers = layers_to_json(net)
    tags = net.structure_tags
    depth, width = audit_architecture(net)
    man = {
        "format_version": FORMAT_VERSION,
        "checksum": network_checksum(net.input_dim, layers, tags),
        "depth": depth,
        "width": width,
    }
    if tags:
        man["digit_checksum"] = tags.get("digit_checksum")
        man["range_source"] = tags.get("range_source")
    man.update(manifest or {})
    return {"input_dim": net.input_dim, "layers": layers, "structure_tags": tags, "manifest": man}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def save_network(net: Network, path: str | Path, manifest: dict | None = None) -> dict:
    doc = network_document(net, manifest)
    Path(path).write_text(dumps(doc))
    return doc


def parse_network(doc: dict, verify: bool = True) -> Network:
    try:
        input_dim = int(doc["input_dim"])
        layer_docs = doc["layers"]
        tags = doc.get("structure_tags")
        if verify:
            expected = doc["manifest"]["checksum"]
            actual = network_checksum(input_dim, layer_docs, tags)
            if actual != expected:
                raise IntegrityError(f"checksum mismatch: file says {expected[:12]}, content is {actual[:12]}")
        layers = []
        for ld in layer_docs:
            rows, cols = int(ld["rows"]), int(ld["cols"])
            w = np.array([float(v) for v in ld["weights"]], dtype=np.float64).reshape(rows, cols)
            b = np.array([float(v) for v in ld["bias"]], dtype=np.float64)
            layers.append(AffineLayer(w, b, ld["activation"]))
        return Network(tuple(layers), input_dim, tags)
    except IntegrityError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed weight document: {exc}") from exc


def load_network(path: str | Path, verify: bool = True) -> tuple[Network, dict]:
    """Read a weight file; returns (network, manifest)."""
    try:
        doc = json.loads(Path(path).read_text())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"{path}: not a valid weight document ({exc})") from exc
    if not isinstance(doc, dict):
        raise IntegrityError(f"{path}: top level must be an object")
    return parse_network(doc, verify), doc.get("manifest", {})
