"""Serialización de modelos a JSON versionado.

Los tensores se guardan como listas de floats en hex (`float.hex`), así la
ida y vuelta es bit-exacta. El documento lleva el NetworkSpec completo para
que `evaluate` nunca tenga que adivinar la topología, más un bloque `extra`
libre (cabeza, estadísticas de normalización, ids de test, etc.).

Los acumuladores del optimizador no se guardan: el modelo serializado es
solo para predicción.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from fcmdnn.errors import ModelFormatError
from fcmdnn.network.params import InputScaler, LayerParams, NetworkParams
from fcmdnn.network.spec import NetworkSpec

MODEL_FORMAT = "fcmdnn-model"
MODEL_VERSION = 1


def encode_array(a: np.ndarray | None) -> dict[str, Any] | None:
    """Arreglo -> {"shape": [...], "hex": [...]} (row-major)."""
    if a is None:
        return None
    arr = np.asarray(a, dtype=np.float64)
    return {"shape": list(arr.shape), "hex": [float.hex(v) for v in arr.ravel().tolist()]}


def decode_array(data: dict[str, Any] | None) -> np.ndarray | None:
    if data is None:
        return None
    try:
        values = np.array([float.fromhex(s) for s in data["hex"]], dtype=np.float64)
        return values.reshape(tuple(int(d) for d in data["shape"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"Tensor mal formado: {exc}") from exc


def params_to_dict(params: NetworkParams, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "spec": params.spec.model_dump(mode="json"),
        "scaler": {
            "kind": params.scaler.kind,
            "shift": encode_array(params.scaler.shift),
            "scale": encode_array(params.scaler.scale),
        },
        "layers": [{"W": encode_array(lp.W), "b": encode_array(lp.b)} for lp in params.layers],
        "extra": extra or {},
    }


def params_from_dict(doc: dict[str, Any]) -> tuple[NetworkParams, dict[str, Any]]:
    """Reconstruye parámetros desde `params_to_dict`.

    Raises:
      ModelFormatError: Formato desconocido, versión incompatible o tensores
        que no coinciden con el spec.
    """
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("El documento no es un modelo fcmdnn.")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"Versión de modelo incompatible: {doc.get('version')} (se soporta {MODEL_VERSION})."
        )
    try:
        spec = NetworkSpec.model_validate(doc["spec"])
        layers_doc = doc["layers"]
        scaler_doc = doc["scaler"]
    except (KeyError, ValidationError) as exc:
        raise ModelFormatError(f"Modelo inválido: {exc}") from exc

    if len(layers_doc) != len(spec.layers):
        raise ModelFormatError("La cantidad de capas no coincide con el spec.")
    layers: list[LayerParams] = []
    for i, (layer, ld) in enumerate(zip(spec.layers, layers_doc)):
        W, b = decode_array(ld.get("W")), decode_array(ld.get("b"))
        expected = (layer.n_pieces, layer.input_width, layer.output_width)
        if W is None or b is None or W.shape != expected or b.shape != (layer.n_pieces, layer.output_width):
            raise ModelFormatError(f"Capa {i}: tensores no coinciden con el spec.")
        layers.append(LayerParams(W=W, b=b))

    scaler = InputScaler(
        kind=scaler_doc.get("kind", "none"),
        shift=decode_array(scaler_doc.get("shift")),
        scale=decode_array(scaler_doc.get("scale")),
    )
    return NetworkParams(spec=spec, layers=layers, scaler=scaler), dict(doc.get("extra") or {})


def save_model(path: str | Path, params: NetworkParams, extra: dict[str, Any] | None = None) -> Path:
    """Escribe el modelo como JSON (claves ordenadas)."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(params_to_dict(params, extra), sort_keys=True) + "\n", encoding="utf-8")
    return p


def load_model(path: str | Path) -> tuple[NetworkParams, dict[str, Any]]:
    """Lee un modelo escrito por `save_model`.

    Raises:
      ModelFormatError: Si el archivo no existe, no es JSON o no es un modelo válido.
    """
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ModelFormatError(f"No existe el modelo: {p}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"Modelo corrupto en {p}: {exc}") from exc
    return params_from_dict(doc)
