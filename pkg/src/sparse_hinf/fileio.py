"""JSON file formats for plants, controllers and patterns.

Both documents carry a ``"format": 1`` field.  Plant files hold the nine
named matrices as row-major nested arrays plus a domain tag; missing
D-blocks default to zero matrices of the inferred size.  Controller files
hold the tap list (losslessly, via Python's shortest round-trip float
representation) plus an optional pattern and certificate summary.
"""

from __future__ import annotations

import json

import numpy as np

from .fir import FirController, SparsityPattern
from .lti import GeneralizedPlant

FORMAT_VERSION = 1


def _matrix(doc, key, rows, cols, default_zero=False):
    if key not in doc:
        if default_zero:
            return np.zeros((rows, cols))
        raise KeyError(f"plant file is missing field {key!r}")
    M = np.atleast_2d(np.asarray(doc[key], dtype=float))
    return M


def plant_to_dict(plant: GeneralizedPlant) -> dict:
    d = plant.dims
    return {
        "format": FORMAT_VERSION,
        "domain": "discrete" if plant.is_discrete else "continuous",
        "ts": plant.ts,
        "dims": d,
        "A": plant.A.tolist(), "B1": plant.B1.tolist(), "B2": plant.B2.tolist(),
        "C1": plant.C1.tolist(), "C2": plant.C2.tolist(),
        "D11": plant.D11.tolist(), "D12": plant.D12.tolist(),
        "D21": plant.D21.tolist(), "D22": plant.D22.tolist(),
    }


def plant_from_dict(doc: dict) -> GeneralizedPlant:
    if doc.get("format") != FORMAT_VERSION:
        raise ValueError(f"unsupported plant file format {doc.get('format')!r}")
    domain = doc.get("domain")
    if domain not in ("continuous", "discrete"):
        raise ValueError(f"domain must be 'continuous' or 'discrete', got {domain!r}")
    ts = doc.get("ts")
    if domain == "discrete" and (ts is None or not ts > 0):
        raise ValueError("discrete plant files need a positive 'ts'")
    if domain == "continuous":
        ts = None
    A = np.atleast_2d(np.asarray(doc["A"], dtype=float))
    B1 = np.atleast_2d(np.asarray(doc["B1"], dtype=float))
    B2 = np.atleast_2d(np.asarray(doc["B2"], dtype=float))
    C1 = np.atleast_2d(np.asarray(doc["C1"], dtype=float))
    C2 = np.atleast_2d(np.asarray(doc["C2"], dtype=float))
    nz, nw = C1.shape[0], B1.shape[1]
    ny, nu = C2.shape[0], B2.shape[1]
    D11 = _matrix(doc, "D11", nz, nw, default_zero=True)
    D12 = _matrix(doc, "D12", nz, nu, default_zero=True)
    D21 = _matrix(doc, "D21", ny, nw, default_zero=True)
    D22 = _matrix(doc, "D22", ny, nu, default_zero=True)
    return GeneralizedPlant(A, B1, B2, C1, C2, D11, D12, D21, D22, ts=ts)


def load_plant(path) -> GeneralizedPlant:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    return plant_from_dict(doc)


def save_plant(plant: GeneralizedPlant, path):
    with open(path, "w") as fh:
        json.dump(plant_to_dict(plant), fh, indent=1)
        fh.write("\n")


def controller_to_dict(K: FirController, pattern: SparsityPattern | None = None,
                       certificate: dict | None = None) -> dict:
    doc = {
        "format": FORMAT_VERSION,
        "n_f": K.n_taps,
        "ts": K.ts,
        "taps": [t.tolist() for t in K.taps],
    }
    if pattern is not None:
        doc["pattern"] = pattern.S.astype(int).tolist()
    if certificate is not None:
        doc["certificate"] = {
            "mu": float(certificate["mu"]),
            "min_eig_F": float(certificate["min_eig_F"]),
            "closed_loop_norm": float(certificate["closed_loop_norm"]),
        }
    return doc


def controller_from_dict(doc: dict) -> FirController:
    if doc.get("format") != FORMAT_VERSION:
        raise ValueError(f"unsupported controller file format {doc.get('format')!r}")
    taps = tuple(np.atleast_2d(np.asarray(t, dtype=float)) for t in doc["taps"])
    if len(taps) != int(doc["n_f"]):
        raise ValueError("controller file n_f does not match its tap count")
    return FirController(taps, ts=float(doc["ts"]))


def load_controller(path) -> FirController:
    with open(path) as fh:
        doc = json.load(fh)
    return controller_from_dict(doc)


def save_controller(K: FirController, path, pattern: SparsityPattern | None = None,
                    certificate: dict | None = None):
    with open(path, "w") as fh:
        json.dump(controller_to_dict(K, pattern, certificate), fh, indent=1)
        fh.write("\n")


def load_pattern(path) -> SparsityPattern:
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        return SparsityPattern(np.asarray(doc["pattern"], dtype=float))
    return SparsityPattern(np.asarray(doc, dtype=float))


def save_pattern(S: SparsityPattern, path):
    with open(path, "w") as fh:
        json.dump({"format": FORMAT_VERSION, "pattern": S.S.astype(int).tolist()}, fh, indent=1)
        fh.write("\n")
