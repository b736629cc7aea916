"""Serialization: CSV and binary dumps for fields, CSV for profiles."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import GridMismatchError
from .grid import Grid1D, PhaseGrid, PhaseSpaceField

_MAGIC = b"WSPF1\n"


def save_field_csv(field: PhaseSpaceField, path: str | Path) -> None:
    """Write (x, p, value) rows; complex values get re/im columns."""
    x = field.grid.x_grid.points
    p = field.grid.p_grid.points
    X, P = np.meshgrid(x, p, indexing="ij")
    v = field.values
    with open(path, "w") as fh:
        if np.iscomplexobj(v):
            fh.write("x,p,re,im\n")
            for xi, pi, vi in zip(X.ravel(), P.ravel(), v.ravel()):
                fh.write(f"{xi:.17g},{pi:.17g},{vi.real:.17g},{vi.imag:.17g}\n")
        else:
            fh.write("x,p,value\n")
            for xi, pi, vi in zip(X.ravel(), P.ravel(), v.ravel()):
                fh.write(f"{xi:.17g},{pi:.17g},{vi:.17g}\n")


def save_field_binary(field: PhaseSpaceField, path: str | Path) -> None:
    """Column-major binary dump preceded by a one-line JSON header."""
    g = field.grid
    header = {
        "n_x": g.x_grid.n_points, "x_min": g.x_grid.x_min, "x_max": g.x_grid.x_max,
        "n_p": g.p_grid.n_points, "p_min": g.p_grid.x_min, "p_max": g.p_grid.x_max,
        "hbar": g.hbar,
        "dtype": "complex128" if np.iscomplexobj(field.values) else "float64",
        "layout": "column-major",
    }
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write((json.dumps(header) + "\n").encode())
        fh.write(np.asarray(field.values, order="F").tobytes(order="F"))


def load_field_binary(path: str | Path) -> PhaseSpaceField:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise GridMismatchError(f"{path}: not a field dump")
        header = json.loads(fh.readline().decode())
        raw = fh.read()
    xg = Grid1D(header["x_min"], header["x_max"], header["n_x"], header["hbar"])
    pg = Grid1D(header["p_min"], header["p_max"], header["n_p"], header["hbar"])
    vals = np.frombuffer(raw, dtype=header["dtype"]).reshape(
        (header["n_x"], header["n_p"]), order="F")
    return PhaseSpaceField(PhaseGrid(xg, pg), vals.copy())


def save_profile_csv(p: np.ndarray, g: np.ndarray, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("p,g\n")
        for pi, gi in zip(p, g):
            fh.write(f"{pi:.17g},{gi:.17g}\n")


def load_profile_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data[:, 0], data[:, 1]


def save_json(obj: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
