"""Result files: binary state dump, iteration trace, line slices and run summary.

State dump layout (all little-endian)::

    8 bytes   magic b"SPINBEC1"
    uint32    length L of the JSON header
    L bytes   UTF-8 JSON header (version, F, d, bounds, n, M, energy, grad_norm)
    payload   float64 (re, im) pairs of phi_l(x_j), component l=F first, row-major grid

The payload holds physical values ``phi``, not the quadrature-scaled state.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .spectral_grid import Grid
from .spin_model import levels

MAGIC = b"SPINBEC1"
FORMAT_VERSION = 1
TRACE_COLUMNS = ("iter", "level", "phase", "energy", "gradnorm", "sigma")


@dataclass
class StateDump:
    F: int
    grid: Grid
    M: float
    energy: float
    grad_norm: float
    phi: np.ndarray

    def header(self) -> dict:
        return {"version": FORMAT_VERSION, "F": self.F, "d": self.grid.d,
                "bounds": [list(b) for b in self.grid.bounds], "n": list(self.grid.n),
                "M": self.M, "energy": self.energy, "grad_norm": self.grad_norm}

    def mass(self) -> float:
        return float(np.sum(np.abs(self.phi) ** 2) * self.grid.cell_volume)

    def magnetization(self) -> float:
        w = np.sum(np.abs(self.phi.reshape(2 * self.F + 1, -1)) ** 2, axis=1)
        return float(np.dot(levels(self.F), w) * self.grid.cell_volume)

    @classmethod
    def from_state(cls, X, grid, F, M, energy, grad_norm):
        return cls(F, grid, float(M), float(energy), float(grad_norm),
                   np.asarray(X) / math.sqrt(grid.cell_volume))

    def to_state(self) -> np.ndarray:
        return self.phi * math.sqrt(self.grid.cell_volume)


def write_state_dump(path, dump: StateDump) -> None:
    head = json.dumps(dump.header(), sort_keys=True).encode("utf-8")
    pairs = np.empty(dump.phi.shape + (2,), dtype="<f8")
    pairs[..., 0] = dump.phi.real
    pairs[..., 1] = dump.phi.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(head)))
        fh.write(head)
        fh.write(pairs.tobytes(order="C"))


def read_state_dump(path) -> StateDump:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ConfigurationError(f"{path}: not a state dump")
    (hlen,) = struct.unpack("<I", raw[8:12])
    head = json.loads(raw[12:12 + hlen].decode("utf-8"))
    if head.get("version") != FORMAT_VERSION:
        raise ConfigurationError(f"{path}: unsupported dump version {head.get('version')}")
    grid = Grid(tuple(tuple(b) for b in head["bounds"]), tuple(head["n"]))
    F = int(head["F"])
    shape = (2 * F + 1,) + grid.shape
    data = np.frombuffer(raw[12 + hlen:], dtype="<f8")
    if data.size != 2 * int(np.prod(shape)):
        raise ConfigurationError(f"{path}: payload has {data.size} floats, expected {2 * np.prod(shape)}")
    data = data.reshape(shape + (2,))
    return StateDump(F, grid, head["M"], head["energy"], head["grad_norm"],
                     data[..., 0] + 1j * data[..., 1])


def _fmt(x) -> str:
    return repr(float(x))


def write_trace(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in records:
            w.writerow([r.iter, r.level, r.phase, _fmt(r.energy), _fmt(r.grad_norm), _fmt(r.sigma)])


def _component_labels(F):
    return [f"abs_phi_{int(l)}" for l in levels(F)]


def center_lines(dump: StateDump) -> list:
    """``(axis name, coordinates, |phi_l| along that axis)`` through the box center.

    For 3D the lines lie in the plane through the center of the last axis.
    """
    grid = dump.grid
    mid = [k // 2 for k in grid.n]
    out = []
    for ax, name in zip(range(min(grid.d, 2)), "xy"):
        index = [slice(None)] + [m for m in mid]
        index[ax + 1] = slice(None)
        out.append((name, grid.axes[ax], np.abs(dump.phi[tuple(index)])))
    return out


def write_slice(path, dump: StateDump) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line", "coord"] + _component_labels(dump.F))
        for name, coords, vals in center_lines(dump):
            for j, x in enumerate(coords):
                w.writerow([name, _fmt(x)] + [_fmt(v) for v in vals[:, j]])


def write_plane(path, dump: StateDump) -> None:
    """``|phi_l|`` on the whole 2D grid, or on the central plane of the last axis in 3D."""
    grid = dump.grid
    if grid.d == 1:
        raise ConfigurationError("plane export needs a 2D or 3D grid")
    phi = np.abs(dump.phi if grid.d == 2 else dump.phi[..., grid.n[2] // 2])
    x, y = grid.axes[0], grid.axes[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"] + _component_labels(dump.F))
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                w.writerow([_fmt(xi), _fmt(yj)] + [_fmt(v) for v in phi[:, i, j]])


def write_summary(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
