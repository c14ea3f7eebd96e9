"""Catalog of benchmark problems with their reference energies."""

from __future__ import annotations

from dataclasses import dataclass, field

from .energy import PotentialSpec
from .errors import ConfigurationError


@dataclass(frozen=True)
class Preset:
    name: str
    F: int
    bounds: tuple
    n: tuple
    betas: tuple
    potential: PotentialSpec
    magnetizations: tuple
    reference: dict = field(default_factory=dict)
    note: str = ""

    @property
    def d(self) -> int:
        return len(self.n)

    def catalog_line(self) -> str:
        beta = ", ".join(f"{b:g}" for b in self.betas)
        Ms = ", ".join(f"{m:g}" for m in self.magnetizations)
        box = " x ".join(f"[{a:g},{b:g}]" for a, b in self.bounds)
        n = "x".join(str(k) for k in self.n)
        return f"{self.name:16s} F={self.F} d={self.d} beta=({beta}) M=({Ms}) box={box} n={n}"


def _lattice(d, amplitude, period):
    return PotentialSpec((1.0,) * d, (float(amplitude),) * d, (float(period),) * d)


def _build():
    out = []

    def add(name, F, bounds, n, betas, pot, Ms, energies, note=""):
        ref = dict(zip(Ms, energies)) if energies else {}
        out.append(Preset(name, F, tuple(bounds), tuple(n), tuple(betas), pot, tuple(Ms), ref, note))

    spin1_M = (0.0, 0.2, 0.5, 0.9)
    # The period-2 lattice reproduces the tabulated energies; see README.
    add("spin1-2d", 1, [(-16, 16)] * 2, (512,) * 2, (300, 100), _lattice(2, 10, 2), spin1_M,
        (15.1032, 15.1411, 15.3436, 15.9621), "antiferromagnetic")
    add("spin1-3d", 1, [(-16, 16)] * 3, (256,) * 3, (880, -4.1), _lattice(3, 100, 2), spin1_M,
        (55.4362,) * 4, "ferromagnetic")

    spin2_M = (0.0, 0.5, 1.5)
    cases2 = {
        1: ((130.6, -25.4, -125.3), "ferromagnetic"),
        2: ((243.0, 12.1, -13.0), "antiferromagnetic"),
        3: ((183.9, 26.8, 134.7), "cyclic"),
    }
    ref2 = {
        (1, 1): (10.3700,) * 3, (1, 2): (25.6185, 25.7372, 26.8415), (1, 3): (24.1144, 22.9404, 25.4640),
        (2, 1): (9.5754,) * 3, (2, 2): (14.3386, 14.3730, 14.6754), (2, 3): (13.9158, 13.5746, 14.2734),
        (3, 1): (39.0045,) * 3, (3, 2): (46.9770, 47.0301, 47.5117), (3, 3): (46.2917, 45.7403, 46.8619),
    }
    for c, (betas, tag) in cases2.items():
        box1, n1 = ((-8, 8), 256) if c == 1 else ((-16, 16), 512)
        add(f"spin2-1d-case{c}", 2, [box1], (n1,), betas, PotentialSpec((1.0,), (25.0,), (4.0,)),
            spin2_M, ref2[1, c], tag)
        add(f"spin2-2d-case{c}", 2, [(-8, 8)] * 2, (256,) * 2, betas, _lattice(2, 10, 2),
            spin2_M, ref2[2, c], tag)
        box3, n3 = ([(-8, 8), (-16, 16), (-16, 16)], 128) if c == 1 else ([(-16, 16)] * 3, 256)
        add(f"spin2-3d-case{c}", 2, box3, (n3,) * 3, betas, _lattice(3, 100, 2),
            spin2_M, ref2[3, c], tag)

    cases3 = {1: (100.0, 1.0, -10.0, -1.0), 2: (100.0, 1.0, 10.0, 1.0)}
    ref3 = {
        (1, 1): (17.1091, 17.1289, 17.2905), (1, 2): (17.2527, 17.2693, 17.4034),
        (2, 1): (11.7811, 11.7877, 11.8415), (2, 2): (11.8279, 11.8334, 11.8780),
        (3, 1): (42.9028, 42.9115, 42.9825), (3, 2): (42.9752, 42.9822, 43.0399),
    }
    for c, betas in cases3.items():
        add(f"spin3-1d-case{c}", 3, [(-8, 8)], (256,), betas, PotentialSpec((1.0,), (25.0,), (4.0,)),
            spin2_M, ref3[1, c])
        add(f"spin3-2d-case{c}", 3, [(-8, 8)] * 2, (256,) * 2, betas, _lattice(2, 10, 2),
            spin2_M, ref3[2, c])
        add(f"spin3-3d-case{c}", 3, [(-8, 8)] * 3, (128,) * 3, betas, _lattice(3, 100, 2),
            spin2_M, ref3[3, c])
    return {p.name: p for p in out}


PRESETS = _build()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; run 'spinbec presets' for the list") from None


def list_presets() -> str:
    return "\n".join(p.catalog_line() for p in PRESETS.values()) + "\n"
