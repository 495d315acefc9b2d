"""Parameter-plane rasters: escape-rate fields, Laplacian mass, loci and export."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import WindowMismatch
from .escape_green import RASTER_CAP, coeff_array
from .poly_core import Family, TPoly

KINDS = ("green", "mass-density", "indicator")


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("window needs at least 2x2 pixels")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window bounds are not increasing")
        hx = (self.re_max - self.re_min) / self.nx
        hy = (self.im_max - self.im_min) / self.ny
        if abs(hx - hy) > 1e-12 * max(1.0, hx):
            raise ValueError(f"pixels are not square: {hx} vs {hy}")

    @classmethod
    def centered(cls, center: complex, half_width: float, n: int, aspect: float = 1.0) -> "Window":
        """Square-pixel window of n columns around ``center``; ``aspect`` = height/width."""
        c = complex(center)
        ny = max(2, int(round(n * aspect)))
        half_h = half_width * ny / n
        return cls(c.real - half_width, c.real + half_width, c.imag - half_h, c.imag + half_h, n, ny)

    @classmethod
    def parse(cls, text: str, nx: int, ny: int | None = None) -> "Window":
        """'re_min,re_max,im_min,im_max' with ny derived from the aspect when omitted."""
        a, b, c, d = (float(x) for x in text.split(","))
        if ny is None:
            ny = max(2, int(round(nx * (d - c) / (b - a))))
        return cls(a, b, c, d, nx, ny)

    @property
    def h(self) -> float:
        return (self.re_max - self.re_min) / self.nx

    @property
    def re_axis(self) -> np.ndarray:
        return self.re_min + (np.arange(self.nx) + 0.5) * self.h

    @property
    def im_axis(self) -> np.ndarray:
        return self.im_min + (np.arange(self.ny) + 0.5) * self.h

    def grid(self) -> np.ndarray:
        """Pixel-center parameters, shape (ny, nx), row 0 at im_min."""
        return self.re_axis[None, :] + 1j * self.im_axis[:, None]

    def contains(self, t: complex) -> bool:
        return self.re_min <= t.real <= self.re_max and self.im_min <= t.imag <= self.im_max

    def pixel_of(self, t: complex) -> tuple:
        """(iy, ix) of the pixel containing t."""
        ix = int(math.floor((t.real - self.re_min) / self.h))
        iy = int(math.floor((t.imag - self.im_min) / self.h))
        return min(max(iy, 0), self.ny - 1), min(max(ix, 0), self.nx - 1)

    def refined(self, factor: int = 2) -> "Window":
        return Window(self.re_min, self.re_max, self.im_min, self.im_max,
                      self.nx * factor, self.ny * factor)

    def to_json(self) -> dict:
        return {"re_min": self.re_min, "re_max": self.re_max, "im_min": self.im_min,
                "im_max": self.im_max, "nx": self.nx, "ny": self.ny}


@dataclass(frozen=True)
class ScalarField:
    """Values indexed ``[iy, ix]`` (shape ny × nx), row 0 at ``im_min``."""

    window: Window
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.values.shape != (self.window.ny, self.window.nx):
            raise ValueError("values shape does not match window")

    def at(self, t: complex) -> float:
        iy, ix = self.window.pixel_of(complex(t))
        return float(self.values[iy, ix])


def _supersampled(render, w: Window, supersample: bool) -> np.ndarray:
    if not supersample:
        return render(w)
    fine = render(w.refined(2))
    return fine.reshape(w.ny, 2, w.nx, 2).mean(axis=(1, 3))


def render_green(fam: Family, a: TPoly, w: Window, cap: int = RASTER_CAP,
                 supersample: bool = False) -> ScalarField:
    """Escape rate G_t(a(t)) at every pixel center."""
    A = coeff_array(a)
    vals = _supersampled(
        lambda win: _kernels.family_escape_grid(fam.matrix, A, win.re_axis, win.im_axis, int(cap)),
        w, supersample)
    return ScalarField(w, vals, "green", {"cap": int(cap)})


def laplacian_mass(v: np.ndarray) -> np.ndarray:
    """Per-cell mass (1/2π)·Δv·h² by the 5-point stencil; the boundary ring is zero.

    The h² cell area cancels the 1/h² of the stencil, so no spacing is needed.
    NaN neighbours (masked pixels) give NaN cells.
    """
    out = np.zeros_like(v, dtype=float)
    out[1:-1, 1:-1] = (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2]
                       - 4.0 * v[1:-1, 1:-1]) / (2.0 * math.pi)
    return out


def bif_measure(fld: ScalarField, check_border: bool = True):
    """Discrete bifurcation measure of a green field; returns (field, total mass)."""
    if fld.kind != "green":
        raise ValueError("bif_measure needs a green field")
    v = fld.values
    if check_border:
        border = np.concatenate([v[0], v[-1], v[:, 0], v[:, -1]])
        if np.any(border[np.isfinite(border)] <= 0):
            warnings.warn("escape rate vanishes on the window border; mass may be lost",
                          RuntimeWarning, stacklevel=2)
    mass = laplacian_mass(v)
    total = float(np.nansum(mass))
    return ScalarField(fld.window, mass, "mass-density", dict(fld.meta)), total


def _indicators(fam: Family, w: Window, cap: int):
    return [render_green(fam, a, w, cap).values == 0 for a in fam.marked]


def connectedness_locus(fam: Family, w: Window, cap: int = RASTER_CAP) -> ScalarField:
    """1 where every marked point stays bounded within ``cap`` iterations."""
    if not fam.critical:
        warnings.warn("marked points are not flagged as the full critical set",
                      RuntimeWarning, stacklevel=2)
    ind = np.logical_and.reduce(_indicators(fam, w, cap))
    return ScalarField(w, ind.astype(float), "indicator", {"cap": int(cap)})


def bounded_fraction(fam: Family, w: Window, cap: int = RASTER_CAP) -> ScalarField:
    """Fraction of marked points with bounded orbit (1 = connectedness locus)."""
    ind = np.mean(np.array(_indicators(fam, w, cap), dtype=float), axis=0)
    return ScalarField(w, ind, "indicator", {"cap": int(cap)})


def field_l1_distance(f1: ScalarField, f2: ScalarField, normalize: bool = True) -> float:
    """Σ|μ₁ - μ₂| over interior cells, optionally after dividing each by its mass."""
    if f1.window != f2.window:
        raise WindowMismatch(f"{f1.window} != {f2.window}")
    a = np.nan_to_num(f1.values[1:-1, 1:-1])
    b = np.nan_to_num(f2.values[1:-1, 1:-1])
    if normalize:
        a = a / a.sum()
        b = b / b.sum()
    return float(np.abs(a - b).sum())


def reflect(fld: ScalarField) -> ScalarField:
    """The field pulled back by t ↦ -t (the window reflects through the origin)."""
    w = fld.window
    rw = Window(-w.re_max, -w.re_min, -w.im_max, -w.im_min, w.nx, w.ny)
    return ScalarField(rw, fld.values[::-1, ::-1].copy(), fld.kind, dict(fld.meta))


# export -------------------------------------------------------------------


def to_gray16(fld: ScalarField) -> np.ndarray:
    """16-bit gray levels, row 0 = top (im_max).

    Indicator fields map bounded (1) to black; green fields map the zero set
    to black and grow to white at the field maximum; mass fields map the
    support to dark.
    """
    v = np.nan_to_num(np.asarray(fld.values, dtype=float))
    if fld.kind == "indicator":
        lev = 1.0 - np.clip(v, 0.0, 1.0)
    elif fld.kind == "green":
        top = v.max()
        lev = v / top if top > 0 else np.zeros_like(v)
    else:
        top = np.abs(v).max()
        lev = 1.0 - (np.abs(v) / top if top > 0 else np.zeros_like(v))
    return np.round(lev * 65535.0).astype(">u2")[::-1]


def write_pgm(fld: ScalarField, path, comment: str = "") -> None:
    gray = to_gray16(fld)
    head = "P5\n"
    if comment:
        head += "".join(f"# {line}\n" for line in comment.splitlines())
    head += f"{fld.window.nx} {fld.window.ny}\n65535\n"
    with open(path, "wb") as fh:
        fh.write(head.encode("ascii"))
        fh.write(gray.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end].decode())
        pos = end
    pos += 1
    nx, ny = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos:pos + 2 * nx * ny], dtype=">u2").reshape(ny, nx)


def write_csv(fld: ScalarField, path, comment: str = "") -> None:
    g = fld.window.grid()
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("re,im,value\n")
        for t, v in zip(g.ravel(), fld.values.ravel()):
            fh.write(f"{t.real:.17g},{t.imag:.17g},{v:.17g}\n")


def sidecar(fld: ScalarField, **extra) -> dict:
    doc = {"window": fld.window.to_json(), "kind": fld.kind, "cap": fld.meta.get("cap")}
    doc.update(extra)
    return doc


def write_sidecar(fld: ScalarField, path, **extra) -> None:
    Path(path).write_text(json.dumps(sidecar(fld, **extra), indent=2, sort_keys=True) + "\n")
