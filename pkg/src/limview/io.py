"""Raw float64 + JSON sidecar persistence, PGM previews and CSV reports.

An image ``stem`` is stored as ``stem.f64`` (little-endian float64,
row-major), ``stem.json`` (``{n, extent, vmin, vmax, description}``) and
``stem.pgm`` (binary P5).  Sinograms use ``stem.f64`` + ``stem.json`` with
``{n_a, n_r, s_start, s_end, r_max, curve}``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import FormatError, IoFailure
from .phantom import RasterImage
from .sinogram import Sinogram

_SUFFIXES = {".f64", ".json", ".pgm", ".cfg"}


def _stem(path) -> Path:
    path = Path(path)
    return path.with_name(path.name[:-len(path.suffix)]) if path.suffix in _SUFFIXES else path


def _ext(stem: Path, suffix: str) -> Path:
    # stems may contain dots (e.g. "eps0.2"), so never use Path.with_suffix
    return stem.with_name(stem.name + suffix)


def render_pgm(values: np.ndarray, vmin: float, vmax: float, maxval: int = 65535) -> np.ndarray:
    """Linear map of ``[vmin, vmax]`` onto ``0..maxval`` with clamping.

    A zero-width range renders every pixel at mid-gray.
    """
    if maxval not in (255, 65535):
        raise ValueError("maxval must be 255 or 65535")
    values = np.asarray(values, dtype=np.float64)
    if vmax <= vmin:
        return np.full(values.shape, (maxval + 1) // 2, dtype=np.int64)
    scaled = np.floor((values - vmin) / (vmax - vmin) * maxval + 0.5)
    return np.clip(scaled, 0, maxval).astype(np.int64)


def write_pgm(path, samples: np.ndarray, maxval: int = 65535) -> None:
    h, w = samples.shape
    dtype = ">u2" if maxval > 255 else "u1"
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
            fh.write(samples.astype(dtype).tobytes())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos].decode("ascii"))
    pos += 1
    if fields[0] != "P5":
        raise FormatError(f"{path}: not a binary PGM")
    w, h, maxval = (int(v) for v in fields[1:])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(data, dtype=dtype, count=w * h, offset=pos).reshape(h, w)


def _write_raw(stem: Path, values: np.ndarray, header: dict) -> None:
    try:
        stem.parent.mkdir(parents=True, exist_ok=True)
        np.ascontiguousarray(values, dtype="<f8").tofile(_ext(stem, ".f64"))
        with open(_ext(stem, ".json"), "w", newline="\n") as fh:
            json.dump(header, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _read_raw(stem: Path, count: int) -> np.ndarray:
    raw = _ext(stem, ".f64")
    try:
        size = raw.stat().st_size
        if size != 8 * count:
            raise FormatError(f"{raw}: payload has {size} bytes, header implies {8 * count}")
        return np.fromfile(raw, dtype="<f8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _read_header(stem: Path, keys: Iterable[str]) -> dict:
    try:
        header = json.loads(_ext(stem, ".json").read_text())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{stem}.json: {exc}") from exc
    missing = [k for k in keys if k not in header]
    if missing:
        raise FormatError(f"{stem}.json lacks {', '.join(missing)}")
    return header


def write_image(image: RasterImage, path, render_range: Optional[tuple] = None,
                description: str = "", maxval: int = 65535) -> Path:
    """Write the ``.f64``/``.json``/``.pgm`` triplet and return the stem."""
    stem = _stem(path)
    values = image.values
    if render_range is None:
        render_range = (float(values.min()), float(values.max()))
    vmin, vmax = (float(v) for v in render_range)
    header = {"n": image.n, "extent": image.extent, "vmin": vmin, "vmax": vmax,
              "description": description}
    _write_raw(stem, values, header)
    write_pgm(_ext(stem, ".pgm"), render_pgm(values, vmin, vmax, maxval), maxval)
    return stem


def read_image(path) -> RasterImage:
    stem = _stem(path)
    header = _read_header(stem, ("n", "extent"))
    n = int(header["n"])
    values = _read_raw(stem, n * n).reshape(n, n)
    return RasterImage(values, float(header["extent"]))


def write_sinogram(sino: Sinogram, path) -> Path:
    stem = _stem(path)
    _write_raw(stem, sino.values, sino.header())
    return stem


def read_sinogram(path) -> Sinogram:
    stem = _stem(path)
    header = _read_header(stem, ("n_a", "n_r", "s_start", "s_end", "r_max", "curve"))
    n_a, n_r = int(header["n_a"]), int(header["n_r"])
    if n_a < 2 or n_r < 2:
        raise FormatError(f"{stem}.json: n_a and n_r must be >= 2")
    values = _read_raw(stem, n_a * n_r).reshape(n_a, n_r)
    s_grid = np.linspace(header["s_start"], header["s_end"], n_a)
    r_grid = np.linspace(0.0, header["r_max"], n_r)
    return Sinogram(values, s_grid, r_grid, header["curve"])


def write_csv(path, rows: list[dict], fieldnames: Optional[list] = None) -> None:
    if fieldnames is None:
        fieldnames = []
        for row in rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames, restval="", lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


stem_of = _stem
sibling = _ext
