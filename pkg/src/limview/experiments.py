"""Running configured reconstructions and building analysis reports."""

from __future__ import annotations

from pathlib import Path

from . import io
from .analysis import (artifact_amplitude, artifact_sharpness, edge_probe, line_profile,
                       measure_jump, predicted_artifact_circles, sigma0)
from .backprojection import backproject
from .config import EXPERIMENTS, RunConfig, load_config, scale_overrides
from .errors import EmptySampleSet, IoFailure, ProbeOutsideGrid, ValidationError
from .filter import filter_sinogram
from .geometry import Covector
from .phantom import RasterImage, sample_sinogram
from .sinogram import Sinogram
from .window import sample_window

PROBE_ANGLES = (45, 135, 225, 315)


def forward(cfg: RunConfig) -> Sinogram:
    cfg.validate()
    return sample_sinogram(cfg.phantom_obj(), cfg.arc(), cfg.n_a, cfg.n_r, cfg.radial_max())


def reconstruct_config(cfg: RunConfig, sino: Sinogram | None = None, threads: int = 1) -> RasterImage:
    cfg.validate()
    arc = cfg.arc()
    if sino is None:
        sino = forward(cfg)
    elif abs(sino.s_grid[0] - arc.s_start) > 1e-12 or abs(sino.s_grid[-1] - arc.s_end) > 1e-12:
        raise ValidationError("sinogram arc does not match the configured arc")
    filtered = filter_sinogram(sino, cfg.plan())
    weights = sample_window(cfg.window_spec(), sino.s_grid, arc.s_start)
    return backproject(filtered, weights, cfg.grid(), arc.curve, threads=threads)


def write_outputs(cfg: RunConfig, image: RasterImage, out_dir) -> Path:
    """Image triplet, profile CSV and the run's config next to each other."""
    out_dir = Path(out_dir)
    stem = io.write_image(image, out_dir / cfg.label,
                          description=f"{cfg.experiment or 'reconstruct'} {cfg.curve} "
                                      f"arc=[{cfg.s_start:.6g},{cfg.s_end:.6g}] {cfg.window_label}")
    profile = line_profile(image, 0.0)
    io.write_csv(stem.with_name(stem.name + "_profile.csv"),
                 [{"x": float(x), "value": float(v)} for x, v in profile])
    try:
        io.sibling(stem, ".cfg").write_text(cfg.to_text())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return stem


def report_row(cfg: RunConfig, image: RasterImage) -> dict:
    """Jumps, principal-symbol predictions and artifact measures for one image."""
    arc, phantom, window = cfg.arc(), cfg.phantom_obj(), cfg.window_spec()
    row = {"experiment": cfg.experiment, "label": cfg.label, "curve": cfg.curve,
           "s_start": cfg.s_start, "s_end": cfg.s_end, "window": cfg.window,
           "epsilon": "" if cfg.window == "sharp" else cfg.eps,
           "k": 0 if cfg.window == "sharp" else cfg.order}
    for d, disc in enumerate(phantom.discs):
        for angle in PROBE_ANGLES:
            probe = edge_probe(disc, angle, half_width=min(0.06, 0.5 * disc.radius))
            key = f"d{d}_{angle}"
            try:
                row[f"jump_{key}"] = measure_jump(image, probe)
            except ProbeOutsideGrid:
                row[f"jump_{key}"] = ""
            try:
                row[f"sigma0_{key}"] = sigma0(arc, window, Covector(probe.location, probe.normal))
            except ValidationError:
                row[f"sigma0_{key}"] = ""
    for circle in predicted_artifact_circles(phantom, arc):
        key = f"{circle.endpoint}_r{circle.radius:.3f}"
        try:
            row[f"artifact_{key}"] = artifact_amplitude(image, circle, phantom, curve=arc.curve)
            row[f"sharpness_{key}"] = artifact_sharpness(image, circle, phantom, curve=arc.curve)
        except EmptySampleSet:
            row[f"artifact_{key}"] = row[f"sharpness_{key}"] = ""
    return row


def experiment_configs(name: str, scale: int, base: RunConfig | None = None) -> list[RunConfig]:
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    base = (base or RunConfig()).update(scale_overrides(scale))
    return [base.update({**params, "label": label, "experiment": name})
            for label, params in EXPERIMENTS[name]]


def run_experiment(name: str, scale: int, out_dir, threads: int = 1,
                   base: RunConfig | None = None) -> list[dict]:
    out_dir = Path(out_dir) / name
    configs = experiment_configs(name, scale, base)
    rows = []
    for i, cfg in enumerate(configs, 1):
        print(f"[{name}] {i}/{len(configs)} {cfg.label}", flush=True)
        image = reconstruct_config(cfg, threads=threads)
        write_outputs(cfg, image, out_dir)
        rows.append(report_row(cfg, image))
    io.write_csv(out_dir / "report.csv", rows)
    return rows


def analyze_images(stems) -> list[dict]:
    """Report rows for saved images, each with its ``.cfg`` beside it."""
    rows = []
    for stem in stems:
        stem = io.stem_of(stem)
        cfg = load_config(io.sibling(stem, ".cfg"))
        rows.append(report_row(cfg, io.read_image(stem)))
    return rows


def summarize(rows: list[dict]) -> str:
    lines = []
    for row in rows:
        art = [v for k, v in row.items() if k.startswith("artifact_") and v != ""]
        sharp = [v for k, v in row.items() if k.startswith("sharpness_") and v != ""]
        jump = row.get("jump_d0_45", "")
        lines.append(f"{row['label']:>24s}  jump45={jump if jump == '' else f'{jump:.3f}'}"
                     f"  max artifact={max(art) if art else float('nan'):.4f}"
                     f"  max sharpness={max(sharp) if sharp else float('nan'):.4f}")
    return "\n".join(lines)

