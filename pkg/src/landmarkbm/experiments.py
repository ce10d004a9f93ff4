"""Experiment presets and artifact emission.

A preset bundles everything one figure-style experiment needs: the
three kernels, ambient dimension, landmark count and initial layout,
horizon, step count, path count, stopping thresholds and the master
seed.  ``run_experiment`` writes, per kernel, the minimum-distance CSV,
a log-distance-versus-time SVG over all paths, and a
position-versus-time SVG for the path attaining the smallest
inter-landmark distance, plus one metadata file echoing the fully
resolved specification.  Reruns of an unchanged spec produce
byte-identical files.

Presets fig1 .. fig5 cover the standard layouts (two landmarks on a
line, two in the plane, three on a line, four on a line, three in the
plane); the three-landmarks-in-the-plane preset also serves the
second rendering of that layout, so there is no fig6.
"""

import os
from dataclasses import dataclass

import numpy as np

from .geometry import LandmarkConfig
from .kernels import parse_kernel_spec
from .simulator import StopThresholds, simulate, write_mindist_csv
from .svg import PlotKind, PlotSpec, Series, emit_svg

__all__ = [
    "ExperimentSpec",
    "PRESET_NAMES",
    "DEFAULT_SEED",
    "resolve_preset",
    "default_initial_positions",
    "run_experiment",
    "write_metadata",
    "load_metadata",
]

DEFAULT_SEED = 202

PRESET_KERNELS = ("matern:0.5", "matern:1.5:2", "gauss")

# (d, n, spacing, thresholds); spacing scales the unit layout along the
# first axis.  The four-landmark line uses a tighter layout and a more
# sensitive relative floor: its slow collective collapse only reaches a
# few 1e-3 of the initial separation within the horizon.
_PRESETS = {
    "fig1": (1, 2, 1.0, StopThresholds()),
    "fig2": (2, 2, 0.5, StopThresholds()),
    "fig3": (1, 3, 1.0, StopThresholds()),
    "fig4": (1, 4, 0.25, StopThresholds(eps_rel=5e-2)),
    "fig5": (2, 3, 0.5, StopThresholds()),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def default_initial_positions(n, d, spacing=1.0):
    """Landmarks spaced along the first coordinate axis."""
    pts = np.zeros((n, d))
    pts[:, 0] = spacing * np.arange(n)
    return pts


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment description."""

    name: str
    kernel_specs: tuple
    d: int
    n: int
    initial: np.ndarray  # (n, d)
    t_max: float
    steps: int
    paths: int
    seed: int
    thresholds: StopThresholds
    emit_csv: bool = True
    emit_svg: bool = True

    def __post_init__(self):
        if self.t_max <= 0 or self.steps < 1 or self.paths < 1:
            raise ValueError("experiment needs t_max > 0, steps >= 1, paths >= 1")
        initial = np.asarray(self.initial, dtype=float)
        if initial.shape != (self.n, self.d):
            raise ValueError(f"initial must have shape ({self.n}, {self.d})")
        initial = initial.copy()
        initial.setflags(write=False)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "kernel_specs", tuple(self.kernel_specs))


def resolve_preset(name, seed=None):
    """Build the full ExperimentSpec for a preset name."""
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    d, n, spacing, thresholds = _PRESETS[name]
    return ExperimentSpec(
        name=name,
        kernel_specs=PRESET_KERNELS,
        d=d,
        n=n,
        initial=default_initial_positions(n, d, spacing),
        t_max=1.0,
        steps=10_000,
        paths=20,
        seed=DEFAULT_SEED if seed is None else int(seed),
        thresholds=thresholds,
    )


def _kernel_slug(spec_string):
    return spec_string.replace(":", "-").replace("/", "-")


def _log_floor(thresholds):
    return max(thresholds.eps_abs, 1e-300)


def _plot_index(length, max_points=1200):
    """Fixed-stride vertex decimation keeping the first and last samples."""
    if length <= max_points:
        return np.arange(length)
    stride = int(np.ceil(length / max_points))
    idx = np.arange(0, length, stride)
    if idx[-1] != length - 1:
        idx = np.append(idx, length - 1)
    return idx


def _logdist_svg(spec, kernel_spec, ensemble):
    floor = _log_floor(spec.thresholds)
    series = []
    for pid, path in enumerate(ensemble.paths):
        idx = _plot_index(len(path.min_dists))
        t = ensemble.dt * idx
        y = np.log10(np.maximum(path.min_dists[idx], floor))
        series.append(
            Series(x=t, y=y, stopped=path.stop.reason.is_collision, color_index=pid)
        )
    plot = PlotSpec(
        kind=PlotKind.LOG_DISTANCE_VS_TIME,
        title=f"{spec.name}: log10 minimum pairwise distance, kernel {kernel_spec}",
        x_label="t",
    )
    return emit_svg(plot, [("", series)])


def _positions_svg(spec, kernel_spec, ensemble):
    best = min(range(len(ensemble.paths)), key=lambda p: ensemble.paths[p].stop.min_distance)
    path = ensemble.paths[best]
    idx = _plot_index(len(path.min_dists))
    t = ensemble.dt * idx
    panels = []
    for c in range(spec.d):
        series = []
        for i in range(spec.n):
            series.append(
                Series(
                    x=path.states[idx, i * spec.d + c],
                    y=t,
                    stopped=path.stop.reason.is_collision,
                    color_index=i,
                )
            )
        panels.append((f"coordinate {c + 1}", series))
    plot = PlotSpec(
        kind=PlotKind.POSITION_VS_TIME,
        title=(
            f"{spec.name}: landmark positions of path {best} "
            f"(smallest distance), kernel {kernel_spec}"
        ),
        y_label="t",
    )
    return emit_svg(plot, panels)


def run_experiment(spec, outdir):
    """Run every kernel of the experiment and write its artifacts.

    Returns the list of file paths written.  I/O errors propagate to
    the caller (the CLI maps them to a nonzero exit).
    """
    os.makedirs(outdir, exist_ok=True)
    written = []
    for kernel_spec in spec.kernel_specs:
        kernel = parse_kernel_spec(kernel_spec)
        ensemble = simulate(
            kernel,
            LandmarkConfig(spec.initial),
            t_max=spec.t_max,
            steps=spec.steps,
            paths=spec.paths,
            seed=spec.seed,
            thresholds=spec.thresholds,
            store_trajectories=True,
        )
        slug = _kernel_slug(kernel_spec)
        if spec.emit_csv:
            path = os.path.join(outdir, f"{spec.name}_{slug}_mindist.csv")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                write_mindist_csv(ensemble, fh)
            written.append(path)
        if spec.emit_svg:
            path = os.path.join(outdir, f"{spec.name}_{slug}_logdist.svg")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_logdist_svg(spec, kernel_spec, ensemble))
            written.append(path)
            path = os.path.join(outdir, f"{spec.name}_{slug}_positions.svg")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_positions_svg(spec, kernel_spec, ensemble))
            written.append(path)
    meta = os.path.join(outdir, f"{spec.name}_meta.txt")
    with open(meta, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_metadata(spec))
    written.append(meta)
    return written


def write_metadata(spec):
    """Serialize a spec as flat key=value text (floats round-trip exactly)."""
    lines = [
        "# experiment metadata; parse with load_metadata",
        f"name={spec.name}",
        f"kernels={','.join(spec.kernel_specs)}",
        f"d={spec.d}",
        f"n={spec.n}",
        "initial=" + ";".join(",".join(repr(float(x)) for x in row) for row in spec.initial),
        f"t_max={spec.t_max!r}",
        f"steps={spec.steps}",
        f"paths={spec.paths}",
        f"seed={spec.seed}",
        f"eps_abs={spec.thresholds.eps_abs!r}",
        f"eps_rel={spec.thresholds.eps_rel!r}",
        f"drop_decades={spec.thresholds.drop_decades!r}",
        f"window={spec.thresholds.window}",
        f"emit_csv={int(spec.emit_csv)}",
        f"emit_svg={int(spec.emit_svg)}",
    ]
    return "\n".join(lines) + "\n"


def load_metadata(path_or_text):
    """Parse metadata text (or a file path) back into an ExperimentSpec."""
    if "\n" not in path_or_text and os.path.exists(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = path_or_text
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    required = {
        "name", "kernels", "d", "n", "initial", "t_max", "steps", "paths",
        "seed", "eps_abs", "eps_rel", "drop_decades", "window",
    }
    missing = required - fields.keys()
    if missing:
        raise ValueError(f"metadata missing keys: {sorted(missing)}")
    initial = np.array(
        [[float(x) for x in row.split(",")] for row in fields["initial"].split(";")]
    )
    return ExperimentSpec(
        name=fields["name"],
        kernel_specs=tuple(fields["kernels"].split(",")),
        d=int(fields["d"]),
        n=int(fields["n"]),
        initial=initial,
        t_max=float(fields["t_max"]),
        steps=int(fields["steps"]),
        paths=int(fields["paths"]),
        seed=int(fields["seed"]),
        thresholds=StopThresholds(
            eps_abs=float(fields["eps_abs"]),
            eps_rel=float(fields["eps_rel"]),
            drop_decades=float(fields["drop_decades"]),
            window=int(fields["window"]),
        ),
        emit_csv=bool(int(fields.get("emit_csv", "1"))),
        emit_svg=bool(int(fields.get("emit_svg", "1"))),
    )
