"""Grid sweeps over model parameters and weights, figure presets, CSV/JSON output."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bounds import HolevoOptions, ReportOptions, closed_form_quantumness, full_report
from .errors import InvalidSpec, UnknownPreset
from .geometry import compute_geometry, quantumness_R, t_measure
from .linalg import require_weight
from .models import (
    MODEL_IDS,
    PARAM_NAMES,
    ModelConfig,
    model_config,
    model_point,
    tunable_qubit_pure_geometry_grid,
)
from .neldermead import nelder_mead

CANONICAL_OUTPUTS = ("c_sld", "c_rld", "c_t", "c_r", "c_h", "R", "T", "gap_h", "gap_t", "gap_r")
MAX_SWEEP_POINTS = 10**7

FLAG_R_FORMULA_MISMATCH = "RFormulaMismatch"
FLAG_R_ABOVE_ONE = "RAboveOne"

_ALLOWED_CONSTANTS = {
    "tunable_qubit": {"r_x", "r_y", "r_z", "alpha", "beta", "gamma", "theta", "phi"},
    "su2_qubit": {"alpha", "beta", "t"},
    "su2_qutrit": {"alpha", "beta", "t"},
}


@dataclass(frozen=True)
class Axis:
    """One linearly spaced sweep axis over a parameter or constant."""

    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class WeightSpec:
    """How to build the weight matrix at each point.

    kinds: identity | diag (values) | full (row-major values) |
    qfim (W = Q / Q_11 at the point) | diag_log_axis (W = diag(1, 10**v)
    where v is the named axis value).
    """

    kind: str = "identity"
    values: tuple[float, ...] = ()
    axis: str | None = None


@dataclass(frozen=True)
class SweepSpec:
    model_id: str
    fixed: Mapping[str, float] = field(default_factory=dict)
    axes: tuple[Axis, ...] = ()
    weight: WeightSpec = field(default_factory=WeightSpec)
    outputs: tuple[str, ...] = CANONICAL_OUTPUTS
    seed: int = 0
    pseudo_inverse: bool = False
    holevo: HolevoOptions = field(default_factory=HolevoOptions)
    maximize_over: tuple[str, ...] = ()
    maximize_grid: int = 17


@dataclass(frozen=True)
class ResultRow:
    axis_values: tuple[float, ...]
    outputs: Mapping[str, float | None]
    flags: tuple[str, ...]


def canonical_outputs(requested: Sequence[str]) -> tuple[str, ...]:
    """Expand 'gaps' and order the requested outputs canonically."""
    wanted: set[str] = set()
    for name in requested:
        if name == "gaps":
            wanted |= {"gap_h", "gap_t", "gap_r"}
        elif name in CANONICAL_OUTPUTS:
            wanted.add(name)
        else:
            raise InvalidSpec(f"unknown output {name!r}")
    if not wanted:
        raise InvalidSpec("output set is empty")
    return tuple(name for name in CANONICAL_OUTPUTS if name in wanted)


def validate_spec(spec: SweepSpec) -> SweepSpec:
    if spec.model_id not in MODEL_IDS:
        raise InvalidSpec(f"unknown model {spec.model_id!r}")
    axis_names = [ax.name for ax in spec.axes]
    if len(set(axis_names)) != len(axis_names):
        raise InvalidSpec("duplicate axis names")
    overlap = set(axis_names) & set(spec.fixed)
    if overlap:
        raise InvalidSpec(f"axis names also fixed: {sorted(overlap)}")
    total = 1
    for ax in spec.axes:
        if ax.count < 2:
            raise InvalidSpec(f"axis {ax.name!r} needs count >= 2, got {ax.count}")
        total *= ax.count
    if total > MAX_SWEEP_POINTS:
        raise InvalidSpec(f"sweep has {total} points, above the {MAX_SWEEP_POINTS} guard")
    outputs = canonical_outputs(spec.outputs)
    if spec.weight.kind not in ("identity", "diag", "full", "qfim", "diag_log_axis"):
        raise InvalidSpec(f"unknown weight kind {spec.weight.kind!r}")
    if spec.weight.kind == "diag_log_axis" and spec.weight.axis not in axis_names:
        raise InvalidSpec("diag_log_axis weight needs a matching axis name")
    if spec.maximize_over:
        if spec.model_id != "tunable_qubit":
            raise InvalidSpec("per-point maximization is defined for the tunable qubit")
        if not set(outputs) <= {"R", "T"}:
            raise InvalidSpec("per-point maximization reports R and T only")
    return replace(spec, outputs=outputs)


def _bind_values(model_id: str, bound: dict[str, float]) -> tuple[ModelConfig, tuple[float, ...]]:
    """Split bound names into model parameters and constants, resolving the
    derived names xi (-> lambda1 given phi), r_xy, and r2 (given r_z)."""
    values = dict(bound)
    if model_id == "tunable_qubit":
        if "xi" in values:
            phi = values.get("phi")
            if phi is None:
                raise InvalidSpec("binding 'xi' requires 'phi'")
            values["lambda1"] = 0.5 * (values.pop("xi") + phi)
        if "r_xy" in values:
            v = values.pop("r_xy")
            values["r_x"] = values["r_y"] = v
        if "r2" in values:
            r2 = values.pop("r2")
            r_z = values.get("r_z")
            if r_z is None:
                raise InvalidSpec("binding 'r2' requires 'r_z'")
            planar = r2 - r_z * r_z
            if planar < -1e-12:
                raise InvalidSpec(f"r2={r2!r} is below r_z^2")
            values["r_x"] = values["r_y"] = math.sqrt(max(planar, 0.0) / 2.0)
    params = tuple(float(values.pop(name, 0.0)) for name in PARAM_NAMES[model_id])
    unknown = set(values) - _ALLOWED_CONSTANTS[model_id]
    if unknown:
        raise InvalidSpec(f"unknown names for {model_id}: {sorted(unknown)}")
    try:
        cfg = model_config(model_id, **values)
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from exc
    return cfg, params


def _resolve_weight(
    spec: SweepSpec, d: int, bound: Mapping[str, float], qfim: np.ndarray | None
) -> np.ndarray:
    w = spec.weight
    if w.kind == "identity":
        return np.eye(d)
    if w.kind == "diag":
        if len(w.values) != d:
            raise InvalidSpec(f"diag weight needs {d} values, got {len(w.values)}")
        return np.diag(np.asarray(w.values, dtype=float))
    if w.kind == "full":
        if len(w.values) != d * d:
            raise InvalidSpec(f"full weight needs {d * d} values, got {len(w.values)}")
        try:
            return require_weight(np.asarray(w.values, dtype=float).reshape(d, d), d)
        except ValueError as exc:
            raise InvalidSpec(f"weight matrix: {exc}") from exc
    if w.kind == "qfim":
        if qfim is None:
            raise InvalidSpec("qfim weight needs a computable QFIM")
        return qfim / qfim[0, 0]
    if w.kind == "diag_log_axis":
        if d != 2:
            raise InvalidSpec("diag_log_axis weight is two-parameter only")
        return np.diag([1.0, 10.0 ** float(bound[w.axis])])
    raise InvalidSpec(f"unknown weight kind {w.kind!r}")


def _gap(c_x: float | None, c_s: float | None) -> float | None:
    if c_x is None or c_s is None:
        return None
    return (c_x - c_s) / c_s


def _evaluate_point(spec: SweepSpec, bound: dict[str, float], index: int) -> ResultRow:
    skip = {spec.weight.axis} if spec.weight.axis else set()
    model_bound = {k: v for k, v in bound.items() if k not in skip}
    cfg, params = _bind_values(spec.model_id, model_bound)
    point = model_point(cfg, params)
    geometry = compute_geometry(point.rho, point.derivs)
    w_mat = _resolve_weight(spec, cfg.n_params, bound, geometry.qfim)
    if spec.weight.kind == "qfim" and np.linalg.eigvalsh(w_mat)[0] <= 1e-12:
        # singular QFIM cannot serve as a weight; emit a flagged null row
        outputs = {name: None for name in spec.outputs}
        return ResultRow(
            axis_values=tuple(float(bound[ax.name]) for ax in spec.axes),
            outputs=outputs,
            flags=("SingularQFIM",),
        )
    opts = ReportOptions(
        holevo=replace(spec.holevo, seed=(spec.seed, index)),
        pseudo_inverse=spec.pseudo_inverse,
        compute_rld="c_rld" in spec.outputs,
        compute_holevo=("c_h" in spec.outputs or "gap_h" in spec.outputs),
    )
    report = full_report(point, w_mat, opts, geometry=geometry)
    flags = set(report.flags)
    if report.r_value is not None:
        if report.r_value > 1.0 + 1e-9:
            flags.add(FLAG_R_ABOVE_ONE)
        q_eigs = np.linalg.eigvalsh(geometry.qfim)
        if q_eigs[0] > 0 and q_eigs[-1] / q_eigs[0] < 1e8:
            # determinant-route cross-check only where determinants carry
            # enough precision to make a mismatch meaningful
            closed = closed_form_quantumness(geometry)
            if closed is not None and abs(report.r_value - closed) > 1e-6 * max(
                1.0, report.r_value
            ):
                flags.add(FLAG_R_FORMULA_MISMATCH)
    values: dict[str, float | None] = {
        "c_sld": report.c_sld,
        "c_rld": report.c_rld,
        "c_t": report.c_t,
        "c_r": report.c_r,
        "c_h": report.c_h,
        "R": report.r_value,
        "T": report.t_value,
        "gap_h": _gap(report.c_h, report.c_sld),
        "gap_t": _gap(report.c_t, report.c_sld),
        "gap_r": _gap(report.c_r, report.c_sld),
    }
    outputs = {name: values[name] for name in spec.outputs}
    return ResultRow(
        axis_values=tuple(float(bound[ax.name]) for ax in spec.axes),
        outputs=outputs,
        flags=tuple(sorted(flags)),
    )


_PURE_GRID_MEMO: dict[tuple, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}


def _pure_grid_geometry(alpha, beta, gamma, theta, phi, l1: float, l2: float):
    """Memoized vectorized pure-qubit geometry; the maximization grid does
    not depend on the weight axis, so it is shared across sweep rows."""
    arrays = (alpha, beta, gamma, theta, phi)
    shapes = [np.shape(a) for a in arrays]
    if all(s == () or int(np.prod(s)) <= 1 for s in shapes):
        return tunable_qubit_pure_geometry_grid(*arrays, l1, l2)
    key_parts = []
    for a in arrays:
        a = np.asarray(a, dtype=float)
        key_parts.append((a.shape, a.tobytes()))
    key = (tuple(key_parts), l1, l2)
    if key not in _PURE_GRID_MEMO:
        if len(_PURE_GRID_MEMO) > 4:
            _PURE_GRID_MEMO.clear()
        _PURE_GRID_MEMO[key] = tunable_qubit_pure_geometry_grid(*arrays, l1, l2)
    return _PURE_GRID_MEMO[key]


def _maximize_point(spec: SweepSpec, bound: dict[str, float], index: int) -> ResultRow:
    """Maximize R and T over pure-state and rotation angles at one weight.

    Coarse grid (maximize_grid points per angle, vectorized pure-qubit
    geometry) followed by simplex refinement of each requested output; the
    refined optimum is re-evaluated through the ordinary scalar pipeline.
    """
    if spec.weight.kind != "diag_log_axis":
        raise InvalidSpec("maximization sweeps expect the diag_log_axis weight")
    omega = 10.0 ** float(bound[spec.weight.axis])
    n = spec.maximize_grid
    names = spec.maximize_over
    spans = {
        "alpha": (1e-3, math.pi - 1e-3),
        "beta": (0.0, 2.0 * math.pi),
        "gamma": (1e-3, math.pi - 1e-3),
        "theta": (1e-3, math.pi - 1e-3),
        "phi": (0.0, 2.0 * math.pi),
    }
    unknown = set(names) - set(spans)
    if unknown:
        raise InvalidSpec(f"cannot maximize over {sorted(unknown)}")
    grids = np.meshgrid(
        *[np.linspace(*spans[name], n) for name in names], indexing="ij", sparse=True
    )
    angle_of = dict(zip(names, grids))

    def eval_grid(chunk: dict[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        def angle(key: str, default: float) -> np.ndarray | float:
            if key in chunk:
                return chunk[key]
            return float(bound.get(key, default))

        q11, q12, q22, u12 = _pure_grid_geometry(
            angle("alpha", 0.5), angle("beta", 0.0), angle("gamma", 0.5),
            angle("theta", 0.5), angle("phi", 0.0),
            float(bound.get("lambda1", 0.0)), float(bound.get("lambda2", 0.0)),
        )
        det_q = q11 * q22 - q12 * q12
        # Configurations with a (near-)singular QFIM carry no information
        # about one direction; exclude them rather than chase noise in the
        # ratio |u| / sqrt(det Q).
        valid = det_q > 1e-6 * np.maximum(q11 * q22, 1e-300)
        t_grid = np.where(
            valid, 2.0 * math.sqrt(omega) * np.abs(u12) / (q22 + omega * q11), 0.0
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            r_grid = np.where(valid, np.abs(u12) / np.sqrt(np.abs(det_q)), 0.0)
        return t_grid, r_grid

    t_grid, r_grid = eval_grid(angle_of)
    t_grid = np.broadcast_to(t_grid, tuple([n] * len(names)))
    r_grid = np.broadcast_to(r_grid, tuple([n] * len(names)))

    def refine(metric: str, start_idx: tuple[int, ...]) -> tuple[float, np.ndarray]:
        x0 = np.array([np.linspace(*spans[name], n)[i] for name, i in zip(names, start_idx)])

        def negated(x: np.ndarray) -> float:
            chunk = {name: np.asarray([v]) for name, v in zip(names, x)}
            t_val, r_val = eval_grid(chunk)
            return -float(t_val[0] if metric == "T" else r_val[0])

        x, f, _ = nelder_mead(negated, x0, step=0.08, max_iter=1200)
        return -f, x

    results: dict[str, float | None] = {}
    for metric, grid in (("T", t_grid), ("R", r_grid)):
        if metric not in spec.outputs:
            continue
        flat = int(np.argmax(grid))
        idx = np.unravel_index(flat, grid.shape)
        _, best_x = refine(metric, idx)
        const = {name: float(v) for name, v in zip(names, best_x)}
        keep = _ALLOWED_CONSTANTS["tunable_qubit"] | set(PARAM_NAMES["tunable_qubit"])
        cfg, params = _bind_values(
            "tunable_qubit",
            {**{k: v for k, v in bound.items() if k in keep}, **const},
        )
        pt = model_point(cfg, params)
        g = compute_geometry(pt.rho, pt.derivs)
        w_mat = np.diag([1.0, omega])
        results[metric] = (
            t_measure(g, w_mat) if metric == "T" else quantumness_R(g)
        )
    outputs = {name: results.get(name) for name in spec.outputs}
    return ResultRow(
        axis_values=tuple(float(bound[ax.name]) for ax in spec.axes),
        outputs=outputs,
        flags=(),
    )


def run_point(spec: SweepSpec) -> ResultRow:
    """Evaluate a fully bound spec (no axes) as a single row."""
    spec = validate_spec(replace(spec, axes=()))
    bound = dict(spec.fixed)
    return _evaluate_point(spec, bound, 0)


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[ResultRow]:
    """Evaluate the grid in row-major axis order.

    Points are independent and deterministic for a fixed seed (each row
    derives its own optimizer seed from the row index), so the thread count
    never changes the output.  Physics flags never abort the sweep.
    """
    spec = validate_spec(spec)
    axis_values = [ax.values() for ax in spec.axes]
    combos = list(itertools.product(*axis_values)) if spec.axes else [()]
    evaluate = _maximize_point if spec.maximize_over else _evaluate_point

    def job(item: tuple[int, tuple[float, ...]]) -> ResultRow:
        index, combo = item
        bound = dict(spec.fixed)
        bound.update({ax.name: float(v) for ax, v in zip(spec.axes, combo)})
        return evaluate(spec, bound, index)

    items = list(enumerate(combos))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, items, chunksize=max(1, len(items) // (8 * threads))))
    else:
        rows = [job(item) for item in items]
    return rows


def columns(spec: SweepSpec) -> list[str]:
    return [ax.name for ax in spec.axes] + list(canonical_outputs(spec.outputs)) + ["flags"]


def _format_value(v: float | None) -> str:
    if v is None:
        return ""
    return format(float(v), ".12g")


def emit(rows: Iterable[ResultRow], fmt: str, path: str, spec: SweepSpec) -> None:
    """Write rows as CSV or JSON; byte-deterministic for a fixed seed."""
    cols = columns(spec)
    out_names = canonical_outputs(spec.outputs)
    if fmt == "csv":
        lines = [",".join(cols)]
        for row in rows:
            cells = [_format_value(v) for v in row.axis_values]
            cells += [_format_value(row.outputs.get(name)) for name in out_names]
            cells.append(";".join(row.flags))
            lines.append(",".join(cells))
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        records = []
        for row in rows:
            rec: dict[str, object] = {}
            for ax, v in zip(spec.axes, row.axis_values):
                rec[ax.name] = v
            for name in out_names:
                rec[name] = row.outputs.get(name)
            rec["flags"] = list(row.flags)
            records.append(rec)
        payload = json.dumps(records, indent=1) + "\n"
    else:
        raise InvalidSpec(f"unknown output format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(payload)


def figure_preset(name: str, config: Mapping[str, float] | None = None) -> SweepSpec:
    """Sweep recipes reproducing the published parameter scans.

    fig2 intentionally has no default Bloch components: pass r_y and r_z in
    ``config`` (the repository's reproduction recipe uses r_y=0.2, r_z=0.4).
    ``config`` may also override per-preset grid counts via ``count``.
    """
    cfg = dict(config or {})
    count = int(cfg.pop("count", 0))
    seed = int(cfg.pop("seed", 0))
    # Grid presets face tiny convex subproblems (m d <= 3 variables), so a
    # light restart budget is enough and keeps full grids fast.
    grid_opts = HolevoOptions(restarts=2, max_iter=2000)

    def counted(default: int) -> int:
        return count if count >= 2 else default

    if name == "fig1":
        if cfg:
            raise InvalidSpec(f"fig1 takes no extra config, got {sorted(cfg)}")
        return SweepSpec(
            model_id="tunable_qubit",
            fixed={},
            axes=(Axis("omega_log10", -2.0, 2.0, counted(33)),),
            weight=WeightSpec(kind="diag_log_axis", axis="omega_log10"),
            outputs=("R", "T"),
            seed=seed,
            maximize_over=("alpha", "beta", "gamma", "theta", "phi"),
        )
    if name == "fig2":
        missing = {"r_y", "r_z"} - cfg.keys()
        if missing:
            raise InvalidSpec(
                f"fig2 requires explicit Bloch components {sorted(missing)} "
                "(no silent defaults; the documented reproduction uses r_y=0.2, r_z=0.4)"
            )
        fixed = {
            "gamma": math.pi / 4.0,
            "theta": math.pi / 2.0,
            "phi": 0.0,
            "lambda2": 0.0,
            "r_y": float(cfg.pop("r_y")),
            "r_z": float(cfg.pop("r_z")),
        }
        if cfg:
            raise InvalidSpec(f"unknown fig2 config keys {sorted(cfg)}")
        return SweepSpec(
            model_id="tunable_qubit",
            fixed=fixed,
            axes=(
                Axis("r_x", 0.05, 0.85, counted(64)),
                Axis("xi", 0.0, 2.0 * math.pi, counted(64)),
            ),
            weight=WeightSpec(kind="identity"),
            outputs=("gap_h", "gap_t", "gap_r"),
            seed=seed,
            holevo=grid_opts,
        )
    if name in ("fig3a", "fig3b"):
        if cfg:
            raise InvalidSpec(f"unknown {name} config keys {sorted(cfg)}")
        r_z = 0.5 if name == "fig3a" else 0.1
        first = (
            Axis("r_xy", 0.02, 0.60, counted(48))
            if name == "fig3a"
            else Axis("r2", 0.02, 0.95, counted(48))
        )
        return SweepSpec(
            model_id="tunable_qubit",
            fixed={
                "gamma": math.pi / 4.0,
                "theta": math.pi / 2.0,
                "r_z": r_z,
                "lambda1": 0.0,
                "lambda2": 0.0,
            },
            axes=(first, Axis("phi", 0.0, 2.0 * math.pi, counted(48))),
            weight=WeightSpec(kind="identity"),
            outputs=("gap_h", "gap_t", "gap_r"),
            seed=seed,
            holevo=grid_opts,
        )
    if name == "fig4":
        if cfg:
            raise InvalidSpec(f"unknown fig4 config keys {sorted(cfg)}")
        return SweepSpec(
            model_id="su2_qubit",
            fixed={"alpha": math.pi / 2.0, "beta": 0.0, "t": 5.0},
            axes=(
                Axis("theta", 0.10, 1.45, counted(48)),
                Axis("B", 0.15, 1.10, counted(48)),
            ),
            weight=WeightSpec(kind="identity"),
            outputs=("gap_h", "gap_t", "gap_r"),
            seed=seed,
            holevo=grid_opts,
        )
    if name == "fig5":
        if cfg:
            raise InvalidSpec(f"unknown fig5 config keys {sorted(cfg)}")
        return SweepSpec(
            model_id="su2_qutrit",
            fixed={"alpha": math.pi / 4.0, "beta": 0.0, "t": 1.0, "phi": 0.0},
            axes=(
                Axis("theta", -0.6, 0.6, counted(17)),
                Axis("B", math.pi - 1.2, math.pi + 1.2, counted(17)),
            ),
            weight=WeightSpec(kind="identity"),
            outputs=("T", "gap_h", "gap_t"),
            seed=seed,
            holevo=grid_opts,
        )
    raise UnknownPreset(f"unknown preset {name!r}; expected fig1, fig2, fig3a, fig3b, fig4, fig5")
