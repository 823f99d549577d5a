"""Config-driven experiment runs that produce plot data as CSV or JSON.

Every run is a pure function of its :class:`ExperimentConfig`; grid points
are independent jobs and rows are assembled in a fixed order, so output is
byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import re
import subprocess
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import tomli

from . import __version__
from ._pool import ordered_map
from .derivatives import (
    METHODS,
    StocConfig,
    exact_derivative,
    finite_difference,
    stand_psr_trotter,
    stoc_psr_mixed,
    stoc_psr_pure,
    trotter_state,
)
from .errors import InvalidShiftError, SingularFisherError
from .fisher import FisherMatrix, qfim_mixed, qfim_pure, qfim_pure_from_raw
from .hamiltonian import (
    FieldAngleModel,
    ParamHamiltonian,
    field_angle_qfi,
    generator_from_spec,
    ghz3_total_variance,
)
from .noise import dephasing_channel, noisy_evolved_state
from .qcore import as_state, collective_pauli, ghz, plus_state
from .tomography import (
    build_X,
    cfim_from_quench,
    ising2_generators,
    make_instance,
    quench_derivatives,
    scaling_curves,
)

log = logging.getLogger(__name__)

CSV_HEADER = ("experiment", "t", "phi", "gamma", "p", "method", "value", "stat_err", "N", "mu", "seed")
EXPERIMENTS = ("fig2", "fig3a", "fig3b", "fig4", "custom")
_ALLOWED_METHODS = {
    "fig2": {"exact", "stoc", "stand", "fd"},
    "fig3a": {"exact", "stoc", "fd", "closed_form"},
    "fig3b": {"exact", "stoc", "fd"},
    "fig4": {"stoc", "fd"},
    "custom": {"exact", "stoc", "fd"},
}


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  {p}" for p in self.problems))


def _grid(start: float, stop: float, step: float) -> list[float]:
    count = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 10) for k in range(count)]


@dataclass
class ExperimentConfig:
    experiment: str
    t_grid: list = field(default_factory=list)
    phi_values: list = field(default_factory=list)
    n_qubits: int = 1
    N: int = 1000
    mu: float = math.pi / 4
    gamma: list = field(default_factory=lambda: [0.0])
    seed: int = 0
    methods: list = field(default_factory=list)
    output_path: str | None = None
    format: str = "csv"
    trotter_m: int = 5
    batches: int = 10
    quad_steps: int = 2001
    eps: float = 1e-5
    p_values: list = field(default_factory=list)
    repetitions: int = 10
    true_x: list = field(default_factory=list)
    generators: list = field(default_factory=list)
    probe: str = "ghz"

    def hash(self) -> str:
        payload = {k: v for k, v in asdict(self).items() if k not in ("output_path", "format")}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def default_config(experiment: str) -> ExperimentConfig:
    if experiment == "fig2":
        return ExperimentConfig(
            "fig2",
            t_grid=_grid(0.1, 3.1, 0.1),
            phi_values=[0.0, math.pi / 7, math.pi / 4, math.pi / 3],
            n_qubits=1,
            methods=["exact", "stoc", "stand"],
        )
    if experiment == "fig3a":
        return ExperimentConfig(
            "fig3a",
            t_grid=_grid(0.3, 3.0, 0.1),
            phi_values=[math.pi / 20, math.pi / 10, math.pi / 5],
            n_qubits=3,
            methods=["exact", "closed_form", "stoc"],
        )
    if experiment == "fig3b":
        return ExperimentConfig(
            "fig3b",
            t_grid=_grid(0.3, 3.0, 0.1),
            phi_values=[math.pi / 10],
            n_qubits=3,
            gamma=[0.0, 0.05, 0.1, 0.2],
            methods=["exact", "stoc"],
        )
    if experiment == "fig4":
        return ExperimentConfig(
            "fig4",
            t_grid=[1.0],
            phi_values=[],
            n_qubits=1,
            methods=["stoc", "fd"],
            p_values=list(range(2, 21)),
            true_x=[1 / math.sqrt(3)] * 3,
        )
    if experiment == "custom":
        return ExperimentConfig("custom", t_grid=[1.0], methods=["exact"])
    raise ConfigError([f"experiment: unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}"])


_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(value) -> float:
    """Numbers pass through; strings like ``pi/7``, ``2*pi/3``, ``-pi`` are evaluated."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _ANGLE.match(str(value))
    if not m:
        return float(value)
    coef = m.group(1)
    coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


def config_from_mapping(data: dict, experiment: str | None = None) -> ExperimentConfig:
    data = dict(data)
    name = experiment or data.get("experiment")
    if not name:
        raise ConfigError(["experiment: missing (set it in the config or pass --experiment)"])
    cfg = default_config(name)
    known = {f.name for f in fields(ExperimentConfig)}
    problems = [f"{k}: unknown key" for k in data if k not in known]
    for key, value in data.items():
        if key not in known or key == "experiment":
            continue
        try:
            if key in ("phi_values", "t_grid", "gamma", "true_x"):
                seq = value if isinstance(value, list) else [value]
                value = [parse_angle(v) for v in seq]
            elif key == "mu":
                value = parse_angle(value)
            elif key in ("N", "n_qubits", "seed", "trotter_m", "batches", "quad_steps", "repetitions"):
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValueError("must be an integer")
            elif key == "p_values":
                value = [int(v) for v in value]
            elif key in ("methods", "generators"):
                value = [str(v) for v in (value if isinstance(value, list) else [value])]
            elif key == "eps":
                value = float(value)
        except (TypeError, ValueError) as exc:
            problems.append(f"{key}: {exc}")
            continue
        setattr(cfg, key, value)
    try:
        validate(cfg)
    except ConfigError as exc:
        problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"config: cannot read {path}: {exc.strerror}"]) from exc
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError([f"config: parse error: {exc}"]) from exc
    return config_from_mapping(data, experiment)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    problems = []
    if cfg.experiment not in EXPERIMENTS:
        problems.append(f"experiment: unknown experiment {cfg.experiment!r}")
    t = cfg.t_grid
    if not t:
        problems.append("t_grid: must be non-empty")
    elif any(x <= 0 for x in t) or any(b <= a for a, b in zip(t, t[1:])):
        problems.append("t_grid: must be strictly increasing and positive")
    if cfg.N < 1:
        problems.append("N: must be >= 1")
    if not cfg.methods:
        problems.append("methods: must be non-empty")
    allowed = _ALLOWED_METHODS.get(cfg.experiment, set(METHODS))
    bad = [m for m in cfg.methods if m not in allowed]
    if bad:
        problems.append(f"methods: {bad} not available for {cfg.experiment} (allowed: {sorted(allowed)})")
    if cfg.format not in ("csv", "json"):
        problems.append("format: must be 'csv' or 'json'")
    if not 0 <= cfg.seed < 2**64:
        problems.append("seed: must be a 64-bit unsigned integer")
    if cfg.batches < 0:
        problems.append("batches: must be >= 0")
    if any(g < 0 for g in cfg.gamma):
        problems.append("gamma: decay rates must be non-negative")
    if cfg.eps <= 0:
        problems.append("eps: must be positive")
    if cfg.quad_steps < 2:
        problems.append("quad_steps: must be >= 2")
    if cfg.trotter_m < 5 or cfg.trotter_m % 4 != 1:
        problems.append("trotter_m: must be 4k+1 with k >= 1")
    if cfg.experiment == "fig2":
        if cfg.n_qubits != 1:
            problems.append("n_qubits: fig2 is a single-qubit experiment")
        if not cfg.phi_values:
            problems.append("phi_values: must be non-empty")
    if cfg.experiment in ("fig3a", "fig3b"):
        if cfg.n_qubits < 1:
            problems.append("n_qubits: must be >= 1")
        if not cfg.phi_values:
            problems.append("phi_values: must be non-empty")
        if "closed_form" in cfg.methods and cfg.n_qubits != 3:
            problems.append("methods: closed_form is only available for n_qubits = 3")
    if cfg.experiment == "fig4":
        if len(cfg.t_grid) != 1:
            problems.append("t_grid: fig4 uses a single evolution time")
        if len(cfg.true_x) != 3:
            problems.append("true_x: the single-qubit quench model has 3 couplings")
        if not cfg.p_values or min(cfg.p_values) < 2:
            problems.append("p_values: need p >= d-1 = 2")
        if cfg.repetitions < 1:
            problems.append("repetitions: must be >= 1")
    if cfg.experiment == "custom":
        if not cfg.generators:
            problems.append("generators: custom runs need at least one generator")
        elif len(cfg.phi_values) != len(cfg.generators):
            problems.append("phi_values: need one value per generator")
        else:
            try:
                _custom_model(cfg)
                _probe(cfg)
            except ValueError as exc:
                problems.append(f"generators/probe: {exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


@dataclass
class RunRecord:
    experiment: str
    config_hash: str
    rows: list
    mse: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([_fmt(row.get(k)) for k in CSV_HEADER])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{k: row.get(k) for k in CSV_HEADER} for row in self.rows]
        return json.dumps(
            {
                "experiment": self.experiment,
                "config_hash": self.config_hash,
                "rows": rows,
                "mse": self.mse,
                "skipped": self.skipped,
            },
            indent=1,
            default=_json_default,
        )

    def series(self, method: str, **match) -> tuple[np.ndarray, np.ndarray]:
        """(x, value) arrays for one method; x is t, or p for fig4."""
        key = "p" if self.experiment == "fig4" else "t"
        sel = [r for r in self.rows if r["method"] == method and all(_same(r.get(k), v) for k, v in match.items())]
        return np.array([r[key] for r in sel], dtype=float), np.array([r["value"] for r in sel], dtype=float)


def _same(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a is not None and b is not None and math.isclose(a, b, rel_tol=0, abs_tol=1e-12)
    return a == b


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(type(obj))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def mse(series, reference) -> float:
    """(1/M) sum_i (y_i - f_i)^2."""
    y = np.asarray(series, dtype=float)
    f = np.asarray(reference, dtype=float)
    if y.size == 0:
        raise ValueError("mse of an empty series")
    if y.shape != f.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {f.shape}")
    return float(np.mean((y - f) ** 2))


def _row(cfg, method, value, *, t=None, phi=None, gamma=None, p=None, stat_err=None, stochastic=False):
    return {
        "experiment": cfg.experiment,
        "t": t,
        "phi": phi,
        "gamma": gamma,
        "p": p,
        "method": method,
        "value": float(value),
        "stat_err": None if stat_err is None else float(stat_err),
        "N": cfg.N if stochastic else None,
        "mu": cfg.mu if stochastic else None,
        "seed": cfg.seed,
    }


def _batch_spread(fn, batches: int) -> float | None:
    """Standard deviation of ``fn(stream)`` over independent-seed batches."""
    if batches < 2:
        return None
    vals = np.array([fn((b,)) for b in range(1, batches + 1)])
    if not np.all(np.isfinite(vals)):
        return math.nan
    return float(np.std(vals, ddof=1))


def _trace_inverse(F: FisherMatrix) -> float:
    try:
        return F.trace_inverse()
    except SingularFisherError:
        return math.inf


# -- fig2 ---------------------------------------------------------------------


def run_fig2(cfg: ExperimentConfig, workers: int = 1) -> RunRecord:
    """QFI of the single-qubit field-angle probe versus t for every method."""
    validate(cfg)
    model = FieldAngleModel()
    psi0 = plus_state()
    points = [(t, phi) for t in cfg.t_grid for phi in cfg.phi_values]

    def job(point):
        t, phi = point
        psi = model.unitary(t, phi) @ psi0
        rows, skipped = [], []
        for method in cfg.methods:
            if method == "exact":
                rows.append(_row(cfg, method, field_angle_qfi(t, phi), t=t, phi=phi))
            elif method == "stoc":
                scfg = StocConfig(cfg.N, cfg.mu, cfg.seed, t)

                def q(stream, scfg=scfg, t=t, phi=phi, psi=psi):
                    _, raw = stoc_psr_pure(model, psi0, 0, phi, scfg, stream=stream)
                    return qfim_pure_from_raw(psi, [raw]).entries[0, 0]

                try:
                    rows.append(
                        _row(cfg, method, q(()), t=t, phi=phi, stat_err=_batch_spread(q, cfg.batches), stochastic=True)
                    )
                except InvalidShiftError as exc:
                    skipped.append({"t": t, "phi": phi, "method": method, "reason": str(exc)})
            elif method == "stand":
                state = trotter_state(psi0, phi, t, cfg.trotter_m)
                d = stand_psr_trotter(psi0, phi, t, cfg.trotter_m).value
                rows.append(_row(cfg, method, qfim_pure(state, [d]).entries[0, 0], t=t, phi=phi))
            elif method == "fd":
                d = finite_difference(model, psi0, 0, phi, t, cfg.eps).value
                rows.append(_row(cfg, method, qfim_pure(psi, [d]).entries[0, 0], t=t, phi=phi))
        return rows, skipped

    record = _assemble(cfg, ordered_map(job, points, workers))
    for method in cfg.methods:
        if method == "exact":
            continue
        for phi in cfg.phi_values:
            ts, vals = record.series(method, phi=phi)
            if ts.size:
                ref = field_angle_qfi(ts, phi)
                record.mse.append({"method": method, "phi": phi, "gamma": None, "mse": mse(vals, ref)})
    return record


# -- fig3 / custom --------------------------------------------------------------


def _collective_model(n: int) -> ParamHamiltonian:
    return ParamHamiltonian(
        tuple(collective_pauli(a, n) for a in "xyz"), ("phi_x", "phi_y", "phi_z")
    )


def _custom_model(cfg) -> ParamHamiltonian:
    return ParamHamiltonian(tuple(generator_from_spec(s, cfg.n_qubits) for s in cfg.generators))


def _probe(cfg) -> np.ndarray:
    probe = cfg.probe.strip().lower()
    if probe == "ghz":
        return ghz(cfg.n_qubits)
    if probe == "plus":
        return ghz(1) if cfg.n_qubits == 1 else as_state(np.ones(2**cfg.n_qubits) / 2 ** (cfg.n_qubits / 2))
    amps = np.array([complex(a.strip()) for a in probe.split(",")])
    return as_state(amps / np.linalg.norm(amps))


def total_variance(model, psi0, phi, t, method, *, gamma=0.0, cfg=None, stream=(), quad_steps=2001, eps=1e-5, mixed=None):
    """tr[Q^-1] of the (optionally dephased) evolved probe.

    ``mixed`` selects the density-matrix pipeline; by default it is used
    whenever gamma > 0.
    """
    mixed = gamma > 0 if mixed is None else mixed
    d = model.d
    if not mixed:
        psi = model.unitary(t, phi) @ psi0
        if method == "stoc":
            raws = [stoc_psr_pure(model, psi0, j, phi, cfg, stream=stream)[1] for j in range(d)]
            return _trace_inverse(qfim_pure_from_raw(psi, raws))
        if method == "exact":
            ds = [exact_derivative(model, psi0, j, phi, t, quad_steps).value for j in range(d)]
        elif method == "fd":
            ds = [finite_difference(model, psi0, j, phi, t, eps).value for j in range(d)]
        else:
            raise ValueError(f"unsupported method {method!r}")
        return _trace_inverse(qfim_pure(psi, ds))
    channel = dephasing_channel(gamma, t)
    rho = noisy_evolved_state(model, psi0, t, phi, gamma)
    if method == "stoc":
        ds = [stoc_psr_mixed(model, psi0, j, phi, cfg, channel=channel, stream=stream).value for j in range(d)]
    elif method == "exact":
        ds = [exact_derivative(model, psi0, j, phi, t, quad_steps, channel=channel).value for j in range(d)]
    elif method == "fd":
        ds = [finite_difference(model, psi0, j, phi, t, eps, channel=channel).value for j in range(d)]
    else:
        raise ValueError(f"unsupported method {method!r}")
    return _trace_inverse(qfim_mixed(rho, ds))


def _variance_rows(cfg, model, psi0, phi_of, points, mixed, workers, closed_form=None):
    def job(point):
        t, phi, gamma = point
        phis = phi_of(phi)
        rows, skipped = [], []
        for method in cfg.methods:
            if method == "closed_form":
                rows.append(_row(cfg, method, closed_form(t, phi), t=t, phi=phi, gamma=gamma))
                continue
            kw = dict(gamma=gamma, quad_steps=cfg.quad_steps, eps=cfg.eps, mixed=mixed)
            if method != "stoc":
                value = total_variance(model, psi0, phis, t, method, **kw)
                rows.append(_row(cfg, method, value, t=t, phi=phi, gamma=gamma))
                continue
            scfg = StocConfig(cfg.N, cfg.mu, cfg.seed, t)

            def v(stream, scfg=scfg, t=t, kw=kw):
                return total_variance(model, psi0, phis, t, "stoc", cfg=scfg, stream=stream, **kw)

            try:
                value = v(())
            except InvalidShiftError as exc:
                skipped.append({"t": t, "phi": phi, "gamma": gamma, "method": method, "reason": str(exc)})
                log.warning("skipping stoc at t=%s: %s", t, exc)
                continue
            err = _batch_spread(v, cfg.batches)
            rows.append(_row(cfg, method, value, t=t, phi=phi, gamma=gamma, stat_err=err, stochastic=True))
        return rows, skipped

    return ordered_map(job, points, workers)


def run_fig3(cfg: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Total variance tr[Q^-1] of the GHZ probe under phi (J_x + J_y + J_z).

    ``fig3a`` is noiseless; ``fig3b`` adds per-qubit dephasing for every
    gamma in the config and always uses the density-matrix pipeline.
    """
    validate(cfg)
    model = _collective_model(cfg.n_qubits)
    psi0 = ghz(cfg.n_qubits)
    mixed = cfg.experiment == "fig3b"
    gammas = cfg.gamma if mixed else [None]
    points = [(t, phi, g) for g in gammas for t in cfg.t_grid for phi in cfg.phi_values]

    def phi_of(phi):
        return np.full(3, phi)

    closed = ghz3_total_variance if cfg.n_qubits == 3 else None
    results = _variance_rows(cfg, model, psi0, phi_of, [(t, phi, g or 0.0) for t, phi, g in points], mixed, workers, closed)
    if not mixed:
        for rows, _ in results:
            for r in rows:
                r["gamma"] = None
    record = _assemble(cfg, results)
    if "exact" in cfg.methods:
        for method in cfg.methods:
            if method == "exact":
                continue
            for g in gammas:
                for phi in cfg.phi_values:
                    ts_ref, ref = record.series("exact", phi=phi, gamma=g)
                    ts, vals = record.series(method, phi=phi, gamma=g)
                    keep = np.isin(ts_ref, ts)
                    fin = np.isfinite(vals) & np.isfinite(ref[keep])
                    if fin.any():
                        record.mse.append(
                            {"method": method, "phi": phi, "gamma": g, "mse": mse(vals[fin], ref[keep][fin])}
                        )
    return record


def run_custom(cfg: ExperimentConfig, workers: int = 1) -> RunRecord:
    """tr[Q^-1] versus t for a user-specified generator list and probe."""
    validate(cfg)
    model = _custom_model(cfg)
    psi0 = _probe(cfg)
    phis = np.asarray(cfg.phi_values, dtype=float)
    points = [(t, None, g) for g in cfg.gamma for t in cfg.t_grid]
    results = _variance_rows(cfg, model, psi0, lambda _: phis, points, None, workers)
    return _assemble(cfg, results)


# -- fig4 ---------------------------------------------------------------------


def run_fig4(cfg: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Classical CRB tr[F^-1] of single-qubit quench tomography versus p.

    Each repetition draws one pool of max(p) Haar pairs; the value at p uses
    the first p pairs.  Rows hold the mean and standard deviation over
    repetitions, followed by SQL/HL reference rows anchored at the first p of
    the first method.
    """
    validate(cfg)
    t = cfg.t_grid[0]
    ps = sorted(cfg.p_values)
    gens = ising2_generators()
    scfg = StocConfig(cfg.N, cfg.mu, cfg.seed, t)

    def repetition(r):
        inst = make_instance(gens, cfg.true_x, t, ps[-1], seed=[cfg.seed, r])
        X = build_X(inst).entries
        out = {}
        for method in cfg.methods:
            dX = quench_derivatives(inst, method, scfg if method == "stoc" else None, cfg.eps, stream=(r,))
            out[method] = [_trace_inverse(cfim_from_quench(X[:p], dX[:p])) for p in ps]
        return out

    reps = ordered_map(repetition, range(cfg.repetitions), workers)
    rows = []
    means = {}
    for method in cfg.methods:
        vals = np.array([rep[method] for rep in reps])
        means[method] = vals.mean(axis=0)
        std = vals.std(axis=0, ddof=1) if len(reps) > 1 else np.full(len(ps), math.nan)
        for i, p in enumerate(ps):
            rows.append(
                _row(cfg, method, means[method][i], t=t, p=p, stat_err=std[i], stochastic=method == "stoc")
            )
    sql, hl = scaling_curves(ps, means[cfg.methods[0]][0])
    for i, p in enumerate(ps):
        rows.append(_row(cfg, "sql", sql[i], t=t, p=p))
    for i, p in enumerate(ps):
        rows.append(_row(cfg, "hl", hl[i], t=t, p=p))
    return RunRecord(cfg.experiment, cfg.hash(), rows)


# -- driver ---------------------------------------------------------------------


def _assemble(cfg, results) -> RunRecord:
    rows, skipped = [], []
    for r, s in results:
        rows.extend(r)
        skipped.extend(s)
    return RunRecord(cfg.experiment, cfg.hash(), rows, skipped=skipped)


_RUNNERS = {"fig2": run_fig2, "fig3a": run_fig3, "fig3b": run_fig3, "fig4": run_fig4, "custom": run_custom}


def run(cfg: ExperimentConfig, workers: int = 1) -> RunRecord:
    return _RUNNERS[cfg.experiment](cfg, workers)


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def write_outputs(record: RunRecord, cfg: ExperimentConfig, path) -> list[Path]:
    """Write CSV + JSON sidecar (format csv) or a single JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format == "json":
        path.write_text(record.to_json())
        return [path]
    path.write_text(record.csv_text())
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "experiment": record.experiment,
                "config_hash": record.config_hash,
                "config": asdict(cfg),
                "version": __version__,
                "git_describe": _git_describe(),
                "mse": record.mse,
                "skipped": record.skipped,
            },
            indent=1,
            default=_json_default,
        )
    )
    return [path, sidecar]
