"""Scenario runners and record emission.

A scenario is a continuum bath plus a measurement schedule and a prepared
state.  run_trajectory evaluates the reset and tracked evolutions over the
uniform time grid and reports concurrence per point; run_interval_sweep
scans the measurement interval and reports the peak concurrence in the
segment following the n-th measurement, for both evolutions, plus their
ratio.  emit_records writes CSV or JSON with fixed formatting so equal
inputs give equal bytes.
"""

import concurrent.futures
import enum
import json
import math
import os

import numpy as np

from . import bath as _bath
from . import entanglement as _ent
from . import qubits as _qubits
from .errors import ConfigError


class Preparation(enum.Enum):
    PRODUCT_X = "product_x"
    BELL = "bell"
    CUSTOM = "custom"


class Mode(enum.Enum):
    RESET = "reset"
    TRACKED = "tracked"
    BOTH = "both"


_RHO_COLUMNS = tuple(
    f"rho_{part}_{i}{j}" for i in range(4) for j in range(4) for part in ("re", "im")
)


def worker_count():
    """Worker cap: DEPHASIM_THREADS if set, else min(4, cpu count)."""
    raw = os.environ.get("DEPHASIM_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DEPHASIM_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"DEPHASIM_THREADS must be a positive integer, got {raw!r}")
    return n


class ScenarioConfig:
    """Bundle of everything one run needs, plus provenance notes.

    defaults_applied carries one line per field the caller did not set and
    the tool filled in; the notes end up in output metadata so result files
    say which knobs were chosen by the tool rather than the user.
    """

    def __init__(self, spectral, bath_params, system, schedule, preparation,
                 mode=Mode.BOTH, custom_amplitudes=None, include_rho=False,
                 defaults_applied=()):
        self.spectral = spectral
        self.bath_params = bath_params
        self.system = system
        self.schedule = schedule
        self.preparation = Preparation(preparation)
        self.mode = Mode(mode)
        self.include_rho = bool(include_rho)
        self.defaults_applied = tuple(defaults_applied)
        if self.preparation is Preparation.CUSTOM:
            if custom_amplitudes is None:
                raise ConfigError("custom preparation requires amplitudes")
            state = _qubits.TwoQubitPureState.normalized(
                np.asarray(custom_amplitudes, dtype=complex)
            )
            self.custom_amplitudes = state.amplitudes
        else:
            if custom_amplitudes is not None:
                raise ConfigError("amplitudes only apply to the custom preparation")
            self.custom_amplitudes = None

    def state(self):
        if self.preparation is Preparation.PRODUCT_X:
            return _qubits.state_product_x()
        if self.preparation is Preparation.BELL:
            return _qubits.state_bell()
        return _qubits.TwoQubitPureState(self.custom_amplitudes)

    def descriptor(self):
        return _bath.BathDescriptor.continuous(self.spectral, self.bath_params)

    def resolved(self):
        """Full parameter set as emitted into output metadata."""
        beta = self.bath_params.beta
        meta = {
            "s": self.spectral.s,
            "g": self.spectral.g,
            "omega_c": self.spectral.omega_c,
            "cutoff": self.spectral.cutoff.value,
            "beta": "inf" if math.isinf(beta) else beta,
            "omega_0": self.system.omega_0,
            "tau": self.schedule.tau,
            "n_measurements": self.schedule.n_measurements,
            "t_max": self.schedule.t_max,
            "dt": self.schedule.dt,
            "preparation": self.preparation.value,
            "mode": self.mode.value,
            "include_rho": self.include_rho,
        }
        if self.custom_amplitudes is not None:
            meta["amplitudes"] = [[z.real, z.imag] for z in self.custom_amplitudes]
        meta["notes"] = list(self.defaults_applied)
        return meta


class TrajectoryRecord:
    header = ("t", "segment", "c_reset", "c_tracked")

    def __init__(self, t, segment, c_reset, c_tracked, rho=None, meta=None):
        t = np.asarray(t, dtype=float)
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ConfigError("trajectory time column must be strictly increasing")
        self.t = t
        self.segment = np.asarray(segment, dtype=int)
        self.c_reset = None if c_reset is None else np.clip(np.asarray(c_reset), 0.0, 1.0)
        self.c_tracked = None if c_tracked is None else np.clip(np.asarray(c_tracked), 0.0, 1.0)
        self.rho = rho
        self.meta = dict(meta or {})

    @property
    def columns(self):
        cols = self.header
        if self.rho is not None:
            cols = cols + _RHO_COLUMNS
        return cols

    def iter_rows(self):
        for i in range(self.t.size):
            row = [
                self.t[i],
                int(self.segment[i]),
                None if self.c_reset is None else self.c_reset[i],
                None if self.c_tracked is None else self.c_tracked[i],
            ]
            if self.rho is not None:
                m = self.rho[i]
                for a in range(4):
                    for b in range(4):
                        row.append(m[a, b].real)
                        row.append(m[a, b].imag)
            yield row


class SweepRecord:
    header = ("tau", "n_measurements", "c_max_tracked", "c_reset_max", "ratio")

    def __init__(self, rows, meta=None):
        self.rows = [tuple(r) for r in rows]
        for tau, n, cmt, cmr, ratio in self.rows:
            if cmr <= 0.0:
                raise ConfigError(
                    f"c_reset_max must be positive to form a ratio (tau={tau}, n={n})"
                )
        self.meta = dict(meta or {})

    @property
    def columns(self):
        return self.header

    def iter_rows(self):
        return iter(self.rows)


class TableRecord:
    """Free-form rows with a fixed header; used for kernel dumps."""

    def __init__(self, columns, rows, meta=None):
        self._columns = tuple(columns)
        self.rows = [tuple(r) for r in rows]
        self.meta = dict(meta or {})

    @property
    def columns(self):
        return self._columns

    def iter_rows(self):
        return iter(self.rows)


def _map_ordered(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_trajectory(cfg):
    """Evaluate the configured evolutions over the grid 0..t_max step dt."""
    psi = cfg.state()
    bd = cfg.descriptor()
    sched = cfg.schedule
    t, seg, tp = _qubits.segment_grid(sched.tau, sched.t_max, sched.dt)
    n_reached = int(seg.max()) if seg.size else 0
    if n_reached > sched.n_measurements:
        raise ConfigError(
            f"grid reaches segment {n_reached} but the schedule declares "
            f"{sched.n_measurements} measurements"
        )
    want_reset = cfg.mode in (Mode.RESET, Mode.BOTH)
    want_tracked = cfg.mode in (Mode.TRACKED, Mode.BOTH)
    cache = _qubits.KernelCache(bd, sched.tau, sched.n_measurements,
                                t_prime_grid=np.unique(tp))
    workers = worker_count()

    c_reset = rho_reset = None
    if want_reset:
        rho_reset = np.empty((t.size, 4, 4), dtype=complex)
        for i in range(t.size):
            gam, dlt, _, _ = cache.at(tp[i])
            rho_reset[i] = _qubits.reset_matrix(psi, cfg.system, bd, tp[i],
                                                gam=gam, dlt=dlt)
        c_reset = np.array([_ent.concurrence(m).value for m in rho_reset])

    c_tracked = rho_tracked = None
    if want_tracked:
        def one(i):
            return _qubits.tracked_matrix(psi, cfg.system, cache,
                                          int(seg[i]), tp[i])

        rho_tracked = np.array(_map_ordered(one, range(t.size), workers))
        c_tracked = np.array([_ent.concurrence(m).value for m in rho_tracked])

    meta = cfg.resolved()
    rho = None
    if cfg.include_rho:
        rho = rho_tracked if rho_tracked is not None else rho_reset
        meta["rho_series"] = "tracked" if rho_tracked is not None else "reset"
    return TrajectoryRecord(t, seg, c_reset, c_tracked, rho=rho, meta=meta)


def default_tau_grid():
    return np.geomspace(0.05, 2.0, 40)


def run_interval_sweep(cfg, tau_grid=None, n_list=(1, 2, 3)):
    """Peak concurrence in the segment after the n-th measurement, per tau.

    The window for a given n is the open interval (n tau, (n+1) tau): the
    grid excludes the segment-start points, where both evolutions sit at
    the prepared state.  Preparation and mode come from cfg but the sweep
    always needs both series, so mode must not restrict them.
    """
    if cfg.mode is not Mode.BOTH:
        raise ConfigError("interval sweep requires mode=both")
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list or n_list[0] < 1 or n_list[-1] > 3:
        raise ConfigError(f"n_list must be a non-empty subset of {{1,2,3}}, got {n_list}")
    if tau_grid is None:
        tau_grid = default_tau_grid()
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or tau_grid.size == 0 or np.any(tau_grid <= 0):
        raise ConfigError("tau_grid must be a non-empty 1-D array of positive values")
    if np.any(np.diff(tau_grid) <= 0):
        raise ConfigError("tau_grid must be strictly ascending")

    n_max = n_list[-1]
    rows = []
    for tau in tau_grid:
        dt = tau / 200.0
        sched = _qubits.MeasurementSchedule(
            tau=tau, n_measurements=n_max, t_max=(n_max + 1) * tau - dt, dt=dt
        )
        sub = ScenarioConfig(
            cfg.spectral, cfg.bath_params, cfg.system, sched, cfg.preparation,
            mode=Mode.BOTH, custom_amplitudes=cfg.custom_amplitudes,
            defaults_applied=cfg.defaults_applied,
        )
        rec = run_trajectory(sub)
        tp = rec.t - rec.segment * tau
        for n in n_list:
            mask = (rec.segment == n) & (tp > 0.5 * dt)
            cmt = float(np.max(rec.c_tracked[mask]))
            cmr = float(np.max(rec.c_reset[mask]))
            rows.append((float(tau), n, cmt, cmr, cmt / cmr))

    meta = cfg.resolved()
    for key in ("tau", "t_max", "dt", "n_measurements", "mode", "include_rho"):
        meta.pop(key, None)
    meta["tau_grid"] = [float(v) for v in tau_grid]
    meta["n_list"] = n_list
    meta["dt_rule"] = "tau/200"
    meta["window"] = "open interval (n tau, (n+1) tau)"
    return SweepRecord(rows, meta=meta)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _meta_json(meta):
    return json.dumps(meta, sort_keys=True, separators=(",", ":"), allow_nan=False)


def emit_records(record, fmt, path):
    """Write a record as CSV or JSON with deterministic bytes."""
    fmt = str(fmt).lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    if fmt == "csv":
        lines = [f"# {_meta_json(record.meta)}", ",".join(record.columns)]
        for row in record.iter_rows():
            lines.append(",".join(_fmt(v) for v in row))
        payload = "\n".join(lines) + "\n"
    else:
        rows = [
            {col: (None if v is None else (int(v) if isinstance(v, (int, np.integer)) else
                                           (v if isinstance(v, str) else float(v))))
             for col, v in zip(record.columns, row)}
            for row in record.iter_rows()
        ]
        payload = json.dumps(
            {"meta": record.meta, "rows": rows},
            sort_keys=True, indent=1, allow_nan=False,
        ) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def load_json(path):
    """Parse a JSON record file back into {'meta': ..., 'rows': [...]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise OSError(f"reading {path}: {exc}") from exc
