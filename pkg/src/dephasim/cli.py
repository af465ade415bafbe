"""Command-line front end.

Subcommands: trajectory, sweep, kernels, oracle-check.  Configuration is a
strict JSON document per subcommand; unknown keys are rejected by name and
tool-chosen defaults are echoed in output metadata.  Exit codes: 0 success,
1 oracle-check comparison failure, 2 configuration error, 3 I/O error,
4 numerical failure, 5 complexity refusal.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bath as _bath
from . import entanglement as _ent
from . import experiments as _exp
from . import oracle as _oracle
from . import qubits as _qubits
from .errors import (
    ComplexityError,
    ConfigError,
    DephasimError,
    QuadratureError,
)

_SCENARIO_KEYS = frozenset({
    "s", "g", "omega_c", "cutoff", "beta", "omega_0", "tau", "t_max", "dt",
    "n_measurements", "preparation", "amplitudes", "mode", "include_rho",
})
_SWEEP_KEYS = frozenset({
    "s", "g", "omega_c", "cutoff", "beta", "omega_0", "preparation",
    "amplitudes", "tau_min", "tau_max", "tau_points", "tau_values", "n_list",
})
_KERNEL_KEYS = frozenset({"s", "g", "omega_c", "cutoff", "beta", "tau", "t_max", "dt"})
_ORACLE_KEYS = frozenset({
    "couplings", "frequencies", "n_max", "beta", "omega_0", "tau",
    "n_measurements", "t_max", "dt", "preparation", "amplitudes",
    "reset_env", "tolerance",
})


def _reject_constant(token):
    raise ConfigError(f"non-finite JSON literal {token!r} is not accepted")


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"reading {path}: {exc}") from exc
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return doc


def _check_keys(doc, allowed, subcommand):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(
            f'unknown config key "{unknown[0]}" for subcommand {subcommand}'
        )


def _number(doc, key, *, required=False, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f'config key "{key}" is required')
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f'config key "{key}" must be a number, got {v!r}')
    return float(v)


def _integer(doc, key, *, required=False, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f'config key "{key}" is required')
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f'config key "{key}" must be an integer, got {v!r}')
    return v


def _beta(doc, notes):
    if "beta" not in doc:
        notes.append(
            "beta=100 chosen by the tool (near-zero temperature); "
            "set \"beta\" explicitly to override"
        )
        return 100.0
    v = doc["beta"]
    if v == "inf":
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f'config key "beta" must be a number or "inf", got {v!r}')
    return float(v)


def _cutoff(doc, notes):
    if "cutoff" not in doc:
        notes.append('cutoff="exponential" chosen by the tool')
        return _bath.CutoffForm.EXPONENTIAL
    v = doc["cutoff"]
    try:
        return _bath.CutoffForm(v)
    except ValueError:
        raise ConfigError(
            f'config key "cutoff" must be "exponential" or "hard", got {v!r}'
        )


def _omega_0(doc, notes, default=1.0):
    if "omega_0" not in doc:
        notes.append(
            f"omega_0={default:g} chosen by the tool; "
            "set \"omega_0\" explicitly to override"
        )
        return default
    return _number(doc, "omega_0")


def _amplitudes(doc):
    raw = doc.get("amplitudes")
    if raw is None:
        return None
    if not isinstance(raw, list) or len(raw) != 4:
        raise ConfigError('config key "amplitudes" must be a list of 4 entries')
    out = []
    for entry in raw:
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            out.append(complex(entry))
        elif (isinstance(entry, list) and len(entry) == 2
              and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                      for x in entry)):
            out.append(complex(entry[0], entry[1]))
        else:
            raise ConfigError(
                'each "amplitudes" entry must be a number or an [re, im] pair'
            )
    return out


def _preparation(doc):
    raw = doc.get("preparation")
    if raw is None:
        raise ConfigError('config key "preparation" is required')
    try:
        return _exp.Preparation(raw)
    except ValueError:
        raise ConfigError(
            f'config key "preparation" must be one of product_x, bell, custom; '
            f"got {raw!r}"
        )


def _scenario_from(doc):
    notes = []
    s = _number(doc, "s", required=True)
    g = _number(doc, "g", required=True)
    omega_c = _number(doc, "omega_c", required=True)
    tau = _number(doc, "tau", required=True)
    t_max = _number(doc, "t_max", required=True)
    spectral = _bath.SpectralDensity(g=g, s=s, omega_c=omega_c,
                                     cutoff=_cutoff(doc, notes))
    bp = _bath.BathParams(beta=_beta(doc, notes))
    system = _qubits.SystemParams(omega_0=_omega_0(doc, notes))
    dt = _number(doc, "dt")
    if dt is None:
        dt = tau / 200.0
        notes.append("dt=tau/200 chosen by the tool")
    n_meas = _integer(doc, "n_measurements")
    if n_meas is None:
        if tau <= 0:
            raise ConfigError(f'config key "tau" must be > 0, got {tau}')
        n_meas = int(math.floor(t_max / tau + 1e-9))
        notes.append(
            f"n_measurements={n_meas} derived from t_max/tau by the tool"
        )
    sched = _qubits.MeasurementSchedule(tau=tau, n_measurements=n_meas,
                                        t_max=t_max, dt=dt)
    mode = doc.get("mode", "both")
    try:
        mode = _exp.Mode(mode)
    except ValueError:
        raise ConfigError(
            f'config key "mode" must be one of reset, tracked, both; got {mode!r}'
        )
    include_rho = doc.get("include_rho", False)
    if not isinstance(include_rho, bool):
        raise ConfigError('config key "include_rho" must be a boolean')
    return _exp.ScenarioConfig(
        spectral, bp, system, sched, _preparation(doc), mode=mode,
        custom_amplitudes=_amplitudes(doc), include_rho=include_rho,
        defaults_applied=notes,
    )


def _log(args, message):
    if args.verbose:
        print(f"dephasim: {message}", file=sys.stderr)


def _cmd_trajectory(args, doc):
    _check_keys(doc, _SCENARIO_KEYS, "trajectory")
    cfg = _scenario_from(doc)
    _log(args, "running trajectory")
    record = _exp.run_trajectory(cfg)
    _exp.emit_records(record, args.format, args.out)
    _log(args, f"wrote {args.out}")
    return 0


def _cmd_sweep(args, doc):
    _check_keys(doc, _SWEEP_KEYS, "sweep")
    notes = []
    if "tau_values" in doc:
        for bad in ("tau_min", "tau_max", "tau_points"):
            if bad in doc:
                raise ConfigError(
                    f'config keys "tau_values" and "{bad}" are mutually exclusive'
                )
        raw = doc["tau_values"]
        if (not isinstance(raw, list) or not raw
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                           for x in raw)):
            raise ConfigError('config key "tau_values" must be a list of numbers')
        tau_grid = np.asarray(raw, dtype=float)
    else:
        lo = _number(doc, "tau_min", default=0.05)
        hi = _number(doc, "tau_max", default=2.0)
        pts = _integer(doc, "tau_points", default=40)
        if not ("tau_min" in doc or "tau_max" in doc or "tau_points" in doc):
            notes.append("tau grid = 40 points log-spaced on [0.05, 2] "
                         "chosen by the tool")
        if lo <= 0 or hi <= lo:
            raise ConfigError(
                f'need 0 < tau_min < tau_max, got tau_min={lo}, tau_max={hi}'
            )
        if pts < 2:
            raise ConfigError(f'config key "tau_points" must be >= 2, got {pts}')
        tau_grid = np.geomspace(lo, hi, pts)
    n_list = doc.get("n_list", [1, 2, 3])
    if (not isinstance(n_list, list) or not n_list
            or not all(isinstance(x, int) and not isinstance(x, bool)
                       for x in n_list)):
        raise ConfigError('config key "n_list" must be a non-empty list of integers')

    scenario_doc = {k: v for k, v in doc.items()
                    if k in ("s", "g", "omega_c", "cutoff", "beta", "omega_0",
                             "preparation", "amplitudes")}
    scenario_doc["tau"] = float(tau_grid[0])
    scenario_doc["t_max"] = float(tau_grid[0])
    scenario_doc["n_measurements"] = 1
    scenario_doc["dt"] = float(tau_grid[0]) / 200.0
    cfg = _scenario_from(scenario_doc)
    cfg = _exp.ScenarioConfig(
        cfg.spectral, cfg.bath_params, cfg.system, cfg.schedule,
        cfg.preparation, mode=_exp.Mode.BOTH,
        custom_amplitudes=cfg.custom_amplitudes,
        defaults_applied=tuple(cfg.defaults_applied) + tuple(notes),
    )
    _log(args, f"running sweep over {tau_grid.size} intervals")
    record = _exp.run_interval_sweep(cfg, tau_grid=tau_grid, n_list=n_list)
    _exp.emit_records(record, args.format, args.out)
    _log(args, f"wrote {args.out}")
    return 0


def _cmd_kernels(args, doc):
    _check_keys(doc, _KERNEL_KEYS, "kernels")
    notes = []
    s = _number(doc, "s", required=True)
    g = _number(doc, "g", required=True)
    omega_c = _number(doc, "omega_c", required=True)
    tau = _number(doc, "tau", required=True)
    if tau <= 0:
        raise ConfigError(f'config key "tau" must be > 0, got {tau}')
    t_max = _number(doc, "t_max")
    if t_max is None:
        t_max = 3.0 * tau
        notes.append("t_max=3*tau chosen by the tool")
    dt = _number(doc, "dt")
    if dt is None:
        dt = tau / 50.0
        notes.append("dt=tau/50 chosen by the tool")
    if dt <= 0 or t_max <= 0:
        raise ConfigError('config keys "dt" and "t_max" must be > 0')
    spectral = _bath.SpectralDensity(g=g, s=s, omega_c=omega_c,
                                     cutoff=_cutoff(doc, notes))
    beta = _beta(doc, notes)
    bd = _bath.BathDescriptor.continuous(spectral, _bath.BathParams(beta=beta))

    _log(args, "evaluating kernels")
    t_grid = np.arange(0.0, t_max + 0.5 * dt, dt)
    tp_grid = np.arange(0.0, tau - 0.5 * dt, dt)
    rows = []
    gam = np.atleast_1d(_bath.gamma_t(bd, t_grid))
    dlt = np.atleast_1d(_bath.delta_t(bd, t_grid))
    for i, t in enumerate(t_grid):
        rows.append(("gamma_t", "", "", float(t), float(gam[i])))
    for i, t in enumerate(t_grid):
        rows.append(("delta_t", "", "", float(t), float(dlt[i])))
    rows.append(("mu_pair", 1, 2, float(tau), float(_bath.mu_pair(bd, 1, 2, tau))))
    rows.append(("gamma_pair", 1, 2, float(tau),
                 float(_bath.gamma_pair(bd, 1, 2, tau))))
    eps = np.atleast_1d(_bath.epsilon_pn(bd, 1, 2, tp_grid, tau))
    sig = np.atleast_1d(_bath.sigma_pn(bd, 1, 2, tp_grid, tau))
    for i, tp in enumerate(tp_grid):
        rows.append(("epsilon_pn", 1, 2, float(tp), float(eps[i])))
    for i, tp in enumerate(tp_grid):
        rows.append(("sigma_pn", 1, 2, float(tp), float(sig[i])))

    meta = {
        "s": s, "g": g, "omega_c": omega_c, "cutoff": spectral.cutoff.value,
        "beta": "inf" if math.isinf(beta) else beta, "tau": tau,
        "t_max": t_max, "dt": dt, "notes": notes,
        "columns": "kernel,p,p_prime_or_n,t_or_tau,value",
    }
    record = _exp.TableRecord(
        ("kernel", "p", "p_prime_or_n", "t_or_tau", "value"), rows, meta=meta
    )
    _exp.emit_records(record, args.format, args.out)
    _log(args, f"wrote {args.out}")
    return 0


def _cmd_oracle_check(args, doc):
    _check_keys(doc, _ORACLE_KEYS, "oracle-check")
    notes = []
    raw_c = doc.get("couplings")
    raw_f = doc.get("frequencies")
    if not isinstance(raw_c, list) or not raw_c:
        raise ConfigError('config key "couplings" must be a non-empty list')
    if not isinstance(raw_f, list) or len(raw_f) != len(raw_c):
        raise ConfigError(
            'config key "frequencies" must be a list matching "couplings"'
        )
    couplings = []
    for entry in raw_c:
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            couplings.append(complex(entry))
        elif (isinstance(entry, list) and len(entry) == 2
              and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                      for x in entry)):
            couplings.append(complex(entry[0], entry[1]))
        else:
            raise ConfigError(
                'each "couplings" entry must be a number or an [re, im] pair'
            )
    n_max = _integer(doc, "n_max", default=12)
    if "n_max" not in doc:
        notes.append("n_max=12 chosen by the tool")
    db = _bath.DiscreteBath(couplings=couplings, frequencies=raw_f, n_max=n_max)
    beta = _beta(doc, notes)
    bp = _bath.BathParams(beta=beta)
    omega_0 = _omega_0(doc, notes)
    system = _qubits.SystemParams(omega_0=omega_0)
    tau = _number(doc, "tau", required=True)
    n_meas = _integer(doc, "n_measurements", default=1)
    t_max = _number(doc, "t_max")
    if t_max is None:
        t_max = (n_meas + 1) * tau - tau / 20.0
        notes.append("t_max=(n_measurements+1)*tau - tau/20 chosen by the tool")
    dt = _number(doc, "dt")
    if dt is None:
        dt = tau / 20.0
        notes.append("dt=tau/20 chosen by the tool")
    sched = _qubits.MeasurementSchedule(tau=tau, n_measurements=n_meas,
                                        t_max=t_max, dt=dt)
    prep = _preparation(doc)
    amps = _amplitudes(doc)
    if prep is _exp.Preparation.PRODUCT_X:
        psi = _qubits.state_product_x()
    elif prep is _exp.Preparation.BELL:
        psi = _qubits.state_bell()
    else:
        if amps is None:
            raise ConfigError("custom preparation requires amplitudes")
        psi = _qubits.TwoQubitPureState.normalized(np.asarray(amps, dtype=complex))
    reset_env = doc.get("reset_env", False)
    if not isinstance(reset_env, bool):
        raise ConfigError('config key "reset_env" must be a boolean')
    tolerance = _number(doc, "tolerance", default=1e-6)

    _log(args, "running exact reference")
    trajectory = _oracle.oracle_trajectory(psi, system, db, bp, sched,
                                           reset_env=reset_env)
    bd = _bath.BathDescriptor.discrete(db, bp)
    _log(args, "running closed form")
    devs = np.empty(trajectory.t.size)
    if reset_env:
        for i, t in enumerate(trajectory.t):
            rho = _qubits.evolve_reset(psi, system, bd, sched, float(t))
            devs[i] = float(np.max(np.abs(rho - trajectory.rho[i])))
        prob_line = None
    else:
        _, _, tp = _qubits.segment_grid(tau, t_max, dt)
        cache = _qubits.KernelCache(bd, tau, n_meas, t_prime_grid=np.unique(tp))
        for i, t in enumerate(trajectory.t):
            rho = _qubits.evolve_tracked(psi, system, bd, sched, cache, float(t))
            devs[i] = float(np.max(np.abs(rho - trajectory.rho[i])))
        z = _qubits.normalization_z(psi, bd, sched, cache, omega_0=omega_0)
        prob = float(np.prod(trajectory.probabilities)) if trajectory.probabilities else 1.0
        prob_line = abs(prob - z)

    max_dev = float(devs.max())
    print(f"max elementwise deviation: {max_dev:.6e}")
    if prob_line is not None:
        print(f"probability product vs normalization: {prob_line:.6e}")
    print(f"tolerance: {tolerance:.6e}")
    ok = max_dev <= tolerance and (prob_line is None or prob_line <= 1e-8)
    print("PASS" if ok else "FAIL")

    if args.out is not None:
        meta = {
            "couplings": [[c.real, c.imag] for c in couplings],
            "frequencies": [float(f) for f in raw_f],
            "n_max": n_max, "beta": "inf" if math.isinf(beta) else beta,
            "omega_0": omega_0, "tau": tau, "n_measurements": n_meas,
            "t_max": t_max, "dt": dt, "preparation": prep.value,
            "reset_env": reset_env, "tolerance": tolerance,
            "max_deviation": max_dev, "notes": notes,
        }
        record = _exp.TableRecord(
            ("t", "segment", "deviation"),
            [(float(t), int(sg), float(d))
             for t, sg, d in zip(trajectory.t, trajectory.segment, devs)],
            meta=meta,
        )
        _exp.emit_records(record, args.format, args.out)
    return 0 if ok else 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dephasim",
        description="Two-qubit dephasing dynamics under repeated measurements",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("trajectory", "concurrence trajectory over the time grid", True),
        ("sweep", "measurement-interval sweep of peak concurrence", True),
        ("kernels", "bath kernel table over time grids", True),
        ("oracle-check", "closed form vs exact diagonalization", False),
    )
    for name, help_text, out_required in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=out_required,
                       help="output file path" + ("" if out_required else " (optional)"))
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="output format (default csv)")
        p.add_argument("-v", "--verbose", action="store_true",
                       help="stage-per-line log on stderr")
    return parser


_DISPATCH = {
    "trajectory": _cmd_trajectory,
    "sweep": _cmd_sweep,
    "kernels": _cmd_kernels,
    "oracle-check": _cmd_oracle_check,
}


def _error_line(category, exc):
    message = " ".join(str(exc).split())
    print(f"dephasim: error: {category}: {message}", file=sys.stderr)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_config(args.config)
        return _DISPATCH[args.command](args, doc)
    except ConfigError as exc:
        _error_line("config", exc)
        return 2
    except OSError as exc:
        _error_line("io", exc)
        return 3
    except ComplexityError as exc:
        _error_line("complexity", exc)
        return 5
    except QuadratureError as exc:
        _error_line("numerical", exc)
        return 4
    except np.linalg.LinAlgError as exc:
        _error_line("numerical", exc)
        return 4
    except DephasimError as exc:
        _error_line("numerical", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
