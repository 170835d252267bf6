"""Command-line front end: ``gravidec <command> --config <path> [--key value]...``.

The configuration is one json document. Every ``--dotted.key value`` pair on
the command line overrides that key (values are parsed as json when possible,
otherwise kept as strings). Output goes to ``output.path`` (stdout when null)
as csv (``#`` header lines echoing the resolved config, then a column line
and numeric rows) or as a single json object {config, columns, rows,
provenance}. Identical config and seed give byte-identical output.

Exit codes: 0 success, 2 configuration or domain error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import copy
import io
import json
import math
import os
import sys
from typing import Any, Callable

import numpy as np

from . import __version__, oracle
from . import decoherence as dec
from . import geometry, langevin_entropy as le, noise_kernels as nk, qbm_validation as qbm
from . import special_functions as sf
from .errors import ConfigError, DomainError, GravidecError, NumericalError, SaturationError
from .units_constants import HBAR, K_B, PhysicalParams

COMMANDS = ("kernel", "decoherence", "dectime", "scatter", "langevin", "entropy", "validate")

DEFAULT_CONFIG: dict[str, Any] = {
    "state": {"tag": "vacuum"},
    "params": {"m": 1e-20, "v": 1.0, "L0": 1e-6, "Xi": None, "eta": 0.0, "T_int": 300.0,
               "source": "earth"},
    "grid": {"t_min": 0.0, "t_max": 10.0, "n_points": 50, "log_spacing": False, "units": "x"},
    "theta": {"min": 0.01, "max": math.pi, "n_points": 50},
    "protocol": None,
    "states": None,
    "configuration": "one",
    "v1": None,
    "v2": 0.0,
    "noise_scale": None,
    "output": {"path": None, "format": "csv"},
    "seed": 0,
    "mc_samples": 1000,
}


# ---------------------------------------------------------------------------
# Configuration handling
# ---------------------------------------------------------------------------

def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _set_dotted(cfg: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = cfg
    for key in keys[:-1]:
        if node.get(key) is None:
            node[key] = {}
        if not isinstance(node[key], dict):
            raise ConfigError(f"cannot set {dotted}: {key} is not an object")
        node = node[key]
    leaf = keys[-1]
    if isinstance(value, dict) and isinstance(node.get(leaf), dict):
        node[leaf] = _merge(node[leaf], value)
    else:
        node[leaf] = value


def parse_overrides(tokens: list[str]) -> list[tuple[str, Any]]:
    pairs = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise ConfigError(f"expected --key value, got {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ConfigError(f"missing value for --{key}")
            raw = tokens[i + 1]
            i += 2
        pairs.append((key, _parse_value(raw)))
    return pairs


def resolve_config(command: str, config_path: str | None, overrides: list[tuple[str, Any]]) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config_path} is not valid json: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a json object")
        cfg = _merge(cfg, loaded)
    for key, value in overrides:
        _set_dotted(cfg, key, value)
    seed_env = os.environ.get("GRAVIDEC_SEED")
    if seed_env is not None:
        try:
            cfg["seed"] = int(seed_env)
        except ValueError as exc:
            raise ConfigError(f"GRAVIDEC_SEED must be an integer, got {seed_env!r}") from exc
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg["command"] = command
    return cfg


def build_state(spec: Any) -> nk.GravitonState:
    if isinstance(spec, str):
        spec = {"tag": spec}
    if not isinstance(spec, dict) or "tag" not in spec:
        raise ConfigError("state must be an object with a 'tag'")
    extra = set(spec) - {"tag", "T_g", "alpha", "r"}
    if extra:
        raise ConfigError(f"unknown state keys {sorted(extra)}")
    try:
        return nk.GravitonState(sf.StateTag(spec["tag"]), spec.get("T_g"), spec.get("alpha"), spec.get("r"))
    except ValueError as exc:
        raise ConfigError(f"bad state {spec}: {exc}") from exc


def build_params(spec: dict) -> PhysicalParams:
    spec = dict(spec)
    source = spec.pop("source", None)
    if source is not None:
        if source not in geometry.SOURCES:
            raise ConfigError(f"unknown source {source!r}; choose from {sorted(geometry.SOURCES)}")
        mass, radius = geometry.SOURCES[source]
        spec.setdefault("M_N", mass)
        spec.setdefault("R_N", radius)
    allowed = {"m", "v", "L0", "Xi", "eta", "T_int", "M_N", "R_N"}
    extra = set(spec) - allowed
    if extra:
        raise ConfigError(f"unknown params keys {sorted(extra)}")
    try:
        return PhysicalParams(**{k: (float(v) if v is not None else None) for k, v in spec.items()})
    except TypeError as exc:
        raise ConfigError(f"bad params: {exc}") from exc


def build_times(grid: dict, unit: float) -> np.ndarray:
    try:
        t_min, t_max, n = float(grid["t_min"]), float(grid["t_max"]), int(grid["n_points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid needs t_min, t_max, n_points: {exc}") from exc
    if not t_min < t_max:
        raise ConfigError("grid needs t_min < t_max")
    if n < 2:
        raise ConfigError("grid needs n_points >= 2")
    units = grid.get("units", "s")
    if units not in ("s", "x"):
        raise ConfigError("grid.units must be 's' or 'x' (multiples of hbar/Lambda)")
    if grid.get("log_spacing", False):
        if t_min <= 0.0:
            raise ConfigError("log_spacing needs t_min > 0")
        t = np.geomspace(t_min, t_max, n)
    else:
        t = np.linspace(t_min, t_max, n)
    if t_min < 0.0:
        raise ConfigError("times must be >= 0")
    return t * unit if units == "x" else t


def build_protocol(spec: Any) -> le.ForceProtocol:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("this command needs protocol = {name, ...parameters}")
    params = {k: float(v) for k, v in spec.items() if k != "name"}
    return le.make_protocol(spec["name"], **params)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

Table = tuple[list[str], list[list[float]], dict]


def _cmd_kernel(cfg: dict) -> Table:
    state, params = build_state(cfg["state"]), build_params(cfg["params"])
    t = build_times(cfg["grid"], HBAR / params.Lambda)
    x = params.Lambda * t / HBAR
    cov = nk.graviton_noise(state, params, t[:, None], t[None, :])
    rows = [[t[i], t[j], x[i], x[j], cov[i, j]] for i in range(t.size) for j in range(t.size)]
    return ["t_s", "tp_s", "x", "xp", "N_g_per_s6"], rows, {}


def _dec_times(state: nk.GravitonState, params: PhysicalParams, configuration: str) -> dict:
    out: dict[str, Any] = {"short_s": dec.dec_time_short(state, params)}
    try:
        out["long_s"] = dec.dec_time_long(state, params)
    except GravidecError as exc:
        out["long_s"] = None
        out["long_note"] = str(exc)
    try:
        out["numeric_s"] = dec.dec_time_numeric(state, params, configuration)
    except SaturationError as exc:
        out["numeric_s"] = None
        out["saturation"] = {"gamma_sat": exc.gamma_sat, "gamma_observed": exc.gamma_observed}
    except NumericalError as exc:
        out["numeric_s"] = None
        out["numeric_note"] = str(exc)
    return out


def _cmd_decoherence(cfg: dict) -> Table:
    params = build_params(cfg["params"])
    states = [build_state(s) for s in (cfg["states"] or [cfg["state"]])]
    configuration = dec.Config(cfg["configuration"]).value
    t = build_times(cfg["grid"], HBAR / params.Lambda)
    columns = ["t_s", "x"]
    data = [t, params.Lambda * t / HBAR]
    times_by_state = {}
    for i, st in enumerate(states):
        curve = dec.decoherence_curve(st, params, t, configuration, cfg["v1"], float(cfg["v2"]))
        columns.append(f"gamma_{i}_{st.tag.value}")
        data.append(curve.gamma)
        times_by_state[f"{i}_{st.tag.value}"] = _dec_times(st, params, configuration)
    rows = [list(r) for r in zip(*data)]
    return columns, rows, {"states": [s.as_dict() for s in states], "dec_times": times_by_state}


def _nan(v):
    return math.nan if v is None else v


def _cmd_dectime(cfg: dict) -> Table:
    state, params = build_state(cfg["state"]), build_params(cfg["params"])
    times = _dec_times(state, params, dec.Config(cfg["configuration"]).value)
    sat = times.get("saturation", {}).get("gamma_sat")
    unit = HBAR / dec.state_coefficients(state, params).Lambda_A
    row = [times["short_s"], _nan(times["long_s"]), _nan(times["numeric_s"]), _nan(sat),
           times["short_s"] / unit]
    return ["t_short_s", "tau_long_s", "t_numeric_s", "gamma_sat", "x_short"], [row], {"notes": times}


def _cmd_scatter(cfg: dict) -> Table:
    params = build_params(cfg["params"])
    spec = cfg["theta"]
    theta = np.linspace(float(spec["min"]), float(spec["max"]), int(spec["n_points"]))
    ds = geometry.diff_cross_section(theta, params.M_N)
    unit = (geometry.G * params.M_N / geometry.C**2) ** 2
    rows = [[th, d, d / unit, geometry.polarization_sum(th)] for th, d in zip(theta, ds)]
    return ["theta_rad", "dsigma_dOmega_m2", "dsigma_dOmega_over_GM2_c4", "polarization_sum"], rows, {}


def _thermal_beta(state: nk.GravitonState) -> float:
    if state.tag is not sf.StateTag.thermal:
        raise ConfigError("this command needs a thermal graviton state")
    return 1.0 / (K_B * state.T_g)


def _langevin_grid(cfg: dict, state, params, proto) -> nk.KernelGrid:
    n = int(cfg["grid"].get("n_points", le.DEFAULT_GRID_POINTS))
    grid = nk.build_kernel_grid(state, params, proto.grid(n))
    if cfg.get("noise_scale") is not None:
        grid = grid.with_noise_scale(float(cfg["noise_scale"]))
    return grid


def _cmd_langevin(cfg: dict) -> Table:
    state, params = build_state(cfg["state"]), build_params(cfg["params"])
    beta = _thermal_beta(state)
    proto = build_protocol(cfg["protocol"])
    grid = _langevin_grid(cfg, state, params, proto)
    ens = le.sample_trajectories(grid, proto, params.m, int(cfg["mc_samples"]), int(cfg["seed"]))
    xi0 = le.free_solution(proto, params.m, grid.times)
    rows = [[t, a, b, c] for t, a, b, c in zip(grid.times, xi0, ens.paths.mean(axis=0), ens.paths.std(axis=0, ddof=1))]
    mom = oracle.sample_moments(ens.works)
    summary = {"beta_per_J": beta, "work_mean_J": mom.mean, "work_mean_se_J": mom.sem,
               "work_var_J2": mom.var, "work_var_se_J2": mom.var_se, "n": mom.n,
               "jitter": grid.jitter, "noise_scale": grid.noise_scale}
    return ["t_s", "xi0_m", "xi_mean_m", "xi_std_m"], rows, {"ensemble": summary}


def _cmd_entropy(cfg: dict) -> Table:
    state, params = build_state(cfg["state"]), build_params(cfg["params"])
    _thermal_beta(state)
    proto = build_protocol(cfg["protocol"])
    n_times = int(cfg["grid"].get("n_points", le.DEFAULT_GRID_POINTS))
    stats = le.work_moments(state, params, proto, n_times=n_times,
                            noise_scale=None if cfg.get("noise_scale") is None else float(cfg["noise_scale"]))
    n = int(cfg["mc_samples"])
    grid = _langevin_grid(cfg, state, params, proto)
    ens = le.sample_trajectories(grid, proto, params.m, n, int(cfg["seed"]))
    mc = le.ensemble_statistics(ens, stats.beta)
    report = le.jarzynski_check(stats, max(n, 2), int(cfg["seed"]))
    columns = ["mean_W_J", "var_W_J2", "W_diss_J", "entropy", "delta_F_J", "beta_per_J",
               "mc_mean_W_J", "mc_mean_se_J", "mc_var_W_J2", "mc_var_se_J2",
               "log_lhs_analytic", "log_rhs", "log_mc", "log_mc_se", "mc_z"]
    row = [stats.mean_W, stats.var_W, stats.W_diss, stats.entropy, stats.delta_F, stats.beta,
           mc.mc_mean_W, mc.mc_mean_se, mc.mc_var_W, mc.mc_var_se,
           report.log_lhs_analytic, report.log_rhs, report.log_mc, report.log_mc_se, report.mc_z]
    return columns, [row], {"jarzynski": {"analytic_ok": report.analytic_ok, "mc_ok": report.mc_ok}}


def validation_suite() -> list[tuple[str, Callable[[], tuple[float, float]], float]]:
    """Independent-route checks: (name, () -> (value, reference), relative tolerance)."""
    vac = nk.GravitonState.vacuum()
    p = PhysicalParams(m=1e-20, v=10.0, L0=1e-6)
    lam = p.Lambda / HBAR
    states = [vac, nk.GravitonState.thermal(0.5 * p.Lambda / (math.pi * K_B)),
              nk.GravitonState.coherent(1.3), nk.GravitonState.squeezed(0.7)]
    checks: list = []

    def f5():
        ref = oracle.adaptive_quad(lambda y: y**5 * np.cos(y), 0.0, 2.0, 1e-14).value / 64.0
        return sf.F_n(5, 2.0), ref

    checks.append(("F_5(2) vs quadrature", f5, 1e-10))
    for st in states:
        def kern(st=st):
            t, tp = 37.0 / lam, 12.0 / lam
            return nk.graviton_noise(st, p, t, tp), nk.oracle_noise(st, p, t, tp)
        checks.append((f"N_g {st.tag.value} vs frequency quadrature", kern, 1e-8))
    for st in states:
        def g1(st=st):
            tf = 5.0 / lam
            return dec.gamma1(st, p, tf), dec.gamma1_general(st, p, dec.triangular_path(p.v, tf), p.Xi, tf)
        checks.append((f"Gamma_1 {st.tag.value} vs time quadrature", g1, 1e-4))

    def g2():
        tf = 5.0 / lam
        return dec.gamma2(vac, p, 30.0, 10.0, tf), dec.gamma2_general(vac, p, 30.0, 10.0, tf)

    checks.append(("Gamma_2 vacuum vs time quadrature", g2, 1e-4))
    for st in sf.StateTag:
        for which in ("I", "III"):
            def cont(st=st, which=which):
                x = sf.SERIES_SWITCH
                return sf.shape_f(st, which, x, method="closed"), sf.shape_f(st, which, x, method="series")
            checks.append((f"f_{st.value}^{which} series/closed continuity", cont, 1e-9))

    def angular():
        def integrand(n):
            pair = geometry.polarization_tensors(n)
            return (np.einsum("ij,kl->ijkl", pair.eps_plus, pair.eps_plus)
                    + np.einsum("ij,kl->ijkl", pair.eps_cross, pair.eps_cross))
        num = oracle.sphere_quad(integrand, 8, 16)
        exact = geometry.angular_tensor_array()
        return float(np.max(np.abs(num - exact))) + 1.0, 1.0

    checks.append(("angular tensor vs sphere quadrature", angular, 1e-8))
    bath = qbm.OhmicBath(gamma0=0.3, cutoff=1e3, mass=2.0, beta=1.0 / 1e2, Omega=20.0)

    def fdt():
        return 1.0 + qbm.fdt_check(bath, 100.0), 1.0

    checks.append(("fluctuation-dissipation residual", fdt, 1e-6))
    for k, name in enumerate(("dOmega2", "gamma", "sigma2", "Sigma2")):
        def cl(k=k):
            return qbm.caldeira_leggett_coefficients(bath)[k], qbm.caldeira_leggett_integrals(bath)[k]
        checks.append((f"Caldeira-Leggett {name} vs tau integral", cl, 1e-8))
    return checks


def _cmd_validate(cfg: dict) -> Table:
    rows, names = [], []
    for k, (name, fn, tol) in enumerate(validation_suite()):
        value, ref = fn()
        err = abs(value - ref) / abs(ref) if ref != 0 else abs(value)
        rows.append([k, value, ref, err, tol, 1.0 if err <= tol else 0.0])
        names.append(name)
    return ["check", "value", "reference", "rel_error", "tolerance", "passed"], rows, {"checks": names}


_DISPATCH = {
    "kernel": _cmd_kernel,
    "decoherence": _cmd_decoherence,
    "dectime": _cmd_dectime,
    "scatter": _cmd_scatter,
    "langevin": _cmd_langevin,
    "entropy": _cmd_entropy,
    "validate": _cmd_validate,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def render(cfg: dict, columns: list[str], rows: list[list[float]], extra: dict) -> str:
    provenance = {"package": "gravidec", "version": __version__, "command": cfg["command"],
                  "seed": cfg["seed"], "units": "SI; x = Lambda t / hbar is dimensionless", **extra}
    fmt = cfg["output"].get("format", "csv")
    if fmt == "json":
        doc = {"config": cfg, "columns": columns, "rows": rows, "provenance": provenance}
        return json.dumps(_plain(doc), sort_keys=True, indent=1) + "\n"
    if fmt != "csv":
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# gravidec {cfg['command']}\n")
    buf.write("# config: " + json.dumps(_plain(cfg), sort_keys=True) + "\n")
    buf.write("# provenance: " + json.dumps(_plain(provenance), sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def run(cfg: dict) -> int:
    """Execute a resolved configuration; returns the number of failed checks (validate only)."""
    columns, rows, extra = _DISPATCH[cfg["command"]](cfg)
    text = render(cfg, columns, rows, extra)
    path = cfg["output"].get("path")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg["command"] == "validate":
        return sum(1 for r in rows if r[-1] != 1.0)
    return 0


def _fail(code: int, exc: Exception, command: str | None) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "command": command}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gravidec", description="Graviton-induced decoherence calculator.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="json run configuration")
    args, rest = parser.parse_known_args(argv)
    try:
        cfg = resolve_config(args.command, args.config, parse_overrides(rest))
        failed = run(cfg)
    except (ConfigError, DomainError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NumericalError):
            return _fail(3, exc, args.command)
        return _fail(2, exc, args.command)
    except (NumericalError, ArithmeticError) as exc:
        return _fail(3, exc, args.command)
    if failed:
        sys.stderr.write(json.dumps({"error": "ValidationFailed", "failed_checks": failed}) + "\n")
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
