"""Command-line front end.

Exit status: 0 all checks passed, 1 usage or configuration error, 2 a verification
tolerance was violated (or nothing normalizable exists), 3 solver or I/O failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import catalog as cat
from . import eigensolve as es
from . import gridops as go
from . import states as st
from .catalog import Branch, FamilyId, Params
from .errors import BranchError, GridError, LevelError, MatsusyError, ParamError

F = FamilyId

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE, EXIT_FAILURE = 0, 1, 2, 3
COMMANDS = ("list", "validate", "verify-si", "spectrum", "ground", "excited", "isospectral",
            "sweep")
_USAGE_ERRORS = (ParamError, BranchError, LevelError, GridError)

SI_TOL = 1e-9
INTERTWINING_TOL = 1e-4
KERNEL_TOL = 1e-6
RAYLEIGH_TOL = 1e-4


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str | None = None
    branch: str | None = None
    kappa: float | None = None
    mu: float | None = None
    omega: float | None = None
    lam: float | None = None
    c: float | None = None
    grid_n: int = 4000
    grid_eps: float | None = None
    grid_L: float | None = None
    levels: int = 3
    tol_abs: float | None = None
    tol_rel: float | None = None
    out: str | None = None
    format: str = "json"
    plot: str | None = None
    level: int = 0
    solution: int = 1
    sweep_param: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_num: int = 5
    sweep_of: str = "spectrum"
    jobs: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


_FIELDS = {f.name for f in fields(RunConfig)}
_ALIASES = {"lambda": "lam", "L": "grid_L"}
_INT_FIELDS = {"grid_n", "levels", "level", "solution", "sweep_num", "jobs"}


def _key(raw: str) -> str:
    k = _ALIASES.get(raw, raw.replace("-", "_"))
    if k == "grid_l":
        k = "grid_L"
    return k


def config_from_mapping(data: dict, source: str = "config") -> RunConfig:
    """Build a RunConfig, rejecting unknown keys and coercing numeric types."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    clean = {}
    for raw, val in data.items():
        k = _key(str(raw))
        if k not in _FIELDS:
            raise ConfigError(f"{source}: unknown key {raw!r}")
        if val is not None and k in _INT_FIELDS:
            if isinstance(val, bool) or not float(val).is_integer():
                raise ConfigError(f"{source}: key {raw!r} must be an integer")
            val = int(val)
        elif val is not None and k in ("kappa", "mu", "omega", "lam", "c", "grid_eps", "grid_L",
                                       "tol_abs", "tol_rel", "sweep_start", "sweep_stop"):
            if isinstance(val, bool):
                raise ConfigError(f"{source}: key {raw!r} must be a number")
            try:
                val = float(val)
            except (TypeError, ValueError):
                raise ConfigError(f"{source}: key {raw!r} must be a number") from None
        clean[k] = val
    if clean.get("command") not in COMMANDS:
        raise ConfigError(f"{source}: key 'command' must be one of {', '.join(COMMANDS)}")
    if clean.get("format", "json") not in ("json", "csv"):
        raise ConfigError(f"{source}: key 'format' must be json or csv")
    return RunConfig(**clean)


def load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# ---------------------------------------------------------------------------
# Parameters from a config
# ---------------------------------------------------------------------------

def _required(f: FamilyId) -> tuple[str, ...]:
    if f is F.F0_oscillator:
        return ("mu", "omega")
    if f is F.F2_morse_like:
        return ("kappa", "omega")
    if f in cat.SCALAR_FAMILIES:
        return ("kappa", "omega")
    if f is F.F6_extended:
        return ("kappa", "omega", "c")
    return ("kappa", "mu", "omega")


def resolve_params(cfg: RunConfig) -> tuple[FamilyId, Params, list[str]]:
    if cfg.family is None:
        raise ConfigError("--family is required")
    f = cat.parse_family(cfg.family)
    missing = [k for k in _required(f) if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"missing parameter(s) for {f}: {', '.join('--' + k for k in missing)}")
    notes = []
    mu = cfg.mu
    if mu is None:
        if f is F.F2_morse_like:
            mu = 1.0
            notes.append("mu not given: set to 1 (it only translates x, levels do not depend on it)")
        else:
            mu = 0.0
    kappa = 0.0 if cfg.kappa is None else cfg.kappa
    lam = 1.0 if cfg.lam is None else cfg.lam
    p = Params(kappa, mu, cfg.omega, lam, cfg.c)
    cat.validate_params(f, p)
    return f, p, notes


def _policy(cfg: RunConfig, levels: int) -> go.TruncationPolicy:
    return go.TruncationPolicy(eps=cfg.grid_eps, tail=cfg.grid_L, levels=max(1, levels))


def _branches(cfg: RunConfig, f: FamilyId, p: Params) -> list[Branch]:
    if cfg.branch is None or cfg.branch == "both":
        return sorted(cat.branch_availability(f, p), key=str)
    return [cat.parse_branch(cfg.branch)]


def _single_branch(cfg: RunConfig, f: FamilyId, p: Params) -> Branch:
    if cfg.branch is not None:
        return cat.parse_branch(cfg.branch)
    avail = cat.branch_availability(f, p)
    if Branch.KappaBranch in avail or f in (F.F0_oscillator, F.F6_extended):
        return Branch.KappaBranch
    if avail:
        return next(iter(avail))
    raise BranchError(f"no normalizable branch for {f} at {p.as_dict()}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _plain(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (Branch, FamilyId)):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return f"{float(v):.16e}"


def emit_plot_data(report, path: str, header: dict | None = None) -> None:
    """Whitespace columns with a '#' header: ``x phi xi`` or ``n N E_analytic E_numeric``."""
    meta = " ".join(f"{k}={_plain(v)}" for k, v in (header or {}).items())
    lines = []
    if isinstance(report, go.WaveFunction):
        lines.append("# x phi xi")
        if meta:
            lines.append("# " + meta)
        for x, a, b in zip(report.grid.nodes, report.phi, report.xi):
            lines.append(f"{_fmt(x)} {_fmt(a)} {_fmt(b)}")
    elif isinstance(report, es.SpectrumReport):
        lines.append("# n N E_analytic E_numeric")
        if meta:
            lines.append("# " + meta)
        for m in report.matched:
            lines.append(f"{m.reference.n} {_fmt(m.reference.N)} {_fmt(m.reference.energy)} "
                         f"{_fmt(m.numeric.energy)}")
        for s in report.unmatched:
            lines.append(f"{s.n} {_fmt(s.N)} {_fmt(s.energy)} nan")
    else:
        raise TypeError("plot data needs a WaveFunction or a SpectrumReport")
    _write_text(path, "\n".join(lines) + "\n")


def _spectrum_csv(rep: es.SpectrumReport) -> str:
    rows = ["n,N,branch,E_analytic,E_numeric,abs_gap,rel_gap"]
    for m in rep.matched:
        r = m.reference
        rows.append(f"{r.n},{_fmt(r.N)},{r.branch},{_fmt(r.energy)},{_fmt(m.numeric.energy)},"
                    f"{_fmt(m.abs_gap)},{_fmt(m.rel_gap)}")
    for s in rep.unmatched:
        rows.append(f"{s.n},{_fmt(s.N)},{s.branch},{_fmt(s.energy)},nan,nan,nan")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@dataclass
class Outcome:
    result: dict
    passed: bool
    message: str = ""
    csv: str | None = None
    plot: object = None


def _cmd_list(cfg: RunConfig) -> Outcome:
    rules = cat.parameter_rules()
    fams = []
    for f in F:
        fams.append({
            "family": str(f),
            "kind": "scalar reference" if f in cat.SCALAR_FAMILIES else "matrix",
            "dual_shape_invariant": f in cat.DUAL_FAMILIES,
            "rule": rules.get(str(f), ""),
        })
    return Outcome({"families": fams}, True)


def _cmd_validate(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    avail = sorted(cat.branch_availability(f, p), key=str)
    levels = {str(b): cat.admissible_levels(f, b, p) for b in avail}
    realized = cat.realized_branch(f, p) if f in cat.MATRIX_FAMILIES else None
    verdict = "ok" if avail else "no normalizable branch"
    res = {"available_branches": [str(b) for b in avail], "admissible_levels": levels,
           "realized_branch": None if realized is None else str(realized), "verdict": verdict,
           "notes": notes}
    return Outcome(res, bool(avail), verdict)


def _bump(W, g: go.Grid) -> go.WaveFunction:
    centre = 0.5 * (g.x_lo + g.x_hi)
    if math.isfinite(W.domain[0]) and not math.isfinite(W.domain[1]):
        centre = g.x_lo + min(3.0 * W.scale, 0.3 * (g.x_hi - g.x_lo))
    width = min(0.5 * W.scale, 0.08 * (g.x_hi - g.x_lo), 0.25 * (centre - g.x_lo))
    return go.gaussian_bump(g, centre, width)


def _cmd_verify_si(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    if f in cat.SCALAR_FAMILIES:
        raise ParamError(f"{f} is a scalar reference; nothing to verify")
    defined = [Branch.KappaBranch] + ([Branch.MuBranch] if f in cat.DUAL_FAMILIES else [])
    if cfg.branch not in (None, "both"):
        defined = [cat.parse_branch(cfg.branch)]
    g = go.build_grid(f, p, cfg.grid_n, _policy(cfg, 1))
    vhat = cat.potential(f, p)
    out, ok = {}, True
    for b in defined:
        W = cat.superpotential(f, b, p)
        si = go.shape_invariance_residual(f, b, p)
        fac = go.factorization_residual(f, b, p)
        extracted = cat.extract_constant(W, vhat)
        entry = {
            "shape_invariance_residual": si,
            "factorization_residual": fac,
            "constant": cat.factorization_constant(f, b, p),
            "constant_extracted": extracted,
            "intertwining_residual": go.intertwining_residual(f, p, _bump(W, g), b),
        }
        if b is Branch.MuBranch:
            printed = cat.printed_mu_constant(f, p)
            entry["constant_printed"] = printed
            entry["printed_matches_extracted"] = (printed is not None
                                                  and abs(printed - extracted) <= 1e-8 * max(1.0, abs(extracted)))
        if f is F.F0_oscillator:
            entry["shape_invariance_constant"] = cat.shape_invariance_constant(f, b, p)
        ok &= si < SI_TOL and fac < SI_TOL and entry["intertwining_residual"] < INTERTWINING_TOL
        out[str(b)] = entry
    notes.append("convention: H = a+ a- - c, so E_0 = -c; the printed form a+ a- + c would flip "
                 "every level sign")
    res = {"branches": out, "grid": g.metadata(), "tolerances": {
        "shape_invariance": SI_TOL, "factorization": SI_TOL, "intertwining": INTERTWINING_TOL},
        "notes": notes}
    return Outcome(res, ok, "" if ok else "identity residual above tolerance")


def _cmd_spectrum(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    branches = None if cfg.branch in (None, "both") else [cat.parse_branch(cfg.branch)]
    if not cat.branch_availability(f, p):
        return Outcome({"verdict": "no normalizable branch", "notes": notes}, False,
                       "no normalizable branch")
    rep = es.spectrum_report(f, p, cfg.levels, cfg.grid_n, _policy(cfg, cfg.levels), branches,
                             cfg.tol_abs, cfg.tol_rel)
    rep.notes = notes + rep.notes
    res = rep.to_dict()
    consts = {}
    for b in sorted(cat.branch_availability(f, p), key=str):
        entry = {"constant": cat.factorization_constant(f, b, p)}
        if b is Branch.MuBranch:
            entry["constant_printed"] = cat.printed_mu_constant(f, p)
        consts[str(b)] = entry
    res["constants"] = consts
    res["ok"] = rep.ok
    return Outcome(res, rep.ok, "" if rep.ok else "analytic level without numeric partner",
                   csv=_spectrum_csv(rep), plot=rep)


def _state_outcome(cfg, f, b, p, psi, energy, n, extra, ok, msg) -> Outcome:
    W = cat.superpotential(f, b, p) if n == 0 else None
    meta = st.state_metadata(f, b, cfg.solution, n, energy, psi, W)
    meta.update(extra)
    meta["grid"] = psi.grid.metadata()
    meta["params"] = p.as_dict()
    lines = ["x,phi,xi"] + [f"{_fmt(x)},{_fmt(a)},{_fmt(c)}"
                            for x, a, c in zip(psi.grid.nodes, psi.phi, psi.xi)]
    return Outcome(meta, ok, msg, csv="\n".join(lines) + "\n", plot=psi)


def _cmd_ground(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    b = _single_branch(cfg, f, p)
    g = go.build_grid(f, p, cfg.grid_n, _policy(cfg, 1))
    if f in (F.F0_oscillator, F.F6_extended):
        sols = st.ground_state_ode(f, b, p, g)
        if len(sols) < cfg.solution:
            raise BranchError(f"only {len(sols)} normalizable ground state(s)")
        psi, energy = sols[cfg.solution - 1], cat.level_energy(f, b, p, 0)
        method = "ode"
    else:
        psi, energy = st.ground_state_closed_form(st.GroundStateSpec(f, b, cfg.solution, p), g)
        method = "closed_form"
    kernel = st.ground_state_residual(cat.superpotential(f, b, p), psi)
    ok = kernel < KERNEL_TOL
    return _state_outcome(cfg, f, b, p, psi, energy, 0, {"method": method, "notes": notes}, ok,
                          "" if ok else "kernel residual above tolerance")


def _cmd_excited(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    b = _single_branch(cfg, f, p)
    g = go.build_grid(f, p, cfg.grid_n, _policy(cfg, cfg.level + 1))
    psi, energy = st.excited_state(f, b, p, cfg.level, g, cfg.solution)
    H = go.assemble_hamiltonian(cat.potential(f, p), g)
    rq = st.rayleigh_quotient(H, psi)
    rel = abs(rq - energy) / abs(energy) if energy != 0 else abs(rq)
    tol = RAYLEIGH_TOL if cfg.tol_rel is None else cfg.tol_rel
    extra = {"rayleigh_quotient": rq, "rayleigh_rel_gap": rel,
             "chain_eigen_residual": st.chain_eigen_residual(f, b, p, cfg.level, g, cfg.solution),
             "tol_rel": tol, "notes": notes}
    ok = rel < tol
    return _state_outcome(cfg, f, b, p, psi, energy, cfg.level, extra, ok,
                          "" if ok else "Rayleigh quotient off the analytic level")


def _cmd_isospectral(cfg: RunConfig) -> Outcome:
    f, p, notes = resolve_params(cfg)
    ref, q = es.isospectral_partner(f, p)
    rep = es.isospectral_check(f, p, ref, q, cfg.levels, cfg.grid_n, _policy(cfg, cfg.levels),
                               cfg.tol_abs, cfg.tol_rel)
    rep.notes = notes + rep.notes
    res = rep.to_dict()
    res["scalar_reference"] = str(ref)
    res["scalar_params"] = q.as_dict()
    res["ok"] = rep.ok
    return Outcome(res, rep.ok, "" if rep.ok else "spectra differ", csv=_spectrum_csv(rep),
                   plot=rep)


_SWEEPABLE = {"kappa", "mu", "omega", "lam", "c"}


def _sweep_point(cfg: RunConfig) -> dict:
    try:
        out = _COMMANDS[cfg.command](cfg)
        return {"status": "passed" if out.passed else "violated", "message": out.message,
                "result": out.result}
    except (ParamError, BranchError, LevelError) as exc:
        return {"status": "skipped", "message": f"{type(exc).__name__}: {exc}"}
    except MatsusyError as exc:
        return {"status": "failed", "message": f"{type(exc).__name__}: {exc}"}


def _cmd_sweep(cfg: RunConfig) -> Outcome:
    key = _key(cfg.sweep_param or "")
    if key not in _SWEEPABLE:
        raise ConfigError("--sweep-param must be one of kappa, mu, omega, lambda, c")
    if cfg.sweep_start is None or cfg.sweep_stop is None or cfg.sweep_num < 1:
        raise ConfigError("sweep needs --sweep-start, --sweep-stop and --sweep-num >= 1")
    if cfg.sweep_of not in ("validate", "verify-si", "spectrum", "isospectral"):
        raise ConfigError("--sweep-of must be validate, verify-si, spectrum or isospectral")
    values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_num)
    points = [replace(cfg, command=cfg.sweep_of, out=None, plot=None, **{key: float(v)})
              for v in values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(c) for c in points]
    rows = [{"value": float(v), **r} for v, r in zip(values, results)]
    counts = {s: sum(r["status"] == s for r in rows)
              for s in ("passed", "violated", "skipped", "failed")}
    res = {"parameter": key, "inner_command": cfg.sweep_of, "counts": counts, "points": rows}
    if counts["failed"]:
        raise _SweepFailure(res)
    ok = counts["violated"] == 0
    return Outcome(res, ok, "" if ok else "tolerance violated at some sweep points")


class _SweepFailure(MatsusyError):
    def __init__(self, result: dict):
        super().__init__("solver failure at some sweep points")
        self.result = result


_COMMANDS = {
    "list": _cmd_list, "validate": _cmd_validate, "verify-si": _cmd_verify_si,
    "spectrum": _cmd_spectrum, "ground": _cmd_ground, "excited": _cmd_excited,
    "isospectral": _cmd_isospectral, "sweep": _cmd_sweep,
}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def _report(cfg: RunConfig, status: str, code: int, result=None, error=None) -> dict:
    return {"command": cfg.command, "status": status, "exit_code": code,
            "config": cfg.to_dict(), "result": result, "error": error}


def _emit(cfg: RunConfig, report: dict, outcome: Outcome | None) -> None:
    text = dumps(report)
    if cfg.out is None:
        sys.stdout.write(text)
    elif cfg.format == "csv" and outcome is not None and outcome.csv is not None:
        _write_text(cfg.out, outcome.csv)
        _write_text(str(Path(cfg.out).with_suffix(".json")), text)
    else:
        _write_text(cfg.out, text)
    if cfg.plot is not None and outcome is not None and outcome.plot is not None:
        header = {"command": cfg.command, "family": cfg.family}
        header.update({k: getattr(cfg, k) for k in ("kappa", "mu", "omega", "lam", "c")
                       if getattr(cfg, k) is not None})
        emit_plot_data(outcome.plot, cfg.plot, header)


def run_command(cfg: RunConfig) -> int:
    """Run one command; write its report; return the exit status."""
    try:
        outcome = _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _SweepFailure as exc:
        _safe_emit(cfg, _report(cfg, "failed", EXIT_FAILURE, exc.result, str(exc)), None)
        return EXIT_FAILURE
    except MatsusyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        _safe_emit(cfg, _report(cfg, "failed", EXIT_FAILURE, None,
                                f"{type(exc).__name__}: {exc}"), None)
        return EXIT_FAILURE
    code = EXIT_OK if outcome.passed else EXIT_TOLERANCE
    status = "passed" if outcome.passed else "violated"
    if outcome.message:
        print(outcome.message, file=sys.stderr)
    try:
        _emit(cfg, _report(cfg, status, code, outcome.result), outcome)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return code


def _safe_emit(cfg, report, outcome) -> None:
    try:
        _emit(cfg, report, outcome)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    a = common.add_argument
    a("--config", help="JSON file with RunConfig keys; flags override it")
    a("--family")
    a("--branch", help="kappa, mu or both (default: every available branch)")
    a("--kappa", type=float)
    a("--mu", type=float)
    a("--omega", type=float)
    a("--lambda", dest="lam", type=float)
    a("--c", type=float, help="half-width of the F6 domain")
    a("--grid-n", dest="grid_n", type=int)
    a("--grid-eps", dest="grid_eps", type=float)
    a("--grid-L", dest="grid_L", type=float)
    a("--levels", type=int)
    a("--tol-abs", dest="tol_abs", type=float)
    a("--tol-rel", dest="tol_rel", type=float)
    a("--out")
    a("--format", choices=("json", "csv"))
    a("--plot", help="write gnuplot-ready columns here")
    parser = argparse.ArgumentParser(prog="matsusy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("ground", "excited"):
            sp.add_argument("--solution", type=int, help="1 or 2 for the two-solution families")
        if name == "excited":
            sp.add_argument("--level", type=int)
        if name == "sweep":
            sp.add_argument("--sweep-param", dest="sweep_param")
            sp.add_argument("--sweep-start", dest="sweep_start", type=float)
            sp.add_argument("--sweep-stop", dest="sweep_stop", type=float)
            sp.add_argument("--sweep-num", dest="sweep_num", type=int)
            sp.add_argument("--sweep-of", dest="sweep_of")
            sp.add_argument("--jobs", type=int)
    return parser


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    data = load_config_file(ns.config) if ns.config else {}
    if not isinstance(data, dict):
        raise ConfigError(f"{ns.config}: top level must be a JSON object")
    data = {_key(k): v for k, v in data.items()}
    for k, v in vars(ns).items():
        if k != "config" and v is not None:
            data[k] = v
    data["command"] = ns.command
    return config_from_mapping(data, ns.config or "arguments")


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
