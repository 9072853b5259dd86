"""
Command-line experiment runner.

    qwalk <experiment> [--config FILE] [--t-max N] [--m M] [--initial SPEC]
                       [--shift diagonal|axial] [--grid N] [--out PATH]
                       [--format csv|json]

Experiments: single, sameside, bell, indist, asymptote, delta, fourier-check, scan.
Output columns per experiment are listed in docs/formats.md. Identical
configurations give byte-identical output; run time goes to stderr only.

Exit codes: 0 success, 2 configuration error, 3 numeric invariant violated.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable

import numpy as np

from .asymptotics import (
    WeakLimitSpec,
    sameside_limit_from_d,
    sameside_limit_general,
    sameside_limit_separable,
    side_limits,
)
from .coin_algebra import CoinState, cdelta_coin, chi_eigenstates, to_hadamard_basis
from .delta_walk import (
    DeltaEvolutionSpec,
    ShiftModel,
    evolve_delta,
    evolve_uniform,
    origin_state_2d,
    sameside_2p,
    scan_delta_initial_states,
)
from .fourier import eigensystem, forward_transform, inverse_transform, k_grid, propagate
from .line_walk import distribution, side_probabilities, trajectory
from .multiparticle import InitialCoinSpec, Kind, sameside_indistinguishable, side_series

EXPERIMENTS = ("single", "sameside", "bell", "indist", "asymptote", "delta", "fourier-check", "scan")
PROB_TOL = 1e-9
NORM_TOL = 1e-9
FOURIER_TOL = 1e-10
MAX_M = 12
MAX_T = 100_000

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    m: int
    t_max: int
    initial: str | None
    shift: str
    grid: int | None
    out: str | None = None
    format: str = "csv"

    def echo(self) -> dict:
        """Config as written into reports; the output path is left out."""
        d = asdict(self)
        d.pop("out")
        return d


@dataclass
class ExperimentReport:
    config: dict
    records: list[dict]
    summary: dict


# defaults applied when neither file nor flag sets a key
_DEFAULTS = {"t_max": 100, "shift": "diagonal", "format": "csv"}
_DEFAULT_M = {"single": 1}
_DEFAULT_INITIAL = {
    "single": "sep:L",
    "sameside": "sep:L",
    "bell": "psi+",
    "indist": "boson",
    "delta": "sep:L",
    "fourier-check": "sep:L",
}
_DEFAULT_GRID = {"asymptote": 201, "scan": 8}
_KEYS = {f.name for f in fields(ExperimentConfig)}


# ---------------------------------------------------------------- config


def _read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _KEYS:
            raise ConfigError(key, f"unknown key in {path}:{lineno}")
        if key in out:
            raise ConfigError(key, f"set twice in {path}")
        out[key] = value
    return out


def _as_int(key: str, value) -> int:
    try:
        return int(str(value).strip())
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {value!r}") from None


def parse_config(argv: list[str] | None = None) -> ExperimentConfig:
    """Merge documented defaults, an optional key=value file and command-line flags."""
    args = _build_parser().parse_args(argv)
    raw: dict = {}
    if args.config:
        raw.update(_read_config_file(args.config))
    for key in ("experiment", "t_max", "m", "initial", "shift", "grid", "out", "format"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return build_config(raw)


def build_config(raw: dict) -> ExperimentConfig:
    """Validate a flat mapping of config values and fill in defaults."""
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    exp = raw.get("experiment")
    if exp is None:
        raise ConfigError("experiment", "missing; give it as the first argument or in the config file")
    exp = str(exp).strip()
    if exp not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")

    t_max = _as_int("t_max", raw.get("t_max", _DEFAULTS["t_max"]))
    if not 0 <= t_max <= MAX_T:
        raise ConfigError("t_max", f"must lie in [0, {MAX_T}], got {t_max}")

    m = _as_int("m", raw.get("m", _DEFAULT_M.get(exp, 2)))
    if not 1 <= m <= MAX_M:
        raise ConfigError("m", f"must lie in [1, {MAX_M}], got {m}")
    if exp == "single" and m != 1:
        raise ConfigError("m", "the single experiment has one walker; m must be 1")
    if exp in ("delta", "fourier-check", "scan", "indist") and m != 2:
        raise ConfigError("m", f"the {exp} experiment is defined for two walkers only; got m={m}")

    shift = str(raw.get("shift", _DEFAULTS["shift"])).strip().lower()
    if shift not in ("diagonal", "axial"):
        raise ConfigError("shift", f"must be diagonal or axial, got {shift!r}")
    if exp == "fourier-check":
        if "shift" in raw and shift != "axial":
            raise ConfigError("shift", "fourier-check uses the axial shift only")
        shift = "axial"

    fmt = str(raw.get("format", "")).strip().lower()
    out = raw.get("out")
    if not fmt:
        fmt = "json" if out and str(out).lower().endswith(".json") else _DEFAULTS["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"must be csv or json, got {fmt!r}")

    initial = raw.get("initial")
    if exp in ("asymptote", "scan"):
        if initial is not None:
            raise ConfigError("initial", f"the {exp} experiment sweeps initial states; do not set one")
    else:
        initial = str(initial if initial is not None else _DEFAULT_INITIAL[exp]).strip()
        parse_initial(initial, m, exp)  # fail early

    grid = raw.get("grid")
    if grid is not None:
        grid = _as_int("grid", grid)
    if exp == "fourier-check":
        need = 2 * t_max + 2
        if grid is None:
            grid = need
        if grid % 2 or grid < need:
            raise ConfigError("grid", f"must be even and >= 2*t_max + 2 = {need}, got {grid}")
    elif exp in ("asymptote", "scan"):
        if grid is None:
            grid = _DEFAULT_GRID[exp]
        if grid < 2:
            raise ConfigError("grid", f"must be >= 2, got {grid}")
        if exp == "asymptote" and grid**m > 10_000_000:
            raise ConfigError("grid", f"grid^m = {grid**m} points is too many")
    elif grid is not None:
        raise ConfigError("grid", f"not used by the {exp} experiment")

    return ExperimentConfig(exp, m, t_max, initial, shift, grid, None if out is None else str(out), fmt)


# ---------------------------------------------------------------- initial states


def _parse_complex(token: str) -> complex:
    try:
        return complex(token.strip().replace(" ", ""))
    except ValueError:
        raise ConfigError("initial", f"not a number: {token!r}") from None


def _single_state(token: str) -> CoinState:
    token = token.strip()
    chi_p, chi_m = chi_eigenstates()
    named = {
        "L": CoinState.L(),
        "R": CoinState.R(),
        "chi+": chi_p,
        "chi-": chi_m,
        "sym": CoinState.symmetric(),
    }
    if token in named:
        return named[token]
    if "/" in token:
        a, b = (_parse_complex(x) for x in token.split("/", 1))
        n = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if n == 0.0:
            raise ConfigError("initial", f"zero coin state {token!r}")
        return CoinState(a / n, b / n)
    raise ConfigError("initial", f"unknown coin state {token!r}; use L, R, chi+, chi-, sym or a/b")


def parse_initial(desc: str, M: int, experiment: str | None = None) -> InitialCoinSpec:
    """
    Initial-state descriptor to an InitialCoinSpec.

    ``sep:T1,T2,...`` product state, each T one of L, R, chi+, chi-, sym or a/b
    (complex amplitudes, normalized on input); a single T is used for every
    walker. ``psi+``, ``psi-``, ``phi+``, ``phi-``, ``boson``, ``fermion`` name
    the correlated states. ``vec:c0,c1,...`` is a full 2^M coin vector, also
    normalized on input.
    """
    desc = desc.strip()
    if desc.startswith("sep:"):
        toks = [t for t in desc[4:].split(",") if t.strip()]
        if len(toks) == 1:
            toks = toks * M
        if len(toks) != M:
            raise ConfigError("initial", f"{len(toks)} coin states given for m={M}")
        spec = InitialCoinSpec.separable([_single_state(t) for t in toks])
    elif desc.startswith("vec:"):
        v = np.array([_parse_complex(x) for x in desc[4:].split(",")], dtype=np.complex128)
        if v.size != 2**M:
            raise ConfigError("initial", f"vec needs 2^m = {2**M} entries, got {v.size}")
        n = np.linalg.norm(v)
        if n == 0.0:
            raise ConfigError("initial", "zero coin vector")
        spec = InitialCoinSpec.general(v / n)
    elif desc in ("psi+", "psi-", "phi+", "phi-"):
        if M < 2:
            raise ConfigError("initial", f"{desc} needs m >= 2")
        sign = 1 if desc.endswith("+") else -1
        spec = InitialCoinSpec.bell_psi(M, sign) if desc.startswith("psi") else InitialCoinSpec.bell_phi(M, sign)
    elif desc in ("boson", "fermion"):
        if M < 2:
            raise ConfigError("initial", f"{desc} needs m >= 2")
        spec = InitialCoinSpec.boson(M) if desc == "boson" else InitialCoinSpec.fermion(M)
    else:
        raise ConfigError("initial", f"cannot parse {desc!r}")

    if experiment == "bell" and spec.kind not in (Kind.BELL_PSI, Kind.BELL_PHI):
        raise ConfigError("initial", "the bell experiment needs psi+, psi-, phi+ or phi-")
    if experiment == "indist" and spec.kind not in (Kind.BOSON, Kind.FERMION):
        raise ConfigError("initial", "the indist experiment needs boson or fermion")
    if experiment not in ("bell", "indist") and spec.kind in (Kind.BOSON, Kind.FERMION):
        raise ConfigError("initial", f"{desc} describes indistinguishable walkers; use the indist experiment")
    return spec


# ---------------------------------------------------------------- invariant checks


def _prob(value: float, name: str) -> float:
    """Clip rounding noise into [0, 1]; anything further out is a violation."""
    v = float(value)
    if not (-PROB_TOL <= v <= 1.0 + PROB_TOL):
        raise InvariantViolation(f"{name} = {v!r} is not a probability")
    return min(max(v, 0.0), 1.0)


def _norm(value: float, name: str = "norm") -> float:
    v = float(value)
    if abs(v - 1.0) > NORM_TOL:
        raise InvariantViolation(f"{name} = {v!r} deviates from 1 by more than {NORM_TOL}")
    return v


# ---------------------------------------------------------------- experiments


def _limit_for(spec: InitialCoinSpec) -> float:
    if spec.kind is Kind.SEPARABLE:
        return sameside_limit_separable([to_hadamard_basis(s) for s in spec.states])
    return sameside_limit_general(WeakLimitSpec.from_vector(spec.coin_vector()))


def _run_single(cfg: ExperimentConfig):
    state0 = parse_initial(cfg.initial, 1, cfg.experiment).states[0]
    lim_minus, lim_plus = side_limits(state0.a, state0.b)
    records = []
    for s in trajectory(state0, cfg.t_max):
        p = distribution(s)
        pm, pp = side_probabilities(s)
        i = int(np.argmax(p))
        records.append(
            {
                "t": s.t,
                "p_minus": _prob(pm, "p_minus"),
                "p_plus": _prob(pp, "p_plus"),
                "norm": _norm(s.norm()),
                "x_max": i - s.t,
                "p_max": _prob(p[i], "p_max"),
                "asymptote_minus": lim_minus,
            }
        )
    return records, {"asymptote_minus": lim_minus, "asymptote_plus": lim_plus}


def _run_sameside(cfg: ExperimentConfig):
    spec = parse_initial(cfg.initial, cfg.m, cfg.experiment)
    c = spec.coin_vector()
    lim = _limit_for(spec)
    records = [
        {"t": s.t, "p_sameside": _prob(s.sameside(c), "p_sameside"), "asymptote": lim}
        for s in side_series(cfg.t_max)
    ]
    return records, {"asymptote": lim, "final_gap": records[-1]["p_sameside"] - lim}


def _run_bell(cfg: ExperimentConfig):
    spec = parse_initial(cfg.initial, cfg.m, cfg.experiment)
    c = spec.coin_vector()
    bases = []
    for p, _ in spec.patterns():
        v = np.zeros(2**cfg.m, dtype=np.complex128)
        v[int("".join(map(str, p)), 2)] = 1.0
        bases.append(v)
    lim = _limit_for(spec)
    records = []
    for s in side_series(cfg.t_max):
        records.append(
            {
                "t": s.t,
                "p_sameside": _prob(s.sameside(c), "p_sameside"),
                "p_pattern": _prob(np.mean([s.sameside(v) for v in bases]), "p_pattern"),
                "interference": s.interference(cfg.m),
                "asymptote": lim,
            }
        )
    return records, {"asymptote": lim, "n_patterns": len(bases)}


def _run_indist(cfg: ExperimentConfig):
    spec = parse_initial(cfg.initial, cfg.m, cfg.experiment)
    counterpart = spec.coin_vector()
    lim = sameside_limit_general(WeakLimitSpec.from_vector(counterpart))
    records = []
    for s in side_series(cfg.t_max):
        records.append(
            {
                "t": s.t,
                "p_sameside": _prob(sameside_indistinguishable(spec, s.t), "p_sameside"),
                "p_bell": _prob(s.sameside(counterpart), "p_bell"),
                "asymptote": lim,
            }
        )
    gap = max(abs(r["p_sameside"] - r["p_bell"]) for r in records)
    return records, {"asymptote": lim, "max_bell_gap": gap}


def _run_asymptote(cfg: ExperimentConfig):
    axis = np.linspace(-1.0, 1.0, cfg.grid)
    mesh = np.meshgrid(*([axis] * cfg.m), indexing="ij")
    d = np.stack([g.ravel() for g in mesh], axis=1)
    vals = sameside_limit_from_d(d)
    records = []
    for row, v in zip(d, vals):
        rec = {f"d{i + 1}": float(x) for i, x in enumerate(row)}
        rec["p_limit"] = _prob(v, "p_limit")
        records.append(rec)
    best = int(np.argmax(vals))
    return records, {
        "max_p_limit": float(vals[best]),
        "argmax": [float(x) for x in d[best]],
        "min_p_limit": float(vals.min()),
    }


def _run_delta(cfg: ExperimentConfig):
    spec = parse_initial(cfg.initial, 2, cfg.experiment)
    c = spec.coin_vector()
    dspec = DeltaEvolutionSpec.standard(cfg.shift)
    records = []
    for s in evolve_delta(c, cfg.t_max, dspec):
        p = np.sum(np.abs(s.data) ** 2, axis=0)
        flat = int(np.argmax(p))
        i, j = divmod(flat, p.shape[1])
        x, y = _lightcone_to_xy(s.model, s.t, i, j)
        records.append(
            {
                "t": s.t,
                "p_sameside": _prob(sameside_2p(s), "p_sameside"),
                "norm": _norm(s.norm()),
                "x_max": x,
                "y_max": y,
                "p_max": _prob(p[i, j], "p_max"),
            }
        )
    summary = {"max_p_sameside": max(r["p_sameside"] for r in records)}
    if dspec.shift_model is ShiftModel.DIAGONAL:
        summary["noninteracting_limit"] = _limit_for(spec)
    return records, summary


def _lightcone_to_xy(model: ShiftModel, t: int, i: int, j: int) -> tuple[int, int]:
    if model is ShiftModel.DIAGONAL:
        return 2 * i - t, 2 * j - t
    return i + j - t, i - j


def _run_fourier_check(cfg: ExperimentConfig):
    spec = parse_initial(cfg.initial, 2, cfg.experiment)
    c = spec.coin_vector()
    N = cfg.grid
    field0 = forward_transform(origin_state_2d(c, ShiftModel.AXIAL), N)
    k = k_grid(N)
    eig = eigensystem(k[:, None], k[None, :])
    records = []
    for direct in evolve_uniform(c, cfg.t_max, cdelta_coin(), ShiftModel.AXIAL):
        field_t = propagate(field0, direct.t, eig)
        back = inverse_transform(field_t, direct.t, ShiftModel.AXIAL)
        err = float(np.max(np.abs(back.data - direct.data)))
        records.append(
            {
                "t": direct.t,
                "max_error": err,
                "norm_fourier": _norm(field_t.norm(), "norm_fourier"),
                "norm_direct": _norm(direct.norm(), "norm_direct"),
            }
        )
    worst = max(r["max_error"] for r in records)
    summary = {"grid": N, "max_error": worst, "tolerance": FOURIER_TOL, "pass": worst <= FOURIER_TOL}
    if worst > FOURIER_TOL:
        raise InvariantViolation(f"spectral propagation error {worst:.3g} exceeds {FOURIER_TOL}", records, summary)
    return records, summary


def _run_scan(cfg: ExperimentConfig):
    rep = scan_delta_initial_states(cfg.grid, cfg.t_max, DeltaEvolutionSpec.standard(cfg.shift))
    records = rep.records()
    for r in records:
        for key in ("p_final", "p_tail_mean", "running_max"):
            r[key] = _prob(r[key], key)
    sep = rep.separable
    summary = {
        "n_points": len(records),
        "max_tail_mean": float(rep.tail_mean.max()),
        "argmax_index": int(np.argmax(rep.tail_mean)),
        "max_final": float(rep.final.max()),
        "separable_max_tail_mean": float(rep.tail_mean[sep].max()) if sep.any() else None,
        "n_above_three_quarters": int(np.sum(rep.tail_mean > 0.75)),
    }
    return records, summary


_RUNNERS: dict[str, Callable] = {
    "single": _run_single,
    "sameside": _run_sameside,
    "bell": _run_bell,
    "indist": _run_indist,
    "asymptote": _run_asymptote,
    "delta": _run_delta,
    "fourier-check": _run_fourier_check,
    "scan": _run_scan,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """
    Run one experiment and return its report.

    Raises InvariantViolation when a probability leaves [0, 1] or a norm drifts
    by more than 1e-9; the exception carries any records produced so far.
    """
    records, summary = _RUNNERS[cfg.experiment](cfg)
    return ExperimentReport(cfg.echo(), records, {"status": "ok", **summary})


# ---------------------------------------------------------------- serialization


def _fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise InvariantViolation(f"non-finite value {x!r} in report")
    return format(x, ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return _fmt_number(v)


def to_json(report: ExperimentReport) -> str:
    """{config, records, summary}; one record per line, numbers with 17 significant digits."""
    buf = io.StringIO()
    buf.write("{\n")
    buf.write(f'  "config": {_json_value(report.config)},\n')
    buf.write('  "records": [')
    for i, rec in enumerate(report.records):
        buf.write(",\n    " if i else "\n    ")
        buf.write(_json_value(rec))
    buf.write("\n  ],\n" if report.records else "],\n")
    buf.write(f'  "summary": {_json_value(report.summary)}\n')
    buf.write("}\n")
    return buf.getvalue()


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return _fmt_number(v)


def to_csv(report: ExperimentReport) -> str:
    """Header row plus one row per record; booleans as 0/1."""
    if not report.records:
        return ""
    cols = list(report.records[0])
    lines = [",".join(cols)]
    lines += [",".join(_csv_cell(rec[c]) for c in cols) for rec in report.records]
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, fmt: str, out: str | None) -> None:
    text = to_json(report) if fmt == "json" else to_csv(report)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


# ---------------------------------------------------------------- entry point


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qwalk",
        description="Run a quantum-walk experiment and write its report.",
        epilog=(
            "defaults: t-max 100; m 1 for single, otherwise 2; shift diagonal "
            "(fourier-check always axial); initial sep:L, psi+ for bell, boson for "
            "indist; grid 201 points per axis for asymptote, 8 per angle for scan, "
            "2*t_max+2 for fourier-check; output to stdout as csv unless --out ends in .json"
        ),
    )
    p.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    p.add_argument("--config", metavar="FILE", help="flat key=value file; flags override it")
    p.add_argument("--t-max", dest="t_max", metavar="N", help="number of walk steps")
    p.add_argument("--m", metavar="M", help="number of walkers")
    p.add_argument("--initial", metavar="SPEC", help="sep:T1,T2 | psi± | phi± | boson | fermion | vec:c0,c1,...")
    p.add_argument("--shift", help="diagonal or axial (two-walker lattice experiments)")
    p.add_argument("--grid", metavar="N", help="fourier grid size, asymptote points per axis or scan resolution")
    p.add_argument("--out", metavar="PATH", help="output file; '-' or absent for stdout")
    p.add_argument("--format", help="csv or json")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"qwalk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        # argparse usage errors and --help
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    start = time.perf_counter()
    try:
        report = run(cfg)
    except InvariantViolation as exc:
        msg = exc.args[0]
        records = exc.args[1] if len(exc.args) > 1 else []
        summary = exc.args[2] if len(exc.args) > 2 else {}
        failed = ExperimentReport(cfg.echo(), records, {"status": "invariant_violation", "error": msg, **summary})
        try:
            write_report(failed, cfg.format, cfg.out)
        except InvariantViolation:
            pass
        print(f"qwalk: invariant violation: {msg}", file=sys.stderr)
        return EXIT_INVARIANT
    except ConfigError as exc:
        print(f"qwalk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        write_report(report, cfg.format, cfg.out)
    except InvariantViolation as exc:
        print(f"qwalk: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"qwalk: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"qwalk: {cfg.experiment} finished in {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
