"""Command-line interface.

Exit codes: 0 ok, 1 check failure, 2 config error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import __version__, analysis, biortho, checks, eigen, hypergeom, pencil, perturbation
from .perturbation import PerturbRule, perturb
from .poly import ComplexPoly
from .recurrence import GCRRSpec, RIIParams, constant_params, gcrr_params, generate

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS: dict[str, Any] = {
    "family": "gcrr",
    "zeta": 1.0,
    "theta": 0.0,
    "omega": 1.0,
    "scaled": False,
    "rho": 1.0,
    "c": 0.0,
    "d": 0.25,
    "n": 8,
    "rule": None,
    "format": None,
    "output": None,
    "seed": 42,
    "exact": False,
}

RULE_SHORTCUTS = {
    "alpha-gcrr": ({"variant": "quadratic-root"}, {"family": "gcrr", "scaled": True, "zeta": 1.0, "theta": 0.0}),
    "beta-gcrr": ({"variant": "quadratic-root", "beta": True},
                  {"family": "gcrr", "scaled": True, "zeta": 1.0, "theta": 0.0}),
    "kappa": ({"variant": "constant-kappa"}, {"family": "constant"}),
    "kappa-": ({"variant": "constant-kappa", "branch": "-"}, {"family": "constant"}),
    "i-half": ({"variant": "theorem25-recursion", "seed": [0.0, 0.5]}, {"family": "constant"}),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    values: dict
    explicit: set

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)


# ---------------------------------------------------------------------------
# config


def _load_config(args: argparse.Namespace, extra_defaults: dict) -> RunConfig:
    values = dict(DEFAULTS)
    values.update(extra_defaults)
    explicit = set()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in data.items()})
        explicit.update(k.replace("-", "_") for k in data)
    for key, val in vars(args).items():
        if key in ("config", "command", "func") or val is None:
            continue
        values[key] = val
        explicit.add(key)
    return RunConfig(values, explicit)


def _resolve_rule(cfg: RunConfig) -> PerturbRule | None:
    raw = cfg.get("rule")
    if raw in (None, "none", ""):
        return None
    implied: dict = {}
    if isinstance(raw, str) and raw in RULE_SHORTCUTS:
        data, implied = RULE_SHORTCUTS[raw]
        data = dict(data)
    elif isinstance(raw, str):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"unknown rule {raw!r}") from exc
    else:
        data = dict(raw)
    if not isinstance(data, dict):
        raise ConfigError("rule must be a shortcut name or a JSON object")
    for key in ("zeta", "theta", "omega"):
        if data.get(key) is not None:
            implied = {**implied, key: data[key]}
    for key, val in implied.items():
        if key not in cfg.explicit:
            cfg.values[key] = val
    try:
        return PerturbRule.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid rule: {exc}") from exc


def _params(cfg: RunConfig) -> RIIParams:
    try:
        if cfg["family"] == "gcrr":
            return gcrr_params(GCRRSpec(float(cfg["zeta"]), float(cfg["theta"]), float(cfg["omega"]),
                                        bool(cfg["scaled"])))
        if cfg["family"] == "constant":
            return constant_params(cfg["rho"], cfg["c"], cfg["d"], cfg["omega"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown family {cfg['family']!r}")


def _n(cfg: RunConfig, minimum: int = 0) -> int:
    try:
        n = int(cfg["n"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("n must be an integer") from exc
    if n < minimum:
        raise ConfigError(f"n must be >= {minimum}")
    return n


# ---------------------------------------------------------------------------
# output


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _emit(cfg: RunConfig, payload: dict, csv_table: tuple[list, list] | None = None, default: str = "json"):
    fmt = cfg.get("format") or default
    if fmt == "csv":
        if csv_table is None:
            raise ConfigError("this command has no CSV output")
        text = _csv(*csv_table)
    elif fmt == "json":
        text = json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if cfg.get("output"):
        with open(cfg["output"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _poly_rows(polys: list[ComplexPoly], deltas: list | None = None):
    rows = []
    for k, p in enumerate(polys):
        c = p.to_float().as_array()
        for j, v in enumerate(c if len(c) else [0j]):
            row = [k, j, float(v.real), float(v.imag)]
            if deltas is not None:
                row.append(float("nan") if deltas[k] is None else float(deltas[k]))
            rows.append(row)
    header = ["k", "power", "re", "im"] + (["delta"] if deltas is not None else [])
    return header, rows


def _poly_json(polys: list[ComplexPoly], deltas: list | None = None) -> list[dict]:
    out = []
    for k, p in enumerate(polys):
        c = p.to_float().as_array()
        item = {"k": k, "re": [float(v.real) for v in c], "im": [float(v.imag) for v in c]}
        if deltas is not None:
            item["closed_form_delta"] = deltas[k]
        out.append(item)
    return out


# ---------------------------------------------------------------------------
# commands


def _closed_form_deltas(cfg: RunConfig, polys: list[ComplexPoly]) -> list | None:
    n = len(polys) - 1
    if cfg["family"] == "constant":
        if (float(cfg["rho"]), float(cfg["c"]), float(cfg["d"])) != (1.0, 0.0, 0.25):
            return None
        ref = perturbation.closed_form_examples(n, "P", float(cfg["omega"]))
        return [ref[k].max_abs_diff(polys[k]) for k in range(n + 1)]
    if float(cfg["omega"]) != 1.0:
        return None
    spec = GCRRSpec(float(cfg["zeta"]), float(cfg["theta"]), 1.0)
    z = float(cfg["zeta"])
    out = []
    for k in range(n + 1):
        ref = hypergeom.gcrr_closed_form(spec, k)
        if cfg["scaled"]:
            ref = ref * (hypergeom.pochhammer(z, k) / hypergeom.pochhammer(2 * z, k))
        out.append(ref.max_abs_diff(polys[k]))
    return out


def cmd_gen(cfg: RunConfig) -> int:
    params = _params(cfg)
    n = _n(cfg)
    polys = generate(params, n)
    deltas = _closed_form_deltas(cfg, polys)
    payload = {"family": params.label, "n": n, "polys": _poly_json(polys, deltas)}
    _emit(cfg, payload, _poly_rows(polys, deltas), default="csv")
    return EXIT_OK


def cmd_perturb(cfg: RunConfig) -> int:
    rule = _resolve_rule(cfg)
    if rule is None:
        raise ConfigError("perturb needs --rule")
    params = _params(cfg)
    n = _n(cfg, 1)
    alpha = rule.alphas(params, n + 1)
    P = generate(params, n + 1)
    L = perturb(P, alpha)
    ledger = [perturbation.verify_ledger_identity(L, perturbation.ledger_special(params, alpha, k))
              for k in range(1, n)]
    mode = eigen.rule_mode(rule)
    status = EXIT_OK
    try:
        R = generate(perturbation.reduced_recurrence(params, alpha, mode, n=n), n)
        reduction = {"mode": mode, "admissible": True, "residual": max(R[k].max_abs_diff(L[k]) for k in range(n + 1))}
    except perturbation.AdmissibilityError as exc:
        reduction = {"mode": mode, "admissible": False, "reason": str(exc)}
    payload = {
        "family": params.label,
        "rule": rule.to_dict(),
        "n": n,
        "alpha": [complex(a) for a in alpha[1 : n + 1]],
        "polys": _poly_json(L[: n + 1]),
        "ledger_residuals": ledger,
        "reduction": reduction,
    }
    if max(ledger, default=0.0) > 1e-10 or reduction.get("residual", 0.0) > 1e-10:
        status = EXIT_CHECK
    _emit(cfg, payload, _poly_rows(L[: n + 1]), default="json")
    return status


def _target(cfg: RunConfig, rule, params, n):
    P = generate(params, n)
    if rule is None or cfg.get("target") == "P":
        return P[n], pencil.build_pencil(params, n, kind="G"), "P"
    alpha = rule.alphas(params, n)
    L = perturb(P, alpha)
    return L[n], pencil.build_pencil(params, n, alpha, kind="K", mode=eigen.rule_mode(rule)), "L"


def cmd_zeros(cfg: RunConfig) -> int:
    rule = _resolve_rule(cfg)
    params = _params(cfg)
    n = _n(cfg, 1)
    poly, pen, name = _target(cfg, rule, params, n)
    method = cfg.get("method") or "both"
    if method not in ("pencil", "aberth", "both"):
        raise ConfigError("method must be pencil, aberth or both")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        zs = eigen.poly_roots(poly) if method == "aberth" else eigen.generalized_eigs(pen)
    meta = {"family": params.label, "rule": rule.to_dict() if rule else None, "target": f"{name}_{n}", "n": n}
    delta = None
    rows = [[float(z.real), float(z.imag), float(r)] for z, r in zip(zs.values, zs.residuals)]
    header = ["re", "im", "residual"]
    status = EXIT_OK
    if method == "both":
        oracle = eigen.poly_roots(poly)
        delta = eigen.match_zeros(zs.values, oracle.values)
        if zs.is_real() and oracle.is_real():
            per = np.abs(np.sort(zs.values.real) - np.sort(oracle.values.real))
        else:
            per = np.full(len(zs), delta)
        for row, dv in zip(rows, per):
            row.append(float(dv))
        header.append("delta")
        if delta > 1e-9:
            status = EXIT_CHECK
    payload = {**zs.to_dict(), **meta, "cross_check_delta": delta}
    _emit(cfg, payload, (header, rows), default="csv")
    return status


def _gcrr_unique(cfg: RunConfig) -> RIIParams:
    for key, val in (("family", "gcrr"), ("scaled", True), ("zeta", 1.0), ("theta", 0.0)):
        if key not in cfg.explicit:
            cfg.values[key] = val
    return _params(cfg)


def cmd_interlace(cfg: RunConfig) -> int:
    mode = cfg.get("mode") or "triple"
    n = _n(cfg, 2 if mode != "consecutive" else 1)
    z = eigen.poly_roots
    if mode == "consecutive":
        params = _params(cfg)
        P = generate(params, n + 1)
        rep = analysis.check_interlace(z(P[n + 1]), z(P[n]), "consecutive", (f"P_{n + 1}", f"P_{n}"))
    elif mode == "triple":
        sign = cfg.get("sign") or "+"
        if sign not in ("+", "-"):
            raise ConfigError("sign must be + or -")
        rule = _resolve_rule(cfg) or PerturbRule("quadratic-root", beta=(sign == "-"))
        params = _gcrr_unique(cfg) if cfg.get("rule") is None else _params(cfg)
        P = generate(params, n)
        alpha = rule.alphas(params, n)
        L = perturb(P, alpha)
        rep = analysis.triple_interlace(z(P[n]), z(P[n - 1]), z(L[n]), [complex(a).real for a in alpha[1:]]
                                        if all(complex(a).imag == 0 for a in alpha[1:]) else alpha[1:])
        if (sign == "+") != (complex(alpha[n]).real > 0):
            raise ConfigError("rule sign does not match --sign")
    elif mode == "cross":
        params = _gcrr_unique(cfg)
        P = generate(params, n)
        a = PerturbRule("quadratic-root").alphas(params, n)
        b = PerturbRule("quadratic-root", beta=True).alphas(params, n)
        L, T = perturb(P, a), perturb(P, b)
        rep = analysis.check_interlace(z(L[n]), z(T[n]), "cross", (f"L_{n}", f"T_{n}"))
        w = analysis.wronskian_cross_check(L[n], T[n], a[n], b[n], P[n], P[n - 1], zeros_L=z(L[n]), zeros_T=z(T[n]))
        payload = {**rep.to_dict(), "wronskian": w.to_dict(), "mode": mode, "n": n}
        _emit(cfg, payload, (["value", "source_tag"], [[v, t] for v, t in rep.witness]))
        return EXIT_OK if rep.passed and w.residual < 1e-10 and w.no_common_zeros else EXIT_CHECK
    else:
        raise ConfigError("mode must be consecutive, triple or cross")
    payload = {**rep.to_dict(), "mode": mode, "n": n}
    _emit(cfg, payload, (["value", "source_tag"], [[v, t] for v, t in rep.witness]))
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_biortho(cfg: RunConfig) -> int:
    rule = _resolve_rule(cfg)
    params = _params(cfg)
    n = _n(cfg, 1)
    dec = cfg.get("decomp") or "all"
    decs = biortho.DECOMPOSITIONS if dec == "all" else (dec,)
    if any(d not in biortho.DECOMPOSITIONS for d in decs):
        raise ConfigError(f"decomp must be one of {biortho.DECOMPOSITIONS} or all")
    reports = [biortho.gram_check(params, rule, n, d) for d in decs]
    full = bool(cfg.get("full"))
    payload = {"family": params.label, "rule": rule.to_dict() if rule else None,
               "reports": [r.to_dict(full) for r in reports]}
    rows = [[r.decomposition, r.n, r.max_offdiag, r.max_diag_dev, r.unfactored_offdiag, r.unfactored_diag_rel]
            for r in reports]
    header = ["decomposition", "n", "max_offdiag", "max_diag_dev", "unfactored_offdiag", "unfactored_diag_rel"]
    _emit(cfg, payload, (header, rows))
    return EXIT_OK if all(r.passed() for r in reports) else EXIT_CHECK


def cmd_factor(cfg: RunConfig) -> int:
    rule = _resolve_rule(cfg)
    params = _params(cfg)
    n = _n(cfg, 1)
    _, pen, _ = _target(cfg, rule, params, n)
    f = pencil.factor_all(pen)
    res = f.residuals(pen.J())
    payload = {"family": params.label, "pencil": pen.to_dict(), "factors": f.to_dict(), "residuals": res}
    _emit(cfg, payload)
    ok = max(res["cholesky"], res["ul"], res["ldu"]) < 1e-12 and res["pivot_consistency"] < 1e-13
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify(cfg: RunConfig) -> int:
    names = None
    if cfg.get("checks"):
        names = [k for k in checks.CHECKS if any(k.startswith(p) for p in cfg["checks"])]
        if not names:
            raise ConfigError("no check matches the given prefixes")
    results = checks.run_checks(names, seed=int(cfg["seed"]), threads=cfg.get("threads"))
    if (cfg.get("format") or "text") == "text":
        text = "".join(r.line() + "\n" for r in results)
        npass = sum(r.passed for r in results)
        text += f"{npass}/{len(results)} checks passed\n"
        if cfg.get("output"):
            with open(cfg["output"], "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        payload = {"checks": [{"name": r.name, "passed": r.passed, "value": r.value, "tol": r.tol,
                               "detail": r.detail} for r in results]}
        rows = [[r.name, "PASS" if r.passed else "FAIL", r.value, r.tol] for r in results]
        _emit(cfg, payload, (["name", "status", "value", "tol"], rows))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_plotdata(cfg: RunConfig) -> int:
    fig = int(cfg.get("figure") or 1)
    if fig not in (1, 2, 3):
        raise ConfigError("figure must be 1, 2 or 3")
    params = _gcrr_unique(cfg)
    n = _n(cfg, 2)
    P = generate(params, n)
    a = PerturbRule("quadratic-root").alphas(params, n)
    b = PerturbRule("quadratic-root", beta=True).alphas(params, n)
    sets = {
        1: [(f"P_{n - 1}", P[n - 1]), (f"P_{n}", P[n]), (f"L_{n}", perturb(P, a)[n])],
        2: [(f"P_{n - 1}", P[n - 1]), (f"P_{n}", P[n]), (f"T_{n}", perturb(P, b)[n])],
        3: [(f"L_{n}", perturb(P, a)[n]), (f"T_{n}", perturb(P, b)[n])],
    }[fig]
    rows = []
    for tag, poly in sets:
        zs = eigen.poly_roots(poly)
        if not zs.is_real():
            raise ArithmeticError(f"{tag} has non-real zeros")
        rows += [[float(v), tag] for v in zs.real]
    rows.sort(key=lambda r: (r[0], r[1]))
    payload = {"figure": fig, "n": n, "family": params.label,
               "zeros": [{"value": v, "source_tag": t} for v, t in rows]}
    _emit(cfg, payload, (["value", "source_tag"], rows), default="csv")
    return EXIT_OK


COMMANDS = {
    "gen": (cmd_gen, "generate P_0..P_n"),
    "perturb": (cmd_perturb, "build L_n = P_n - alpha_n P_{n-1} with ledger and reduction checks"),
    "zeros": (cmd_zeros, "zeros by pencil eigenvalues and/or polynomial roots"),
    "interlace": (cmd_interlace, "zero interlacing checks"),
    "biortho": (cmd_biortho, "biorthogonality gram checks"),
    "factor": (cmd_factor, "pencil matrices and Cholesky/UL/LDU factors"),
    "verify": (cmd_verify, "run the invariant suite"),
    "plot-data": (cmd_plotdata, "zero tables for the interlacing figures"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("family and output")
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--family", choices=["gcrr", "constant"])
    g.add_argument("--zeta", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--scaled", action="store_true", default=None)
    g.add_argument("--unscaled", dest="scaled", action="store_false", default=None)
    g.add_argument("--rho", type=float, help="constant family rho")
    g.add_argument("--c", type=float, help="constant family center")
    g.add_argument("--d", type=float, help="constant family d")
    g.add_argument("--n", type=int)
    g.add_argument("--rule", help=f"perturbation rule: one of {sorted(RULE_SHORTCUTS)} or a JSON object")
    g.add_argument("--format", choices=["json", "csv", "text"])
    g.add_argument("--output", "-o")
    g.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="r2kit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"r2kit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}
    for name, (fn, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        subs[name] = sp
    subs["zeros"].add_argument("--method", choices=["pencil", "aberth", "both"])
    subs["zeros"].add_argument("--target", choices=["P", "L"])
    subs["factor"].add_argument("--target", choices=["P", "L"])
    subs["interlace"].add_argument("--mode", choices=["consecutive", "triple", "cross"])
    subs["interlace"].add_argument("--sign", choices=["+", "-"])
    subs["biortho"].add_argument("--decomp", choices=list(biortho.DECOMPOSITIONS) + ["all"])
    subs["biortho"].add_argument("--full", action="store_true", default=None, help="include the gram matrix")
    subs["verify"].add_argument("--checks", nargs="+", help="run only checks whose names start with these prefixes")
    subs["verify"].add_argument("--threads", type=int, help="worker threads (default: R2KIT_THREADS or 1)")
    subs["plot-data"].add_argument("--figure", type=int, choices=[1, 2, 3])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = _load_config(args, {})
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except perturbation.AdmissibilityError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
