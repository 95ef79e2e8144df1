"""Command-line front end: sections, verdicts, spectra, verification suites and sweeps.

Every command prints (or writes with ``--output``) a JSON document carrying a
``schema_version`` field, or a CSV table with a fixed header.  Floats are
written with 17 significant digits.  Exit status is 0 on success, 2 when a
verification suite reports a failure and 1 for usage or numerical errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .analysis import (
    closed_range_signature,
    cr_witness_family,
    exponent_fit,
    fredholm_verdict,
    parabolic_orbit_at_zero,
    parabolic_witness,
    spectrum_model,
)
from .exact import GaussianRational
from .moebius import (
    AutoKind,
    MoebiusMap,
    canonical_conjugator,
    classify,
    compose,
    disk_automorphism,
    hyperbolic,
    iterate,
    special,
)
from .operators import (
    FORMULAS,
    bounds_grid,
    check_bounds,
    composition_section,
    dn_block_eigs,
    dtm_block,
    eigenvalues,
    multiplication_section,
    op_norm,
    verify_f2,
)
from .series import TruncatedSeries, blaschke_taylor, polynomial
from .weights import WeightSequence, parse_weights

SCHEMA_VERSION = 1
THREADS_ENV = "HARDYCOMP_THREADS"
EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    """Bad flags, bad grammar or an unusable config file."""


# -- symbol grammar ----------------------------------------------------------------


class GrammarError(UsageError):
    def __init__(self, text: str, pos: int, expected: Sequence[str]):
        self.text, self.pos, self.expected = text, pos, tuple(expected)
        caret = " " * pos + "^"
        super().__init__(
            f"cannot parse symbol at position {pos}: expected {' or '.join(expected)}\n  {text}\n  {caret}"
        )


@dataclass(frozen=True)
class Symbol:
    """A parsed symbol: a Moebius map, a Blaschke product or a polynomial."""

    text: str
    kind: str
    moebius: MoebiusMap | None = None
    zeros: tuple = ()
    theta: float = 0.0
    coeffs: tuple = ()

    def series(self, n: int) -> TruncatedSeries:
        """Taylor coefficients through degree n."""
        if self.moebius is not None:
            return self.moebius.to_float().taylor(n)
        if self.kind == "blaschke":
            return blaschke_taylor(self.zeros, self.theta, n)
        return polynomial(self.coeffs, n)

    def require_moebius(self) -> MoebiusMap:
        if self.moebius is None:
            raise UsageError(f"symbol {self.text!r} is not a Moebius map")
        return self.moebius


SYMBOL_KINDS = ("mobius:", "psi1^n:", "psi1", "psi2", "hyperbolic:", "blaschke:", "poly:")
_NUMBER = re.compile(r"[0-9eE.+\-ij]+")
_INT = re.compile(r"[+-]?\d+")


def _parse_complex(text: str, pos: int) -> tuple[complex, int]:
    m = _NUMBER.match(text, pos)
    tok = m.group(0) if m else ""
    try:
        if not tok:
            raise ValueError
        value = complex(tok.replace("i", "j"))
    except ValueError:
        raise GrammarError(text, pos, ["a number such as 0.3 or 0.3+0.2i"]) from None
    return value, pos + len(tok)


def _parse_kv(text: str, pos: int, allowed: dict[str, bool]) -> dict[str, Any]:
    """key=value items separated by commas; list-valued keys absorb extra items."""
    out: dict[str, Any] = {}
    keys = sorted(allowed)
    while True:
        m = re.compile(r"([a-z0-9_]+)=").match(text, pos)
        if not m or m.group(1) not in allowed:
            raise GrammarError(text, pos, [f"'{k}='" for k in keys])
        key = m.group(1)
        if key in out:
            raise GrammarError(text, pos, [f"'{k}='" for k in keys if k not in out])
        pos = m.end()
        value, pos = _parse_complex(text, pos)
        if allowed[key]:
            items = [value]
            while pos < len(text) and text[pos] == "," and not re.compile(r",[a-z_]+=").match(text, pos):
                value, pos = _parse_complex(text, pos + 1)
                items.append(value)
            out[key] = items
        else:
            out[key] = value
        if pos == len(text):
            return out
        if text[pos] != ",":
            raise GrammarError(text, pos, ["','", "end of symbol"])
        pos += 1


def _real(text: str, value: complex, name: str) -> float:
    if value.imag != 0:
        raise UsageError(f"symbol {text!r}: {name} must be real")
    return value.real


def parse_symbol(text: str) -> Symbol:
    """Parse the symbol grammar.

    ``mobius:theta=<f>,z0=<re>+<im>i``, ``psi1``, ``psi2``, ``psi1^n:<int>``,
    ``hyperbolic:r=<f>``, ``blaschke:zeros=<list>,theta=<f>``,
    ``poly:coeffs=<list>``; lists are comma separated.
    """
    s = text.strip()
    if s in ("psi1", "psi2"):
        return Symbol(s, s, special(s))
    if s.startswith("psi1^n:"):
        pos = len("psi1^n:")
        m = _INT.fullmatch(s, pos)
        if not m:
            raise GrammarError(s, pos, ["an integer power"])
        k = int(m.group(0))
        return Symbol(s, "psi1^n", iterate(special("psi1"), k))
    for head in ("mobius:", "hyperbolic:", "blaschke:", "poly:"):
        if s.startswith(head):
            break
    else:
        raise GrammarError(s, 0, [repr(k.rstrip(":")) for k in SYMBOL_KINDS])
    pos = len(head)
    try:
        if head == "mobius:":
            kv = _parse_kv(s, pos, {"theta": False, "z0": False})
            theta = _real(s, kv.get("theta", 0j), "theta")
            return Symbol(s, "mobius", disk_automorphism(theta, kv.get("z0", 0j)), theta=theta)
        if head == "hyperbolic:":
            kv = _parse_kv(s, pos, {"r": False})
            if "r" not in kv:
                raise GrammarError(s, len(s), ["'r='"])
            return Symbol(s, "hyperbolic", hyperbolic(_real(s, kv["r"], "r")))
        if head == "blaschke:":
            kv = _parse_kv(s, pos, {"zeros": True, "theta": False})
            if "zeros" not in kv:
                raise GrammarError(s, len(s), ["'zeros='"])
            theta = _real(s, kv.get("theta", 0j), "theta")
            zeros = tuple(kv["zeros"])
            blaschke_taylor(zeros, theta, 1)  # validates the zeros
            return Symbol(s, "blaschke", zeros=zeros, theta=theta)
        kv = _parse_kv(s, pos, {"coeffs": True})
        if "coeffs" not in kv:
            raise GrammarError(s, len(s), ["'coeffs='"])
        return Symbol(s, "poly", coeffs=tuple(kv["coeffs"]))
    except GrammarError:
        raise
    except ValueError as exc:
        raise UsageError(f"symbol {s!r}: {exc}") from None


# -- output ------------------------------------------------------------------------


def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0
    # keep floats recognisable as floats after a JSON round trip
    return text if any(c in text for c in ".en") else text + ".0"


def plain(obj: Any) -> Any:
    """Reduce results to dicts, lists, strings, bools, ints and floats."""
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (Fraction, GaussianRational)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [plain(v) for v in obj]
    if hasattr(obj, "__dict__"):
        return plain(vars(obj))
    return str(obj)


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if not obj:
        return "[]"
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return _num(v).strip('"')
    if isinstance(v, list):
        return " ".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def to_csv(header: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(plain(row.get(h))) for h in header])
    return buf.getvalue()


@dataclass
class Result:
    """What a command hands back: JSON payload, CSV table and pass/fail."""

    payload: dict
    header: Sequence[str] = ()
    rows: Sequence[dict] = ()
    passed: bool | None = None


def emit(result: Result, args: argparse.Namespace) -> None:
    if args.format == "csv":
        if not result.header:
            raise UsageError(f"command {args.command!r} has no CSV table; use --format json")
        text = to_csv(result.header, result.rows)
    else:
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command}
        doc.update(plain(result.payload))
        if result.passed is not None:
            doc["pass"] = result.passed
        text = dumps(doc) + "\n"
    if getattr(args, "dump_series", None):
        series = parse_symbol(args.symbol).series(args.size - 1)
        Path(args.dump_series).write_text(dumps(series.to_json()) + "\n", encoding="utf-8")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------------


def _weights(args) -> WeightSequence:
    try:
        return parse_weights(args.weights)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"--sizes expects comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes needs positive integers")
    return sizes


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _decimal_exact(z: complex) -> GaussianRational:
    return GaussianRational(Fraction(repr(z.real)), Fraction(repr(z.imag)))


def cmd_matrix(args) -> Result:
    sym, w = parse_symbol(args.symbol), _weights(args)
    g = sym.series(args.size - 1)
    if args.kind == "composition":
        A = composition_section(g, w, args.size)
    else:
        A = multiplication_section(g, w, args.size)
    M = A.to_numpy()
    rows = [
        {"row": i, "col": j, "re": float(M[i, j].real), "im": float(M[i, j].imag)}
        for i in range(M.shape[0])
        for j in range(M.shape[1])
    ]
    payload = {"symbol": sym.text, "weights": w.label, "operator": args.kind, "matrix": A.to_json()}
    return Result(payload, ("row", "col", "re", "im"), rows)


def cmd_norm(args) -> Result:
    sym, w = parse_symbol(args.symbol), _weights(args)
    rows = []
    for n in _sizes(args.sizes):
        A = composition_section(sym.series(n - 1), w, n)
        rows.append({"N": n, "sigma_max": op_norm(A, args.method)})
    payload = {"symbol": sym.text, "weights": w.label, "method": args.method, "table": rows}
    return Result(payload, ("N", "sigma_max"), rows)


def cmd_spectrum(args) -> Result:
    sym, w = parse_symbol(args.symbol), _weights(args)
    m = sym.require_moebius()
    model = spectrum_model(m, w)
    ev = eigenvalues(composition_section(m.to_float().taylor(args.size - 1), w, args.size))
    mod = np.abs(ev)
    rows = [{"index": i, "re": float(z.real), "im": float(z.imag), "modulus": float(a)} for i, (z, a) in enumerate(zip(ev, mod))]
    section = {"N": args.size, "min_modulus": float(mod.min()), "max_modulus": float(mod.max()), "eigenvalues": ev}
    payload = {"symbol": sym.text, "weights": w.label, "model": model, "section": section}
    return Result(payload, ("index", "re", "im", "modulus"), rows)


def cmd_classify(args) -> Result:
    sym = parse_symbol(args.symbol)
    m = sym.require_moebius()
    cls = classify(m, args.tol)
    payload = {"symbol": sym.text, "classification": cls}
    if cls.kind is not AutoKind.IDENTITY:
        conj = canonical_conjugator(m, args.tol)
        payload["conjugator"] = {
            "tau": list(conj.tau.to_float().entries),
            "canonical": list(conj.canonical.to_float().entries),
            "target": conj.target,
            "residual": conj.residual,
        }
    row = {"symbol": sym.text, "kind": cls.kind.value}
    return Result(payload, ("symbol", "kind"), [row])


def cmd_fredholm(args) -> Result:
    sym, w = parse_symbol(args.symbol), _weights(args)
    verdict = fredholm_verdict(sym.series(args.size - 1), w, args.tol)
    doc = plain(verdict)
    row = {"symbol": sym.text, "weights": w.label, "status": doc["status"], "order": doc["order"], **doc["evidence"]}
    header = ("symbol", "weights", "status", "order", "boundary_modulus", "winding", "automorphism_check")
    return Result({"symbol": sym.text, "weights": w.label, "verdict": verdict}, header, [row])


def cmd_sigmin(args) -> Result:
    sym, w = parse_symbol(args.symbol), _weights(args)
    table = [{"N": n, "smallest_sv": s} for n, s in closed_range_signature(sym.series(max(_sizes(args.sizes))), w, _sizes(args.sizes))]
    return Result({"symbol": sym.text, "weights": w.label, "table": table}, ("N", "smallest_sv"), table)


# verification suites: each returns (payload, rows, passed)


def suite_f2(args) -> tuple[dict, list, bool]:
    w = _weights(args)
    tol = args.tolerance if args.tolerance is not None else 1e-8
    # exact mode reads the typed decimal (0.4 -> 2/5), not its binary double
    z0 = _decimal_exact(args.z0) if args.exact else args.z0
    rep = verify_f2(w, z0, args.size, args.block, exact=args.exact, convention=args.convention, tolerance=tol)
    row = plain(rep)
    return row, [{"check": f"f2 N={args.size} block={args.block}", **row}], rep.passed


def suite_dn_eigs(args) -> tuple[dict, list, bool]:
    rows = []
    first = dn_block_eigs(1.0, 0.5)
    rows.append({"check": "dn_block_eigs(1, 0.5)", "value": list(first), "expected": [2.25, 0.25], "pass": first == (2.25, 0.25)})
    for z0 in (0.2, 0.4, 0.6):
        for wn in (0.5, 1.0, 2.0):
            D = dtm_block(wn, z0)
            direct = np.sort(np.linalg.eigvalsh(D.conj().T @ D))[::-1]
            got = np.array(dn_block_eigs(wn, z0))
            err = float(np.max(np.abs(direct - got)))
            rows.append({"check": f"eigs w_n={wn:g} z0={z0:g}", "value": list(got), "expected": list(direct), "pass": err <= 1e-12})
            for rep in check_bounds("a", z0=z0, w_n=wn):
                rows.append({"check": f"{rep.formula_id} w_n={wn:g} z0={z0:g}", "value": [rep.lhs], "expected": [rep.rhs], "pass": rep.passed})
    ok = all(r["pass"] for r in rows)
    return {"checks": rows}, rows, ok


def suite_iterates(args) -> tuple[dict, list, bool]:
    psi1, psi2 = special("psi1", exact=True), special("psi2", exact=True)
    G = GaussianRational
    rows = []
    for n in range(1, args.count + 1):
        closed = MoebiusMap(G(n, 1), G(-n), G(n), G(-n, 1))
        rows.append({"check": f"psi1^{n} closed form", "pass": iterate(psi1, n).equals(closed)})
    rows.append({"check": "psi1 o psi2 = id", "pass": compose(psi1, psi2).is_identity()})
    for n in range(1, min(args.count, 50) + 1):
        tau = special("tau_n", n, exact=True)
        conj = compose(tau, compose(psi1, tau.inverse()))
        rows.append({"check": f"tau_{n} psi1 tau_{n}^-1 = psi1^{n}", "pass": conj.equals(iterate(psi1, n))})
    for k in (1, 2, 3, 10):
        rows.append({"check": f"psi1^{k}(0) = {k}/({k}-i)", "pass": iterate(psi1, k)(0) == parabolic_orbit_at_zero(k)})
    return {"checks": rows}, rows, all(r["pass"] for r in rows)


def _conjugator_grid() -> list[tuple[str, MoebiusMap]]:
    maps = [("psi1", special("psi1")), ("psi2", special("psi2"))]
    for n in (2, 5, 17):
        maps.append((f"psi1^{n}", iterate(special("psi1"), n)))
    for r in (0.1, 0.5, 0.9):
        maps.append((f"hyperbolic r={r:g}", hyperbolic(r)))
    for theta in (0.3, 1.0, 2.5):
        for z0 in (0.2, 0.5 + 0.3j, -0.7j):
            maps.append((f"mobius theta={theta:g} z0={z0}", disk_automorphism(theta, z0)))
    return maps


def suite_conjugators(args) -> tuple[dict, list, bool]:
    rows = []
    for name, m in _conjugator_grid():
        conj = canonical_conjugator(m, args.tol)
        rows.append({"check": name, "target": conj.target, "residual": conj.residual, "pass": conj.residual < 1e-9})
    return {"checks": rows}, rows, all(r["pass"] for r in rows)


def suite_bounds(args) -> tuple[dict, list, bool]:
    formulas = tuple(args.formulas.split(",")) if args.formulas else ("a", "b", "c", "d", "e", "f")
    unknown = set(formulas) - set(FORMULAS)
    if unknown:
        raise UsageError(f"unknown formula id(s) {sorted(unknown)}; expected {sorted(FORMULAS)}")
    reports = bounds_grid(formulas, args.size)
    rows = []
    for rep in reports:
        p = rep.params
        rows.append({"check": rep.formula_id, "z0": p["z0"], "weights": p.get("weights"), "lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack, "pass": rep.passed})
    return {"reports": reports}, rows, all(r["pass"] for r in rows)


SUITES: dict[str, Callable] = {
    "f2": suite_f2,
    "dn-eigs": suite_dn_eigs,
    "iterate-closed-forms": suite_iterates,
    "conjugators": suite_conjugators,
    "bounds": suite_bounds,
}


def cmd_verify(args) -> Result:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    payload, rows, ok = {}, [], True
    for name in names:
        p, r, passed = SUITES[name](args)
        payload[name] = {"pass": passed, **p}
        rows += [{"suite": name, **row} for row in r]
        ok = ok and passed
    header = ("suite", "check", "target", "z0", "weights", "value", "expected", "residual", "lhs", "rhs", "slack", "pass")
    return Result({"suites": payload}, header, rows, ok)


def cmd_witness(args) -> Result:
    if args.family == "parabolic":
        rows = []
        for m in range(1, args.m_max + 1):
            pw = parabolic_witness(m)
            rows.append({"m": m, "S": pw.total, "lower": pw.lower, "S_float": float(pw.total), "holds": pw.holds})
        ok = all(r["holds"] for r in rows)
        return Result({"family": "parabolic", "rows": rows}, ("m", "S", "lower", "S_float", "holds"), rows, ok)
    sym, w = parse_symbol(args.symbol), _weights(args)
    rep = cr_witness_family(sym.series(args.size), args.xi, args.t, args.k_max, w, args.size)
    rows = [plain(r) for r in rep.rows]
    header = ("k", "norm_Cf_k", "root", "norm_f_k", "f_k_at_0")
    return Result({"family": "cr", "symbol": sym.text, "report": rep}, header, rows)


def cmd_fit(args) -> Result:
    w = _weights(args)
    rep = exponent_fit(args.kind, w, _floats(args.grid, "--grid"), args.size)
    rows = [{"x": x, "log_norm": y} for x, y in zip(rep.xs, rep.ys)]
    return Result({"fit": rep}, ("x", "log_norm"), rows, rep.passed)


# -- sweep -------------------------------------------------------------------------

SWEEP_FAMILIES = {
    "mobius": lambda v: f"mobius:theta=0,z0={v!r}",
    "hyperbolic": lambda v: f"hyperbolic:r={v!r}",
    "blaschke2": lambda v: f"blaschke:zeros=0,{v!r},theta=0",
}
SWEEP_QUANTITIES = ("norm", "fredholm", "spectrum")


def _sweep_task(task: tuple[str, str, str, int]) -> dict:
    quantity, symbol, weights, n = task
    sym, w = parse_symbol(symbol), parse_weights(weights)
    row: dict[str, Any] = {"symbol": symbol, "weights": w.label, "N": n}
    if quantity == "norm":
        row["value"] = op_norm(composition_section(sym.series(n - 1), w, n))
    elif quantity == "fredholm":
        row["value"] = fredholm_verdict(sym.series(n - 1), w).status.value
    else:
        model = spectrum_model(sym.require_moebius(), w)
        row["value"] = model.kind.value
        row["r_in"], row["r_out"] = model.r_in, model.r_out
    return row


def worker_count(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def cmd_sweep(args) -> Result:
    values = _floats(args.values, "--values")
    weight_list = [s for s in args.weights_list.split(";") if s]
    for s in weight_list:
        args.weights = s
        _weights(args)
    tasks = [(args.quantity, SWEEP_FAMILIES[args.family](v), s, args.size) for s in weight_list for v in values]
    for t in tasks:
        parse_symbol(t[1])
    jobs = worker_count(args.jobs)
    if jobs == 1:
        rows = [_sweep_task(t) for t in tasks]
    else:
        # map keeps the deterministic grid order regardless of completion order
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    for v, row in zip(values * len(weight_list), rows):
        row["parameter"] = v
    header = ("parameter", "symbol", "weights", "N", "value", "r_in", "r_out")
    return Result({"family": args.family, "quantity": args.quantity, "rows": rows}, header, rows)


# -- parser ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser, weights=True, size=256) -> None:
    if weights:
        p.add_argument("--weights", default="hardy", help="hardy | dirichlet:lambda=<f> | dn1:n=<k> | dn2:n=<k> | custom:file=<path>")
    p.add_argument("--size", type=int, default=size, help="section size N")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardycomp", description="Composition operators on weighted Hardy spaces.")
    parser.add_argument("--config", help="file of extra flags, same syntax as the command line")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("matrix", help="dump a finite section")
    p.add_argument("--symbol", required=True)
    p.add_argument("--kind", choices=("composition", "multiplication"), default="composition")
    _common(p, size=16)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("norm", help="largest singular value of sections of increasing size")
    p.add_argument("--symbol", required=True)
    p.add_argument("--sizes", default="128,256,512")
    p.add_argument("--method", choices=("auto", "dense", "power"), default="auto")
    _common(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("spectrum", help="spectrum model plus section eigenvalues")
    p.add_argument("--symbol", required=True)
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("classify", help="elliptic / parabolic / hyperbolic class and conjugator")
    p.add_argument("--symbol", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    _common(p, weights=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fredholm", help="closed-range / Fredholm verdict")
    p.add_argument("--symbol", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    _common(p)
    p.set_defaults(func=cmd_fredholm)

    p = sub.add_parser("sigmin", help="smallest singular value of the N x N/4 block, per N")
    p.add_argument("--symbol", required=True)
    p.add_argument("--sizes", default="128,256,512")
    _common(p)
    p.set_defaults(func=cmd_sigmin)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", choices=(*SUITES, "all"))
    p.add_argument("--z0", type=_complex_arg, default=0.4)
    p.add_argument("--block", type=int, default=32)
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic for f2")
    p.add_argument("--convention", choices=("adjoint", "gram"), default="adjoint")
    p.add_argument("--tolerance", type=float, default=None, help="f2 residual threshold (default 1e-8)")
    p.add_argument("--count", type=int, default=100, help="iterates checked by iterate-closed-forms")
    p.add_argument("--formulas", default="", help="comma-separated bound ids for the bounds suite")
    p.add_argument("--tol", type=float, default=1e-9)
    _common(p, size=512)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witness", help="parabolic witness sums or the closed-range witness family")
    p.add_argument("family", choices=("parabolic", "cr"))
    p.add_argument("--m-max", type=int, default=50)
    p.add_argument("--symbol", default="poly:coeffs=0,0.5")
    p.add_argument("--xi", type=_complex_arg, default=1.0)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--k-max", type=int, default=20)
    _common(p, size=512)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("fit", help="exponent fit of section norms")
    p.add_argument("--kind", choices=("normC", "normB", "hyperbolic"), default="normC")
    p.add_argument("--grid", default="0.5,0.6,0.7,0.8,0.9")
    _common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="grid over a symbol family and weights")
    p.add_argument("--family", choices=tuple(SWEEP_FAMILIES), default="mobius")
    p.add_argument("--values", default="0.2,0.4,0.6")
    p.add_argument("--weights-list", default="hardy", help="semicolon-separated weight presets")
    p.add_argument("--quantity", choices=SWEEP_QUANTITIES, default="norm")
    p.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")
    _common(p, weights=False, size=128)
    p.set_defaults(func=cmd_sweep)

    for p in sub.choices.values():
        if any("--symbol" in a.option_strings for a in p._actions):
            p.add_argument("--dump-series", metavar="PATH", help="also write the symbol's Taylor coefficients as [re, im] pairs")
    return parser


def expand_config(argv: list[str]) -> list[str]:
    """Splice the tokens of ``--config <path>`` into argv.

    A config file that names a subcommand goes first; otherwise its flags are
    placed right after the subcommand given on the command line.
    """
    out, cfg = [], None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            cfg = next(it, None)
            if cfg is None:
                raise UsageError("--config needs a path")
        elif tok.startswith("--config="):
            cfg = tok.split("=", 1)[1]
        else:
            out.append(tok)
    if cfg is None:
        return out
    try:
        text = Path(cfg).read_text(encoding="utf-8")
        tokens = shlex.split(text, comments=True)
    except (OSError, ValueError) as exc:
        raise UsageError(f"config {cfg}: {exc}") from None
    commands = set(build_parser()._subparsers._group_actions[0].choices)
    if tokens and tokens[0] in commands:
        return tokens + out
    idx = next((i for i, t in enumerate(out) if t in commands), None)
    if idx is None:
        raise UsageError("no subcommand given on the command line or in the config file")
    return out[: idx + 1] + tokens + out[idx + 1 :]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(expand_config(argv))
        result = args.func(args)
        emit(result, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError) as exc:
        # numerical failures keep the module's own message
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if result.passed is False:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
