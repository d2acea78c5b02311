"""Command-line entry point: ``reflectwalk {table,spectrum,verify,simulate,moments}``.

Every command reads a JSON run configuration::

    {"probs": ["3/10", "1/10", "1/10", "1/2"], "j": 5,
     "n_values": [10, 20, 50, 100, 200, 400],
     "seed": 12345, "paths": 1000000, "output": null}

Probabilities are strings so that ``"3/10"`` and ``"0.3"`` stay exact.
``--probs``/``--j``/``--n`` override the file, or replace it entirely.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .asymptotics import (
    asymptotic_expectation,
    constants_closed_form,
    constants_root_sum,
    decomposition_eval,
)
from .dp import expected_positions_dp
from .errors import WalkError
from .jump_model import Case, JumpDistribution, classify_case, moment, phi_polynomial, validate
from .montecarlo import estimate_expectation
from .series import h_series
from .spectral import spectrum_report

DEFAULT_N = (10, 20, 50, 100, 200, 400)
MAX_CLI_MOMENT = 16


@dataclass
class RunConfig:
    probs: list[str]
    j: int = 0
    n_values: list[int] = field(default_factory=lambda: list(DEFAULT_N))
    seed: int | None = None
    paths: int | None = None
    output: str | None = None

    def distribution(self) -> JumpDistribution:
        return validate(self.probs)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<config>") -> "RunConfig":
        if not isinstance(raw, dict):
            raise WalkError("CONFIG_ERROR", f"{source}: top level must be a JSON object")
        unknown = set(raw) - {"probs", "j", "n_values", "seed", "paths", "output"}
        if unknown:
            raise WalkError("CONFIG_ERROR", f"{source}: unknown field(s) {sorted(unknown)}")
        if "probs" not in raw:
            raise WalkError("CONFIG_ERROR", f"{source}: field 'probs' is required")
        probs = raw["probs"]
        if not isinstance(probs, list):
            raise WalkError("CONFIG_ERROR", f"{source}: field 'probs' must be a list")
        probs = [p if isinstance(p, str) else _number_to_str(p, source) for p in probs]
        cfg = cls(
            probs=probs,
            j=_int_field(raw, "j", source, default=0, minimum=0),
            n_values=list(raw.get("n_values", DEFAULT_N)),
            seed=_int_field(raw, "seed", source, default=None, minimum=0),
            paths=_int_field(raw, "paths", source, default=None, minimum=2),
            output=raw.get("output"),
        )
        cfg.check(source)
        return cfg

    @classmethod
    def from_json(cls, text: str, source: str = "<config>") -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WalkError(
                "CONFIG_ERROR", f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        return cls.from_dict(raw, source)

    def check(self, source: str = "<config>") -> None:
        ns = self.n_values
        if not ns or not all(isinstance(n, int) and not isinstance(n, bool) for n in ns):
            raise WalkError("CONFIG_ERROR", f"{source}: field 'n_values' must be a non-empty list of integers")
        if ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise WalkError("CONFIG_ERROR", f"{source}: field 'n_values' must be positive and strictly increasing")
        if self.seed is not None and self.seed >= 1 << 64:
            raise WalkError("CONFIG_ERROR", f"{source}: field 'seed' must fit in 64 bits")
        self.distribution()


def _number_to_str(p, source: str) -> str:
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise WalkError("CONFIG_ERROR", f"{source}: probability {p!r} is not a number or string")
    # JSON numbers arrive as floats; their shortest repr is what the user wrote
    return repr(p)


def _int_field(raw: dict, name: str, source: str, default, minimum: int):
    v = raw.get(name, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise WalkError("CONFIG_ERROR", f"{source}: field '{name}' must be an integer >= {minimum}")
    return v


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise WalkError("CONFIG_ERROR", f"cannot read {path}: {exc.strerror}") from exc
        raw = RunConfig.from_json(text, str(path))
        raw = asdict(raw)
    elif args.probs:
        raw = {"probs": None}
    else:
        raise WalkError("CONFIG_ERROR", "give --config FILE or --probs")
    if args.probs:
        raw["probs"] = [s for s in args.probs.replace(",", " ").split()]
    if args.j is not None:
        raw["j"] = args.j
    if args.n:
        raw["n_values"] = args.n
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.paths is not None:
        raw["paths"] = args.paths
    if args.output:
        raw["output"] = args.output
    return RunConfig.from_dict(raw, args.config or "<command line>")


class Formatter:
    def __init__(self, digits: int, full: bool):
        self.digits = digits
        self.full = full

    def __call__(self, x) -> str:
        if x is None:
            return ""
        if isinstance(x, int):
            return str(x)
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return repr(x) if self.full else f"{x:.{self.digits}f}"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _exact_columns(d: JumpDistribution, j: int, n_max: int) -> tuple[list[Fraction], list[Fraction]]:
    dp = expected_positions_dp(d, j, n_max)
    ser = list(h_series(d, j, n_max).coeffs)
    return dp, ser


def cmd_table(cfg: RunConfig, fmt: Formatter, err=sys.stderr) -> tuple[str, int]:
    d = cfg.distribution()
    dp, ser = _exact_columns(d, cfg.j, cfg.n_values[-1])
    header = ["n", "I", "I+II", "I+II+III", "exact_dp", "exact_series", "abs_err", "err_times_n32"]
    rows = []
    status = 0
    warned = False
    for n in cfg.n_values:
        if dp[n] != ser[n]:
            print(f"MISMATCH: n={n} dp={dp[n]} series={ser[n]}", file=err)
            status = 1
        try:
            b = asymptotic_expectation(d, cfg.j, n)
            cells = [b.term1, b.term1 + b.term2, b.total]
            abs_err = abs(float(dp[n]) - b.total)
            scaled = abs_err * n**1.5
        except WalkError as exc:
            if not warned:
                print(f"note: asymptotic columns left blank ({exc.code})", file=err)
                warned = True
            cells, abs_err, scaled = [None] * 3, None, None
        rows.append([str(n)] + [fmt(c) for c in cells] + [fmt(dp[n]), fmt(ser[n]), fmt(abs_err), fmt(scaled)])
    return _csv_text(header, rows), status


def spectrum_data(cfg: RunConfig) -> dict:
    d = cfg.distribution()
    phi = phi_polynomial(d)
    try:
        rep = spectrum_report(d)
    except WalkError as exc:
        raise WalkError(exc.code, f"{exc} (phi = {phi})") from exc
    tag = classify_case(d)
    roots = []
    for a, c, lam in zip(rep.roots, rep.classes, rep.lambdas):
        roots.append(
            {
                "alpha": [a.real, a.imag],
                "abs_alpha": abs(a),
                "class": c.value,
                "lambda": [lam.real, lam.imag],
            }
        )
    repeated = None
    if not rep.squarefree:
        for i, a in enumerate(rep.roots):
            for b in rep.roots[i + 1:]:
                if abs(a - b) <= 1e-7:
                    repeated = a
                    break
            if repeated is not None:
                break
    return {
        "probs": [str(p) for p in d.probs],
        "case": tag.variant.value,
        "phi": str(phi),
        "degree": phi.degree,
        "roots": roots,
        "counts": rep.counts(),
        "a4": rep.squarefree,
        "separation": rep.separation if math.isfinite(rep.separation) else None,
        "repeated_root": None if repeated is None else [repeated.real, repeated.imag],
        "essential_spectrum": list(rep.essential_spectrum),
    }


def _fmt_complex(re_im, digits: int) -> str:
    re, im = re_im
    if abs(im) < 10 ** (-digits - 2):
        return f"{re:.{digits}f}"
    return f"{re:.{digits}f}{'+' if im >= 0 else '-'}{abs(im):.{digits}f}i"


def cmd_spectrum(cfg: RunConfig, digits: int, as_json: bool) -> str:
    data = spectrum_data(cfg)
    if as_json:
        return json.dumps(data, indent=2) + "\n"
    lines = [
        f"phi(x) = {data['phi']}",
        f"case: {data['case']}",
        "essential spectrum: [-1, 1]",
        "",
        "alpha,abs_alpha,class,lambda",
    ]
    for r in data["roots"]:
        lines.append(
            f"{_fmt_complex(r['alpha'], digits)},{r['abs_alpha']:.{digits}f},"
            f"{r['class']},{_fmt_complex(r['lambda'], digits)}"
        )
    lines.append("")
    if data["a4"]:
        lines.append(f"A4 holds: roots pairwise separated (min distance {data['separation']:.3g})")
    else:
        where = _fmt_complex(data["repeated_root"], 6).rstrip("0").rstrip(".")
        lines.append(f"A4 violated: double root at {where}")
    return "\n".join(lines) + "\n"


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str


def _skip_reason(d: JumpDistribution) -> str | None:
    tag = classify_case(d)
    if tag.variant is Case.P0_ONE:
        return "P0_ONE"
    if tag.variant is Case.SPECIAL_HALF_HALF:
        return "SPECIAL_HALF_HALF: psi has no roots"
    if not spectrum_report(d).squarefree:
        return "A4_VIOLATED"
    return None


def run_checks(cfg: RunConfig, mc_paths: int | None = None) -> list[Check]:
    d = cfg.distribution()
    j = cfg.j
    out: list[Check] = []
    rng = random.Random(cfg.seed or 0)

    def guarded(name: str, fn: Callable[[], Check]) -> None:
        try:
            out.append(fn())
        except WalkError as exc:
            out.append(Check(name, "fail", str(exc)))

    def dp_vs_series() -> Check:
        dp, ser = _exact_columns(d, j, 60)
        for n in range(61):
            if dp[n] != ser[n]:
                return Check("dp_series_exact", "fail", f"n={n}: dp={dp[n]} series={ser[n]}")
        return Check("dp_series_exact", "pass", "exact agreement for n = 0..60")

    def constants() -> Check:
        reason = _skip_reason(d)
        if reason:
            return Check("constants_two_route", "skip", reason)
        a, b = constants_closed_form(d), constants_root_sum(d)
        worst = max(abs(complex(x) - complex(y)) for x, y in [(a.c1, b.c1), (a.c2, b.c2), (a.c3, b.c3)])
        ok = worst < 1e-10
        return Check(
            "constants_two_route",
            "pass" if ok else "fail",
            f"closed form ({a.c1:.12g}, {a.c2:.12g}, {a.c3:.12g}) vs root sums "
            f"({b.c1.real:.12g}, {b.c2.real:.12g}, {b.c3.real:.12g}); max diff {worst:.3g}",
        )

    def decomposition() -> Check:
        reason = _skip_reason(d)
        if reason:
            return Check("decomposition_identity", "skip", reason)
        h0 = h_series(d, 0, 120)
        worst, where = 0.0, 0j
        for _ in range(20):
            z = 0.5 * math.sqrt(rng.random()) * complex(math.cos(t := 2 * math.pi * rng.random()), math.sin(t))
            diff = abs(decomposition_eval(d, z) - h0.evaluate(z))
            if diff > worst:
                worst, where = diff, z
        ok = worst < 1e-9
        return Check("decomposition_identity", "pass" if ok else "fail",
                     f"max |decomposition - series| = {worst:.3g} at z = {where:.4f}")

    def residual_ratio() -> Check:
        tag = classify_case(d)
        if tag.variant is Case.P0_ONE:
            return Check("residual_ratio", "skip", "P0_ONE: asymptotic value is exact")
        if not spectrum_report(d).squarefree:
            return Check("residual_ratio", "skip", "A4_VIOLATED")
        ex = expected_positions_dp(d, j, 400)
        r100 = abs(float(ex[100]) - asymptotic_expectation(d, j, 100).total)
        r400 = abs(float(ex[400]) - asymptotic_expectation(d, j, 400).total)
        ratio = r100 / r400 if r400 else math.inf
        ok = 4 <= ratio <= 16
        return Check("residual_ratio", "pass" if ok else "fail",
                     f"r(100) = {r100:.4g}, r(400) = {r400:.4g}, ratio {ratio:.3g} (want 4..16)")

    def monte_carlo() -> Check:
        n = max((m for m in cfg.n_values if m <= 400), default=cfg.n_values[0])
        paths = mc_paths or cfg.paths or 100_000
        seed = cfg.seed if cfg.seed is not None else 0
        est = estimate_expectation(d, j, n, paths, seed)
        exact = float(expected_positions_dp(d, j, n)[-1])
        if est.stderr == 0:
            ok = est.mean == exact
            z = 0.0 if ok else math.inf
        else:
            z = (est.mean - exact) / est.stderr
            ok = abs(z) <= 3
        return Check("monte_carlo_3sigma", "pass" if ok else "fail",
                     f"n={n}, paths={paths}, seed={seed}: mean {est.mean:.5f} +/- {est.stderr:.5f}, "
                     f"exact {exact:.5f}, z = {z:.3g}")

    guarded("dp_series_exact", dp_vs_series)
    guarded("constants_two_route", constants)
    guarded("decomposition_identity", decomposition)
    guarded("residual_ratio", residual_ratio)
    guarded("monte_carlo_3sigma", monte_carlo)
    return out


def cmd_verify(cfg: RunConfig, as_json: bool) -> tuple[str, int]:
    checks = run_checks(cfg)
    failed = [c for c in checks if c.status == "fail"]
    if as_json:
        text = json.dumps({"checks": [asdict(c) for c in checks], "ok": not failed}, indent=2) + "\n"
    else:
        text = "".join(f"[{c.status.upper():4}] {c.name}: {c.detail}\n" for c in checks)
        text += "all checks passed\n" if not failed else f"{len(failed)} check(s) failed\n"
    return text, 1 if failed else 0


def cmd_simulate(cfg: RunConfig, fmt: Formatter) -> str:
    if cfg.paths is None:
        raise WalkError("MISSING_PATHS", "simulate needs --paths or 'paths' in the config")
    if cfg.seed is None:
        raise WalkError("MISSING_SEED", "simulate needs --seed or 'seed' in the config")
    d = cfg.distribution()
    exact = expected_positions_dp(d, cfg.j, cfg.n_values[-1])
    rows = []
    for n in cfg.n_values:
        est = estimate_expectation(d, cfg.j, n, cfg.paths, cfg.seed)
        ex = float(exact[n])
        if est.stderr > 0:
            z = (est.mean - ex) / est.stderr
        else:
            z = 0.0 if est.mean == ex else math.inf
        rows.append([str(n), fmt(est.mean), fmt(est.stderr), fmt(exact[n]), fmt(z)])
    return _csv_text(["n", "mc_mean", "mc_stderr", "exact_dp", "z_score"], rows)


def cmd_moments(cfg: RunConfig, fmt: Formatter, max_moment: int, as_json: bool) -> str:
    if not 0 <= max_moment <= MAX_CLI_MOMENT:
        raise WalkError("BAD_MOMENT", f"--max-moment must be in 0..{MAX_CLI_MOMENT}")
    d = cfg.distribution()
    ms = [(m, moment(d, m)) for m in range(max_moment + 1)]
    if as_json:
        return json.dumps({"moments": [{"m": m, "exact": str(v), "value": float(v)} for m, v in ms]}, indent=2) + "\n"
    return _csv_text(["m", "exact", "value"], [[str(m), str(v), fmt(v)] for m, v in ms])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", help="write the result here instead of standard output")
    common.add_argument("--precision", type=int, default=5, help="decimal places in CSV output (default 5)")
    common.add_argument("--full-precision", action="store_true", help="print floats with all their digits")
    common.add_argument("--paths", type=int, help="Monte Carlo path count")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--probs", help='jump law, e.g. "3/10 1/10 1/10 1/2"')
    common.add_argument("--j", type=int, help="starting position")
    common.add_argument("--n", type=int, nargs="+", help="time points")

    p = argparse.ArgumentParser(
        prog="reflectwalk",
        description="Expected position of a random walk with jumps at the origin.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common], help="asymptotic terms vs exact values (CSV)")
    sub.add_parser("spectrum", parents=[common], help="roots of phi, eigenvalues and resonances")
    sub.add_parser("verify", parents=[common], help="run the cross-validation suite")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates vs exact values (CSV)")
    pm = sub.add_parser("moments", parents=[common], help="moments E(Y^m) of the jump law")
    pm.add_argument("--max-moment", type=int, default=3, help=f"highest m (at most {MAX_CLI_MOMENT})")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        fmt = Formatter(args.precision, args.full_precision)
        status = 0
        if args.command == "table":
            text, status = cmd_table(cfg, fmt)
        elif args.command == "spectrum":
            text = cmd_spectrum(cfg, args.precision, args.json)
        elif args.command == "verify":
            text, status = cmd_verify(cfg, args.json)
        elif args.command == "simulate":
            text = cmd_simulate(cfg, fmt)
        else:
            text = cmd_moments(cfg, fmt, args.max_moment, args.json)
    except WalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return status
