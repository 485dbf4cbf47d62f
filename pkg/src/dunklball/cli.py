"""Command-line entry point.

Subcommands: ``verify``, ``basis``, ``converge``, ``sharpness``, ``moments``.
Every setting is a flag; there are no configuration files.  Exit codes:
0 success, 1 failed verification, 2 flag error, 3 numerical rank failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .harness import converge, sharpness_table, write_convergence_csv, write_sharpness_csv
from .moments import MomentEngine
from .multipoly import Polynomial
from .orthobasis import AxisPower, BasisRankError, RadialJacobi, build_basis
from .propcheck import CheckParams, all_passed, reports_to_json, run_all
from .weights import WeightParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RANK = 0, 1, 2, 3
BACKENDS = {"f64": "float", "rational": "rational"}
SUBCOMMANDS = ("verify", "basis", "converge", "sharpness", "moments")


class FlagError(ValueError):
    """A flag value that parses but is out of range or inconsistent."""


@dataclass
class CliConfig:
    subcommand: str
    dim: int
    alpha: str
    gamma: tuple
    max_degree: int
    seed: int
    backend: str
    output: str | None
    format: str

    @property
    def kind(self) -> str:
        return BACKENDS[self.backend]

    def scalar(self, text: str):
        """Parse a number: exact rational for the rational backend, float otherwise."""
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise FlagError(f"not a number: {text!r}") from exc
        return value if self.kind == "rational" else float(value)

    def weight(self) -> WeightParams:
        try:
            return WeightParams(self.scalar(self.alpha), tuple(self.scalar(g) for g in self.gamma), self.kind)
        except ValueError as exc:
            raise FlagError(str(exc)) from exc


# -- argument parsing ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--dim", type=int, required=True, help="dimension d >= 1")
    p.add_argument("--alpha", default="0", help="alpha > -1 (decimal or p/q)")
    p.add_argument("--gamma", default=None, help="comma list of d values, each > -1 (default all zero)")
    p.add_argument("--max-degree", type=int, default=8, help="degree cap for bases and checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=sorted(BACKENDS), default="f64")
    p.add_argument("--output", default=None, help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunklball", description="Dunkl-operator calculus on the unit ball.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", help="run the property checks and emit a JSON report")
    _common(p, "json")
    p.add_argument("--draws", type=int, default=50, help="random draws per check")
    p.add_argument("--check", action="append", default=None, help="restrict to this check id (repeatable)")

    p = sub.add_parser("basis", help="build and serialise an orthogonal basis")
    _common(p, "json")
    p.add_argument("--print", dest="print_text", action="store_true", help="text dump, one element per line")
    p.add_argument("--alpha-shift", type=int, default=0)

    p = sub.add_parser("converge", help="projection error table for a test function")
    _common(p, "csv")
    p.add_argument("--fn", required=True,
                   help="poly:<file> | abs-power:axis=<j>,theta=<t>[,signed] | radial-jacobi:<c0,c1,...>")
    p.add_argument("--r", type=int, default=1, help="Sobolev order")
    p.add_argument("--N", required=True, help="comma list of increasing truncation degrees")

    p = sub.add_parser("sharpness", help="ratio table for the radial sharpness sequence")
    _common(p, "csv")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--poly-cap", type=int, default=12,
                   help="largest n whose ratio is also computed from explicit polynomials")

    p = sub.add_parser("moments", help="a single normalised moment")
    _common(p, "json")
    p.add_argument("--index", required=True, help="comma list of d non-negative integers")
    p.add_argument("--theta", default=None, help="comma list of d real exponent shifts (f64 only)")
    return parser


def _config(ns: argparse.Namespace) -> CliConfig:
    if ns.dim < 1:
        raise FlagError("--dim must be at least 1")
    gamma = tuple(ns.gamma.split(",")) if ns.gamma is not None else ("0",) * ns.dim
    if ns.gamma is not None and len(gamma) == 1 and ns.dim > 1:
        gamma = gamma * ns.dim
    if len(gamma) != ns.dim:
        raise FlagError(f"--gamma has {len(gamma)} entries but --dim is {ns.dim}")
    if ns.max_degree < 0:
        raise FlagError("--max-degree must be non-negative")
    cfg = CliConfig(ns.subcommand, ns.dim, ns.alpha, tuple(g.strip() for g in gamma), ns.max_degree,
                    ns.seed, ns.backend, ns.output, ns.format)
    cfg.weight()
    return cfg


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FlagError(f"{flag} must be a comma list of integers, got {text!r}") from exc


# -- subcommands ---------------------------------------------------------------------

def _verify(cfg: CliConfig, ns) -> tuple[str, int]:
    if ns.draws < 1:
        raise FlagError("--draws must be positive")
    params = CheckParams(cfg.dim, cfg.weight().alpha, cfg.weight().gamma, cfg.max_degree, cfg.seed,
                         cfg.kind, ns.draws)
    reports = run_all(params, ns.check)
    ok = all_passed(reports)
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write("check_id,max_residual,threshold,pass\n")
        for r in reports:
            buf.write(f"{r.check_id},{r.max_residual!r},{r.threshold!r},{str(r.passed).lower()}\n")
        return buf.getvalue(), EXIT_OK if ok else EXIT_FAIL
    return reports_to_json(reports) + "\n", EXIT_OK if ok else EXIT_FAIL


def _basis(cfg: CliConfig, ns) -> tuple[str, int]:
    if ns.alpha_shift < 0:
        raise FlagError("--alpha-shift must be non-negative")
    b = build_basis(cfg.weight(), cfg.max_degree, alpha_shift=ns.alpha_shift)
    if ns.print_text:
        lines = []
        for k, level in enumerate(b.levels):
            for i, p in enumerate(level):
                lines.append(f"k={k} i={i}: " + p.to_text().replace("\n", " ; "))
        return "\n".join(lines) + "\n", EXIT_OK
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write("k,i,norm2,coefficient," + ",".join(f"a{j + 1}" for j in range(cfg.dim)) + "\n")
        for k, level in enumerate(b.levels):
            for i, p in enumerate(level):
                for a, c in p.terms.items():
                    buf.write(f"{k},{i},{_num(b.norms2[k][i])},{_num(c)}," + ",".join(map(str, a)) + "\n")
        return buf.getvalue(), EXIT_OK
    doc = {"weight": cfg.weight().describe(), "max_degree": b.max_degree, "alpha_shift": b.alpha_shift,
           "levels": [[{"norm2": _num(b.norms2[k][i]),
                        "terms": [[_num(c), *a] for a, c in p.terms.items()]}
                       for i, p in enumerate(level)] for k, level in enumerate(b.levels)]}
    return json.dumps(doc, indent=1, default=str) + "\n", EXIT_OK


def parse_function_spec(spec: str, w: WeightParams):
    """Test function from the ``--fn`` grammar."""
    head, _, body = spec.partition(":")
    if not body:
        raise FlagError(f"malformed --fn {spec!r}")
    if head == "poly":
        path = Path(body)
        if not path.is_file():
            raise FlagError(f"polynomial file not found: {body}")
        try:
            p = Polynomial.from_text(path.read_text(), w.d, w.kind)
        except ValueError as exc:
            raise FlagError(f"bad polynomial file: {exc}") from exc
        return p
    if head == "abs-power":
        if w.kind != "float":
            raise FlagError("abs-power functions need the f64 backend")
        opts, signed = {}, False
        for item in body.split(","):
            key, eq, val = item.strip().partition("=")
            if key == "signed" and not eq:
                signed = True
            elif key in ("axis", "theta") and eq:
                opts[key] = val
            else:
                raise FlagError(f"unknown abs-power field {item!r}")
        if set(opts) != {"axis", "theta"}:
            raise FlagError("abs-power needs axis=<j> and theta=<t>")
        try:
            axis, theta = int(opts["axis"]), float(opts["theta"])
        except ValueError as exc:
            raise FlagError(f"bad abs-power values in {spec!r}") from exc
        if not 0 <= axis < w.d:
            raise FlagError(f"axis must lie in [0, {w.d - 1}]")
        if theta < 0:
            raise FlagError("theta must be non-negative")
        return AxisPower(axis, theta, signed)
    if head == "radial-jacobi":
        coeffs = []
        for t in body.split(","):
            try:
                coeffs.append(Fraction(t) if w.kind == "rational" else float(t))
            except (ValueError, ZeroDivisionError) as exc:
                raise FlagError(f"bad radial-jacobi coefficient {t!r}") from exc
        return RadialJacobi(tuple(coeffs))
    raise FlagError(f"unknown function family {head!r}")


def _converge(cfg: CliConfig, ns) -> tuple[str, int]:
    w = cfg.weight()
    n_list = _int_list(ns.N, "--N")
    if not n_list or min(n_list) < 0:
        raise FlagError("--N needs non-negative degrees")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise FlagError("--N must be strictly increasing")
    if ns.r < 0:
        raise FlagError("--r must be non-negative")
    u = parse_function_spec(ns.fn, w)
    if isinstance(u, AxisPower) and ns.r > 1:
        raise FlagError("abs-power functions support --r 0 or 1")
    basis = build_basis(w, max(max(n_list), cfg.max_degree))
    records = converge(w, u, ns.r, n_list, basis)
    if cfg.format == "json":
        return json.dumps([asdict(r) for r in records], indent=1) + "\n", EXIT_OK
    buf = io.StringIO()
    write_convergence_csv(records, buf)
    return buf.getvalue(), EXIT_OK


def _sharpness(cfg: CliConfig, ns) -> tuple[str, int]:
    if ns.n_max < ns.n_min or ns.n_min < 1:
        raise FlagError("need 1 <= --n-min <= --n-max")
    rows = sharpness_table(cfg.weight(), ns.n_max, ns.n_min, ns.poly_cap)
    if cfg.format == "json":
        return json.dumps([asdict(r) for r in rows], indent=1, default=float) + "\n", EXIT_OK
    buf = io.StringIO()
    write_sharpness_csv(rows, buf)
    return buf.getvalue(), EXIT_OK


def _moments(cfg: CliConfig, ns) -> tuple[str, int]:
    index = _int_list(ns.index, "--index")
    if len(index) != cfg.dim or min(index) < 0:
        raise FlagError(f"--index needs {cfg.dim} non-negative integers")
    theta = None
    if ns.theta is not None:
        if cfg.kind == "rational":
            raise FlagError("the rational backend does not accept --theta (the moment is not rational)")
        try:
            theta = tuple(float(t) for t in ns.theta.split(","))
        except ValueError as exc:
            raise FlagError(f"bad --theta {ns.theta!r}") from exc
        if len(theta) != cfg.dim:
            raise FlagError(f"--theta needs {cfg.dim} entries")
    engine = MomentEngine(cfg.weight())
    try:
        value = engine.monomial_moment(index, theta)
    except ValueError as exc:
        raise FlagError(str(exc)) from exc
    return f"{_num(value)}\n", EXIT_OK


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


HANDLERS = {"verify": _verify, "basis": _basis, "converge": _converge, "sharpness": _sharpness,
            "moments": _moments}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        cfg = _config(ns)
        text, code = HANDLERS[cfg.subcommand](cfg, ns)
    except FlagError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BasisRankError as exc:
        print(f"error: numerical rank failure at degree {exc.degree}: {exc}", file=sys.stderr)
        return EXIT_RANK
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
