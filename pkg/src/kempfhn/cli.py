"""Command-line front end.

Subcommands: project (cone projection of a raw (b, v) instance), hn,
kempf, verify, stabilize (instance JSON in), gen (instance JSON out) and
selftest.  All JSON output is deterministic: sorted keys, exact rational
strings, byte-identical reruns for identical input and flags.  Exit
codes: 0 success, 1 verification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import cone, hn, kempf, model
from .poly import (InputError, ModeMismatch, Poly, RationalFunction,
                   ScaleValue, poly_to_str)

SUBCOMMANDS = ("project", "hn", "kempf", "verify", "stabilize", "gen", "selftest")

#: module errors that mean "the input was bad", mapped to exit code 2
_INPUT_ERRORS = (
    InputError, ModeMismatch, model.WrongMode, model.TooLarge,
    cone.InvalidInstance, cone.ZeroGamma, cone.NotInCone,
    hn.NotUnique, hn.DegenerateQuotient,
    kempf.BadM, kempf.NonPositiveWeight, kempf.LengthMismatch,
    kempf.NonMonotoneEps, kempf.UniquenessViolated, kempf.NoStabilization,
    json.JSONDecodeError, OSError, ValueError,
)


@dataclass
class RunConfig:
    """One parsed invocation: exactly one subcommand plus its flags."""
    subcommand: str
    input: Optional[str] = None
    output: Optional[str] = None
    numeric: Optional[int] = None   # None means asymptotic mode
    csv: Optional[str] = None
    seed: Optional[int] = None
    parallel: bool = False
    use_float: bool = False
    degrees: Optional[List[int]] = None
    mode: str = "gieseker"
    delta: Optional[str] = None
    phi_on: Optional[int] = None
    dim_x: int = 1

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        if self.numeric is not None and self.numeric < 1:
            raise InputError("--numeric needs M >= 1")


# -- rendering helpers ------------------------------------------------------


def _rat(x) -> str:
    return str(Fraction(x))


def _scalar_json(x):
    """A Fraction becomes "p/q"; a RationalFunction becomes coefficient
    arrays (lowest degree first)."""
    if isinstance(x, RationalFunction):
        return x.to_json()
    return _rat(x)


def _mu2_json(value: ScaleValue) -> dict:
    """Squared Kempf value in the common {"num": [...], "den": [...]}
    shape for both modes (numeric values are degree-0 arrays)."""
    if value.mode == "numeric":
        num = [] if value.mag2 == 0 else [str(value.mag2.numerator)]
        return {"num": num, "den": [str(value.mag2.denominator)]}
    return value.mag2.to_json()


def _csv_cell(x) -> str:
    if isinstance(x, RationalFunction):
        if x.den == Poly((1,)):
            return poly_to_str(x.num)
        return f"({poly_to_str(x.num)})/({poly_to_str(x.den)})"
    if isinstance(x, Poly):
        return poly_to_str(x)
    return _rat(x)


def _graph_csv_lines(graph: cone.GraphData, b, use_float: bool) -> List[str]:
    """Rows i = 0 .. t+1, one per segment endpoint; b_i and gamma_i are
    per-step quantities, so the origin row leaves them empty."""
    header = "i,b_i,w_i,w_tilde_i,gamma_i"
    floaty = use_float and not isinstance(graph.points[0][1], RationalFunction)
    if floaty:
        header += ",w_i_float,gamma_i_float"
    lines = [header]
    for i, (x, w) in enumerate(graph.points):
        bi = _csv_cell(b[i - 1]) if i else ""
        gi = _csv_cell(graph.gamma[i - 1]) if i else ""
        row = f"{i},{bi},{_csv_cell(w)},{_csv_cell(graph.tilde[i])},{gi}"
        if floaty:
            wf = float(Fraction(w))
            gf = float(Fraction(graph.gamma[i - 1])) if i else ""
            row += f",{wf},{gf}"
        lines.append(row)
    return lines


def _write_text(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_json(cfg: RunConfig, obj):
    _write_text(cfg.output, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _load_instance(cfg: RunConfig):
    if cfg.input is None:
        raise InputError(f"{cfg.subcommand} needs an instance file")
    lat, params = model.lattice_from_json(_load_json(cfg.input))
    violations = model.validate_lattice(lat, params)
    if violations:
        lines = [f"{v.kind} at {', '.join(v.nodes) or '-'}: {v.message}"
                 for v in violations]
        raise InputError("invalid instance:\n  " + "\n  ".join(lines))
    return lat, params


# -- subcommands ------------------------------------------------------------


def _cmd_project(cfg: RunConfig) -> int:
    data = _load_json(cfg.input) if cfg.input else None
    if not isinstance(data, dict) or "b" not in data or "v" not in data:
        raise InputError('project needs JSON {"b": [...], "v": [...]}')
    b = [Fraction(str(x)) for x in data["b"]]
    v = [Fraction(str(x)) for x in data["v"]]
    inst = cone.ConeInstance(b, v)
    graph = cone.envelope_graph(inst)
    gamma = graph.gamma
    if all(g == 0 for g in gamma):
        mu2, sign = Fraction(0), "0"
    else:
        value = cone.mu_value(inst, gamma)
        mu2 = value.mag2
        sign = "+" if value.sign > 0 else "-" if value.sign < 0 else "0"
    out = {
        "gamma": [_rat(g) for g in gamma],
        "mu2": _rat(mu2),
        "sign": sign,
        "graph": [[_rat(b[i]), _rat(graph.points[i + 1][1]), _rat(graph.tilde[i + 1])]
                  for i in range(len(b))],
    }
    if cfg.use_float:
        out["gamma_float"] = [float(g) for g in gamma]
        out["mu2_float"] = float(mu2)
    if cfg.csv:
        _write_text(cfg.csv, "\n".join(_graph_csv_lines(graph, b, cfg.use_float)) + "\n")
    _emit_json(cfg, out)
    return 0


def _quotient_json(q: model.ObjectData, params: model.StabilityParams) -> dict:
    reduced = model.effective_polynomial(q, params) * Fraction(1, q.rank)
    return {
        "rank": q.rank,
        "poly": q.hilbert.to_json(),
        "eps": q.eps,
        "reduced": poly_to_str(reduced),
    }


def _cmd_hn(cfg: RunConfig) -> int:
    lat, params = _load_instance(cfg)
    f = hn.hn_filtration(lat, params)
    quotients = []
    base = None
    for nid in f.chain:
        quotients.append(_quotient_json(hn.quotient_data(lat, params, base, nid), params))
        base = nid
    _emit_json(cfg, {"chain": list(f.chain), "quotients": quotients})
    return 0


def _cmd_kempf(cfg: RunConfig) -> int:
    lat, params = _load_instance(cfg)
    mode = "numeric" if cfg.numeric is not None else "asymptotic"
    result = kempf.kempf_filtration(lat, params, mode=mode, m=cfg.numeric,
                                    parallel=cfg.parallel)
    wf = result.filtration
    out = {
        "verdict": result.verdict,
        "chain": list(wf.chain.chain),
        "gamma": [_scalar_json(g) for g in wf.gamma],
        "weights": [_scalar_json(w) for w in wf.weights],
        "mu2": _mu2_json(result.value),
        "graph_csv": cfg.csv,
    }
    if cfg.use_float and mode == "numeric":
        out["gamma_float"] = [float(g) for g in wf.gamma]
        out["mu2_float"] = float(result.value.mag2)
    if cfg.csv:
        if result.verdict == "unstable":
            inst = kempf.chain_vector(wf.chain, lat, params, mode=mode, m=cfg.numeric)
            graph = cone.envelope_graph(inst)
            lines = _graph_csv_lines(graph, inst.b, cfg.use_float)
        else:
            lines = ["i,b_i,w_i,w_tilde_i,gamma_i"]
        _write_text(cfg.csv, "\n".join(lines) + "\n")
    _emit_json(cfg, out)
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    lat, params = _load_instance(cfg)
    report = kempf.verify_equality(lat, params, parallel=cfg.parallel)
    _emit_json(cfg, {
        "equal": report.equal,
        "hn": list(report.hn_chain),
        "kempf": list(report.kempf_chain),
        "properties": report.properties,
    })
    return 0 if report.equal else 1


def _cmd_stabilize(cfg: RunConfig) -> int:
    lat, params = _load_instance(cfg)
    m_star = kempf.stabilization_check(lat, params, m_start=cfg.numeric or 1)
    _emit_json(cfg, {"m_star": m_star})
    return 0


def _parse_delta(text: Optional[str]) -> Optional[Poly]:
    if text is None:
        return None
    return Poly.from_json([c.strip() for c in text.split(",")])


def _cmd_gen(cfg: RunConfig) -> int:
    params = model.StabilityParams(mode=cfg.mode, dim_x=cfg.dim_x,
                                   delta=_parse_delta(cfg.delta))
    if (cfg.degrees is None) == (cfg.seed is None):
        raise InputError("gen needs exactly one of --degrees or --seed")
    if cfg.degrees is not None:
        phi_on = cfg.phi_on
        if params.mode == "pair" and phi_on is None:
            phi_on = 0
        lat = model.gen_split_bundle(cfg.degrees, params, phi_on=phi_on)
    else:
        lat = model.gen_random_lattice(cfg.seed, params)
    data = model.lattice_to_json(lat, params)
    relat, reparams = model.lattice_from_json(data)
    violations = model.validate_lattice(relat, reparams)
    if violations:
        raise InputError(f"generated instance fails validation: {violations}")
    _emit_json(cfg, data)
    return 0


def _cmd_selftest(cfg: RunConfig) -> int:
    rows = []
    failures = 0
    seed = cfg.seed if cfg.seed is not None else 0

    import random
    rng = random.Random(seed)
    total, bad = 200, 0
    for _ in range(total):
        t1 = rng.randint(2, 8)  # one entry cannot balance to nonzero v
        while True:
            b = [Fraction(rng.randint(1, 20), rng.randint(1, 20)) for _ in range(t1)]
            raw = [Fraction(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(t1)]
            shift = sum(bi * vi for bi, vi in zip(b, raw)) / sum(b)
            v = [vi - shift for vi in raw]
            if any(v):
                break
        inst = cone.ConeInstance(b, v)
        direction = cone.kempf_direction(inst)
        gamma = direction.gamma if direction else (Fraction(0),) * t1
        if tuple(cone.project_monotone(b, v)) != tuple(gamma):
            bad += 1
        elif not cone.separation_certificate(inst, gamma):
            bad += 1
    rows.append(("cone projection vs PAVA", total, bad))
    failures += bad

    def sweep(label, cases):
        nonlocal failures
        total, bad = 0, 0
        for lat, params in cases:
            total += 1
            report = kempf.verify_equality(lat, params)
            if not (report.equal and all(report.properties.values())):
                bad += 1
        rows.append((label, total, bad))
        failures += bad

    def split_cases(mode):
        from itertools import combinations_with_replacement
        params = model.StabilityParams(mode=mode)
        for size in (1, 2, 3):
            for degs in combinations_with_replacement(range(-2, 3), size):
                yield model.gen_split_bundle(list(degs), params), params

    sweep("split bundles, gieseker", split_cases("gieseker"))
    sweep("split bundles, slope", split_cases("slope"))

    def pair_cases():
        from itertools import combinations_with_replacement
        for dval in (Fraction(1, 2), Fraction(1), Fraction(4)):
            params = model.StabilityParams(mode="pair", delta=Poly([dval]))
            for size in (1, 2):
                for degs in combinations_with_replacement(range(-2, 3), size):
                    for phi in range(size):
                        yield model.gen_split_bundle(list(degs), params,
                                                     phi_on=phi), params

    sweep("split pairs, three deltas", pair_cases())

    width = max(len(r[0]) for r in rows)
    lines = [f"{'check'.ljust(width)}  cases  failed  result"]
    for label, total, bad in rows:
        verdict = "PASS" if bad == 0 else "FAIL"
        lines.append(f"{label.ljust(width)}  {total:5d}  {bad:6d}  {verdict}")
    lines.append("selftest: " + ("PASS" if failures == 0 else "FAIL"))
    _write_text(cfg.output, "\n".join(lines) + "\n")
    return 0 if failures == 0 else 1


_DISPATCH = {
    "project": _cmd_project,
    "hn": _cmd_hn,
    "kempf": _cmd_kempf,
    "verify": _cmd_verify,
    "stabilize": _cmd_stabilize,
    "gen": _cmd_gen,
    "selftest": _cmd_selftest,
}


def run(config: RunConfig) -> int:
    """Execute one configured invocation; returns the process exit code."""
    try:
        return _DISPATCH[config.subcommand](config)
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


# -- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kempfhn",
        description="Kempf and Harder-Narasimhan filtrations of finite "
                    "subobject lattices, with exact arithmetic.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, with_input=True, with_mode=False):
        if with_input:
            p.add_argument("input", help="instance JSON file ('-' for stdin)")
        p.add_argument("-o", "--output", default=None,
                       help="output path (default: stdout)")
        if with_mode:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--numeric", type=int, metavar="M", default=None,
                           help="evaluate dimensions at the integer m = M")
            g.add_argument("--asymptotic", action="store_true",
                           help="work with polynomials in m (default)")
        p.add_argument("--csv", default=None, metavar="PATH",
                       help="also write the graph as CSV")
        p.add_argument("--parallel", action="store_true",
                       help="evaluate chains in parallel (same output)")
        p.add_argument("--float", dest="use_float", action="store_true",
                       help="add labeled decimal approximations")

    common(sub.add_parser("project", help="project a raw (b, v) cone instance"))
    common(sub.add_parser("hn", help="Harder-Narasimhan filtration"))
    common(sub.add_parser("kempf", help="maximal Kempf filtration"), with_mode=True)
    common(sub.add_parser("verify", help="check that HN and Kempf coincide"))
    p = sub.add_parser("stabilize", help="least m where numeric matches asymptotic")
    common(p, with_mode=True)

    g = sub.add_parser("gen", help="emit a split-bundle or random instance")
    g.add_argument("--degrees", default=None,
                   help="comma-separated summand degrees, e.g. 2,0,-1")
    g.add_argument("--seed", type=int, default=None,
                   help="seed for a random valid instance")
    g.add_argument("--mode", default="gieseker", choices=model.MODES)
    g.add_argument("--delta", default=None,
                   help="pair parameter: comma-separated coefficients, "
                        "lowest degree first")
    g.add_argument("--phi-on", dest="phi_on", type=int, default=None,
                   help="index of the summand carrying the pair morphism")
    g.add_argument("-o", "--output", default=None)

    s = sub.add_parser("selftest", help="run the built-in generator sweeps")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default=None)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    degrees = None
    if getattr(args, "degrees", None) is not None:
        try:
            degrees = [int(d) for d in str(args.degrees).split(",")]
        except ValueError as exc:
            raise InputError(f"bad --degrees value {args.degrees!r}") from exc
    if getattr(args, "numeric", None) is not None and args.numeric < 1:
        raise InputError("--numeric needs M >= 1")
    return RunConfig(
        subcommand=args.subcommand,
        input=getattr(args, "input", None),
        output=getattr(args, "output", None),
        numeric=getattr(args, "numeric", None),
        csv=getattr(args, "csv", None),
        seed=getattr(args, "seed", None),
        parallel=getattr(args, "parallel", False),
        use_float=getattr(args, "use_float", False),
        degrees=degrees,
        mode=getattr(args, "mode", "gieseker"),
        delta=getattr(args, "delta", None),
        phi_on=getattr(args, "phi_on", None),
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
