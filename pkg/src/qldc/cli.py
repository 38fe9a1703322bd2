"""Scenario runner: reproducible experiments with JSON/CSV reports.

A scenario config is ``{"scenario": name, "params": {...}, "seed": int,
"assertions": [check-name prefixes]}``.  Exit status is 0 when every asserted
check passes, 1 when one fails and 2 when the config is malformed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

import jsonschema
import numpy as np

from . import bounds, cdec, codes, pir, qdec, rac

__all__ = ["CONFIG_SCHEMA", "SCENARIOS", "Check", "run_scenario", "render_report", "emit_bound_table", "main"]

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["scenario"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "params": {"type": "object"},
        "seed": {"type": "integer"},
        "assertions": {"type": "array", "items": {"type": "string"}},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"json": {"type": "string"}, "csv": {"type": "string"}},
        },
    },
}


@dataclass(frozen=True)
class Check:
    name: str
    lhs: object
    rhs: object
    relation: str
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        lhs, rhs = self.lhs, self.rhs
        if self.relation == "==":
            if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
                return lhs == rhs
            return abs(float(lhs) - float(rhs)) <= self.tol
        if self.relation == "<=":
            return lhs <= rhs if self.tol == 0 else float(lhs) <= float(rhs) + self.tol
        if self.relation == ">=":
            return lhs >= rhs if self.tol == 0 else float(lhs) >= float(rhs) - self.tol
        raise ValueError(f"unknown relation {self.relation!r}")


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v))


# ----------------------------------------------------------------------------
# scenarios: each returns (descriptions of the claims exercised, checks, extra tables)


def _gadget(params, seed):
    checks = []
    for f in product((0, 1), repeat=4):
        for a in product((0, 1), repeat=2):
            want = f[(a[0] << 1) | a[1]]
            p = qdec.run_gadget(f, a)[want]
            checks.append(Check(f"f={''.join(map(str, f))} a={a[0]}{a[1]}", p, Fraction(11, 14), "=="))
    return ["one-query gadget: f(a) recovered with probability exactly 11/14"], checks, {}


def _xor_gadget(params, seed):
    checks = []
    for a in product((0, 1), repeat=2):
        p0, p1 = qdec.xor_gadget_distribution(*a)
        checks.append(Check(f"a={a[0]}{a[1]}", p1 if a[0] ^ a[1] else p0, Fraction(1), "=="))
    return ["XOR gadget: a1 xor a2 from one query with certainty"], checks, {}


def _hadamard_ldc(params, seed):
    n = params.get("n", 8)
    count = params.get("patterns", 100)
    flips = params.get("flips", 25)
    samples = params.get("messages", 4)
    code = codes.hadamard_code(n)
    dec = cdec.hadamard_two_query_decoder(n)
    delta = Fraction(flips, code.m)
    rng = np.random.default_rng(seed)
    checks = []
    for p in range(count):
        spec = codes.CorruptionSpec(flips / code.m, seed=int(rng.integers(1 << 31)))
        worst = Fraction(1)
        for _ in range(samples):
            x = tuple(int(b) for b in rng.integers(0, 2, n))
            y = codes.corrupt(code(x), spec)
            worst = min(worst, min(cdec.evaluate_two_query(dec, y, x, i) for i in range(n)))
        checks.append(Check(f"pattern {p}: min success", worst, 1 - 2 * delta, ">="))
    return ["Hadamard code 2-query decoder: success at least 1 - 2 delta"], checks, {}


def _compiler_identity(params, seed):
    ns = params.get("n", [3, 4])
    deltas = [_frac(d) for d in params.get("deltas", ["0", "1/16", "1/8"])]
    count = params.get("patterns", 20)
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        code = codes.hadamard_code(n)
        dec = cdec.hadamard_two_query_decoder(n)
        qd = qdec.compile_2ldc_to_1lqdc(dec)
        for delta in deltas:
            for p in range(count):
                spec = codes.CorruptionSpec(float(delta), seed=int(rng.integers(1 << 31)))
                gap = Fraction(0)
                for x in codes.all_messages(n):
                    y = codes.corrupt(code(x), spec)
                    for i in range(n):
                        c = cdec.evaluate_two_query(dec, y, x, i)
                        q = qdec.evaluate_lqdc(qd, y, x, i)
                        gap = max(gap, abs(q - (Fraction(3, 14) + Fraction(4, 7) * c)))
                checks.append(Check(f"n={n} delta={delta} pattern {p}: max |q - (3/14 + 4c/7)|", gap, Fraction(0), "=="))
    return ["compiled one-query decoder: quantum success = 3/14 + (4/7) classical success"], checks, {}


def _xor_lqdc(n):
    code = codes.hadamard_code(n)
    qd = qdec.compile_xor_ldc_to_lqdc(cdec.hadamard_two_query_decoder(n))
    return code, qd


def _rac_recovery(params, seed):
    n = params.get("n", 3)
    delta = _frac(params.get("delta", "1/8"))
    modes = params.get("modes", [rac.STANDARD, rac.IMPROVED])
    code, qd = _xor_lqdc(n)
    eps = cdec.certify_epsilon(code, lambda y, x, i: qdec.evaluate_lqdc(qd, y, x, i), delta)
    checks = [Check("certified eps > 0", eps, Fraction(0), ">=")]
    for mode in modes:
        factor = Fraction(1, 2) if mode == rac.STANDARD else Fraction(3, 4)
        for i in range(n):
            res = rac.rac_recover_bit(code, qd, i, delta, mode, eps)
            checks.append(Check(f"{mode} i={i}: worst recovery >= bound", res.worst, res.bound, ">=", 1e-12))
            expect = float(factor * delta * res.split.a_sq)
            gap = max(abs(v - expect) for v in res.extraction_probability.values())
            checks.append(Check(f"{mode} i={i}: extraction probability", gap, 0.0, "<=", 1e-12))
    return ["one-query decoder to random access code: recovery 1/2 + delta eps/4 (3 delta eps/8 improved)"], checks, {}


def _ledger_checks(ledger, prefix=""):
    return [Check(prefix + q.name, q.lhs, q.rhs, q.relation, q.tol) for q in ledger.inequalities]


def _nayak_ledger(params, seed):
    n = params.get("n", 4)
    delta = _frac(params.get("delta", "1/8"))
    mode = params.get("mode", rac.IMPROVED)
    code, qd = _xor_lqdc(n)
    enc = [rac.build_uniform_state(code, x).state for x in codes.all_messages(n)]
    p = [rac.rac_recover_bit(code, qd, i, delta, mode).worst for i in range(n)]
    ledger = rac.nayak_audit(enc, p)
    return ["random access code entropy chain: (1 - H(p)) n <= qubits"], _ledger_checks(ledger), {"ledger": json.loads(ledger.to_json())}


def _pir(params, seed):
    family = params.get("family", "xor2")
    n = params.get("n", 4)
    scheme = pir.scheme_from_descriptor({"family": family, "n": n, "d": params.get("d", 2)})
    xs = list(codes.all_messages(n)) if n <= 8 else [tuple([0] * n), tuple([1] * n)]
    checks = []
    rec = min(pir.evaluate_pir(scheme, x, i) for x in xs for i in range(n))
    checks.append(Check("classical recovery", rec, Fraction(1, 2) + scheme.eps, ">="))
    checks.append(Check("classical privacy (TV)", pir.classical_privacy_audit(scheme).distance, Fraction(0), "=="))
    if scheme.k == 2:
        protocols = [(path, pir.reduce_2server_to_1quantum(scheme, path)) for path in params.get("paths", ["generic", "xor"])]
    else:
        protocols = [("paired", pir.reduce_2k_to_k_quantum(scheme))]
    for name, proto in protocols:
        for x in xs:
            for i in range(n):
                q = pir.evaluate_quantum_pir(proto, x, i)
                c = pir.evaluate_pir(scheme, x, i)
                want = Fraction(3, 14) + Fraction(4, 7) * c if name == "generic" else c
                if q != want:
                    checks.append(Check(f"{name}: recovery x={codes.bits_to_int(x)} i={i}", q, want, "=="))
                    break
        qmin = min(pir.evaluate_quantum_pir(proto, x, i) for x in xs for i in range(n))
        target = Fraction(11, 14) if name == "generic" else Fraction(1)
        checks.append(Check(f"{name}: quantum recovery ({proto.servers} servers)", qmin, target, "=="))
        dist = pir.quantum_privacy_audit(proto, xs[:2]).distance
        checks.append(Check(f"{name}: quantum privacy (trace distance)", dist, 0.0, "<=", 1e-10))
    return ["PIR to quantum PIR: 1 server recovers 1/2 + 4 eps/7, XOR schemes keep recovery, k/2 quantum servers"], checks, {}


def _pir_rac(params, seed):
    n = params.get("n", 3)
    scheme = pir.xor2_scheme(n)
    checks = []
    for path in params.get("paths", ["generic", "xor"]):
        res = pir.pir_to_rac(scheme, path)
        checks.append(Check(f"{path}: |psi_x> recovery vs protocol", res.max_recovery_gap, 0.0, "<=", 1e-10))
        checks.append(Check(f"{path}: lambda spread over i", res.lam_spread, 0.0, "<=", 1e-10))
        p = min(res.recovery.values())
        checks.append(Check(f"{path}: (1 - H(p)) n <= t + 2", (1 - bounds.binary_entropy(p)) * n, float(res.qubits), "<=", 1e-9))
        checks += _ledger_checks(res.ledger, f"{path}: ")
    report = bounds.check_instance("pir2_xor", {"n": n, "t": scheme.t, "eps": scheme.eps})
    checks.append(Check("pir2_xor: t >= (1 - H(1/2 + eps)) n - 1", float(scheme.t), report.bound, ">="))
    checks.append(Check("pir2_xor slack", report.slack, 1.0, "==", 1e-12))
    return ["PIR to random access code: t + 2 >= (1 - H(p)) n; perfect XOR PIR needs t >= n - 1"], checks, {}


def _bound_table(params, seed):
    grid = params.get("grid", {"formulas": ["ldc2", "ldc2_xor"], "eps": ["1/8", "1/4", "1/2"], "delta": ["1/4"]})
    text = emit_bound_table(grid)
    rows = list(csv.DictReader(io.StringIO(text)))
    checks = [Check(f"{r['formula']} eps={r['eps']} delta={r['delta']}: 0 <= c <= 1", float(r["c"]), 0.0, ">=") for r in rows]
    return ["closed-form lower bounds on code length and PIR communication"], checks, {"table": text}


SCENARIOS = {
    "gadget-exactness": _gadget,
    "xor-gadget": _xor_gadget,
    "hadamard-ldc": _hadamard_ldc,
    "compiler-identity": _compiler_identity,
    "rac-recovery": _rac_recovery,
    "nayak-ledger": _nayak_ledger,
    "pir": _pir,
    "pir-rac": _pir_rac,
    "bound-table": _bound_table,
}


def emit_bound_table(grid: dict) -> str:
    """One CSV row per (formula, n, delta, eps, ell) in the grid."""
    formulas = list(grid.get("formulas", ()))
    eps_values = [_frac(e) for e in grid.get("eps", ())]
    if not formulas or not eps_values:
        raise ValueError("bound grid needs at least one formula and one eps")
    deltas = [_frac(d) for d in grid.get("delta", ["1/4"])]
    ns = list(grid.get("n", [None]))
    ells = list(grid.get("ell", [1]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["formula", "n", "delta", "eps", "ell", "c", "bound"])
    for f, n, d, e, ell in product(formulas, ns, deltas, eps_values, ells):
        c = bounds.exponent_constant(f, d, e, ell)
        bound = "" if n is None else repr(bounds.bound_value(f, {"n": n, "delta": d, "eps": e, "ell": ell}))
        w.writerow([f, "" if n is None else n, str(d), str(e), ell, f"{c:.6f}", bound])
    return buf.getvalue()


# ----------------------------------------------------------------------------


class ConfigError(ValueError):
    pass


def _render_value(v, exact: bool):
    if isinstance(v, Fraction):
        return str(v) if exact else float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def run_scenario(config: dict, exact: bool = True) -> tuple[dict, int]:
    """Validate and execute one scenario; returns (report, exit status)."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ConfigError(err.message) from None
    name = config["scenario"]
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}")
    seed = config.get("seed", 0)
    try:
        refs, checks, extra = SCENARIOS[name](config.get("params", {}), seed)
    except (KeyError, TypeError) as err:
        raise ConfigError(f"bad params: {err}") from None
    prefixes = config.get("assertions", [""])
    asserted = [c for c in checks if any(c.name.startswith(p) for p in prefixes)]
    failed = [c for c in asserted if not c.passed]
    report = {
        "scenario": name,
        "claims": refs,
        "params": config.get("params", {}),
        "seed": seed,
        "checks": [
            {
                "name": c.name,
                "lhs": _render_value(c.lhs, exact),
                "rhs": _render_value(c.rhs, exact),
                "relation": c.relation,
                "pass": c.passed,
            }
            for c in checks
        ],
        "summary": {
            "total": len(checks),
            "passed": sum(c.passed for c in checks),
            "asserted": len(asserted),
            "failed": [c.name for c in failed],
        },
    }
    report.update(extra)
    return report, 1 if failed else 0


def render_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "name", "lhs", "relation", "rhs", "pass"])
    for c in report["checks"]:
        w.writerow([report["scenario"], c["name"], c["lhs"], c["relation"], c["rhs"], c["pass"]])
    return buf.getvalue()


def _config_from_args(args) -> dict:
    cmd = args.command
    params: dict = {}
    if cmd == "gadget":
        scenario = "xor-gadget" if args.xor else "gadget-exactness"
    elif cmd == "ldc":
        scenario = "hadamard-ldc"
        params = {"n": args.n, "patterns": args.patterns, "flips": args.flips, "messages": args.messages}
    elif cmd == "lqdc":
        scenario = "compiler-identity"
        params = {"n": args.n, "deltas": args.deltas, "patterns": args.patterns}
    elif cmd == "rac":
        scenario = "nayak-ledger" if args.ledger else "rac-recovery"
        params = {"n": args.n, "delta": args.delta}
        if not args.ledger:
            params["modes"] = args.modes
    elif cmd == "pir":
        scenario = "pir-rac" if args.rac else "pir"
        params = {"n": args.n} if args.rac else {"family": args.family, "n": args.n, "d": args.d}
    elif cmd == "bounds":
        scenario = "bound-table"
        grid = {"formulas": args.formulas, "eps": args.eps, "delta": args.delta, "ell": args.ell}
        if args.n:
            grid["n"] = args.n
        params = {"grid": grid}
    else:
        raise ConfigError(f"unknown command {cmd!r}")
    return {"scenario": scenario, "params": params, "seed": args.seed}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qldc", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, help="directory for <scenario>.json and <scenario>.csv")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    grp = ap.add_mutually_exclusive_group()
    grp.add_argument("--exact", dest="exact", action="store_true", default=True, help="rationals as p/q strings (default)")
    grp.add_argument("--float", dest="exact", action="store_false", help="rationals as floats")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario config file")
    p.add_argument("config", type=Path)

    p = sub.add_parser("gadget", help="one-query gadget exactness")
    p.add_argument("--xor", action="store_true", help="check the XOR gadget instead")

    p = sub.add_parser("ldc", help="Hadamard 2-query decoder under seeded corruption")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--patterns", type=int, default=100)
    p.add_argument("--flips", type=int, default=25)
    p.add_argument("--messages", type=int, default=4)

    p = sub.add_parser("lqdc", help="compiler identity for the one-query decoder")
    p.add_argument("--n", type=int, nargs="+", default=[3, 4])
    p.add_argument("--deltas", nargs="+", default=["0", "1/16", "1/8"])
    p.add_argument("--patterns", type=int, default=20)

    p = sub.add_parser("rac", help="random access code recovery or entropy ledger")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--delta", default="1/8")
    p.add_argument("--modes", nargs="+", default=[rac.STANDARD, rac.IMPROVED])
    p.add_argument("--ledger", action="store_true")

    p = sub.add_parser("pir", help="PIR schemes and their quantum reductions")
    p.add_argument("--family", choices=("xor2", "cube"), default="xor2")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--rac", action="store_true", help="extract the random access code (xor2 only)")

    p = sub.add_parser("bounds", help="bound table over a parameter grid")
    p.add_argument("--formulas", nargs="+", default=["ldc2", "ldc2_xor"])
    p.add_argument("--eps", nargs="+", default=["1/8", "1/4", "1/2"])
    p.add_argument("--delta", nargs="+", default=["1/4"])
    p.add_argument("--ell", type=int, nargs="+", default=[1])
    p.add_argument("--n", type=int, nargs="+")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            try:
                config = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as err:
                raise ConfigError(str(err)) from None
        else:
            config = _config_from_args(args)
        report, status = run_scenario(config, exact=args.exact)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    outputs = dict(config.get("output", {}))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        outputs.setdefault("json", str(args.out / f"{report['scenario']}.json"))
        outputs.setdefault("csv", str(args.out / f"{report['scenario']}.csv"))
    for fmt, path in outputs.items():
        Path(path).write_text(render_report(report, fmt))
    if "table" in report and args.format == "csv":
        sys.stdout.write(report["table"])
    else:
        sys.stdout.write(render_report(report, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
