from __future__ import annotations

import argparse
import cmath
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

# --- Load local overrides before settings are read ---
from dotenv import load_dotenv
load_dotenv("config/secrets.env")
# -----------------------------------------------------

import pandas as pd

from config import settings
from src.algebra.fg_matrices import left_matrix, right_matrix, verify_diagonal_entries
from src.algebra.quantum_torus import TorusElement, build_quiver, build_triangle
from src.algebra.scalars import LaurentScalar, RingContext, in_bad_set
from src.logic.annulus_trace import (
    build_annulus,
    degenerate_ranks,
    highest_degree_report,
    independence_check,
    trace_basis_web,
    trace_monomial,
    trace_simple_loop,
    verify_peeling,
)
from src.logic.biangle_counit import verify_symmetric_sum, verify_zero_detection
from src.logic.braid_reduction import (
    BraidReducer,
    BraidWord,
    basis_web_prefactor,
    check_classical_limit,
    check_confluence,
    check_skein_consistency,
    evaluate_at_roots_of_unity,
    p_i,
    random_braid,
    root_report,
    verify_p_closed_form,
)
from src.logic.tropical_fan import (
    annulus_fan_points,
    decompose,
    fan_membership,
    glued_pairs,
    hilbert_basis,
    rhombus,
    tropical_t,
    verify_t_inverse,
)
from src.utils.constants_table import load_counit_constants, load_skein_constants
from src.utils.logger import setup_logger
from src.utils.serialization import dumps, envelope, to_jsonable, triangle_function_from_json

logger = setup_logger("annulus_runner")


@dataclass(frozen=True)
class RunConfig:
    n: int
    command: str
    params: dict = field(default_factory=dict)
    constants: str | None = None
    skein: str | None = None
    output: str | None = None
    pretty: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.jobs < 1:
            raise ValueError(f"--jobs must be >= 1, got {self.jobs}")


# ==============================================================================
# COMMANDS
# ==============================================================================
def _parse_web(text: str, n: int) -> int:
    text = text.strip()
    if not text.upper().startswith("B") or not text[1:].isdigit():
        raise ValueError(f"--web expects Bk, got {text!r}")
    k = int(text[1:])
    if not 1 <= k <= n - 1:
        raise ValueError(f"web B{k} needs 1 <= k <= {n - 1}")
    return k


def _parse_powers(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"--powers expects comma-separated naturals, got {text!r}") from None


def cmd_qtrace(cfg: RunConfig) -> tuple[dict, bool]:
    ring = RingContext(cfg.n)
    ctx = build_annulus(cfg.n, load_counit_constants(ring, cfg.constants))
    p = cfg.params
    if p.get("loop"):
        report = trace_simple_loop(ctx)
        return {"loop": report}, bool(report.extras["all_coefficients_one"])
    if p.get("powers"):
        report = trace_monomial(ctx, _parse_powers(p["powers"]))
        return {"powers": p["powers"], "report": report}, bool(report.extras["additive"])
    k = _parse_web(p["web"], cfg.n)
    summary = highest_degree_report(ctx, k, p.get("method", "minors"))
    element = trace_basis_web(ctx, k, p.get("method", "minors"))
    return {"web": f"B{k}", "summary": summary, "element": element}, summary["ok"]


def cmd_independence(cfg: RunConfig) -> tuple[dict, bool]:
    ctx = build_annulus(cfg.n)
    report = independence_check(ctx, cfg.params.get("max_total", 4))
    return report, report["ok"]


def cmd_matrices(cfg: RunConfig) -> tuple[dict, bool]:
    side = cfg.params.get("side", "left")
    M = left_matrix(cfg.n) if side == "left" else right_matrix(cfg.n)
    return {"side": side, "matrix": M}, True


def cmd_fan(cfg: RunConfig) -> tuple[dict, bool]:
    n, p = cfg.n, cfg.params
    if p.get("hilbert"):
        bound = p.get("bound") or n * n
        report = hilbert_basis(n, bound)
        expected = {tropical_t(n, k, "R") for k in range(1, n)}
        ok = set(report.basis) == expected and report.decomposition_ok
        return {"hilbert": report, "matches_tropical": set(report.basis) == expected}, ok
    if p.get("check_point"):
        path = Path(p["check_point"])
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read triangle function {path}: {e}") from e
        f = triangle_function_from_json(doc)
        membership = fan_membership(f)
        r = rhombus(f)
        result = {
            "membership": membership,
            "rhombus": {"top": r.top, "bottom_left": r.bottom_left, "bottom_right": r.bottom_right},
        }
        if membership == "cone_C":
            result["decomposition"] = decompose(f)
        return result, True
    max_total = p.get("max_total", 2)
    points = annulus_fan_points(n, max_total)
    result = {
        "max_total": max_total,
        "count": len(points),
        "distinct": len({(pt.left, pt.right) for pt in points}) == len(points),
        "points": [{"m": pt.multiplicities, "left": pt.left, "right": pt.right} for pt in points],
    }
    if p.get("bound"):
        result["glued_pairs"] = len(glued_pairs(n, p["bound"]))
    return result, result["distinct"]


def cmd_reduce(cfg: RunConfig) -> tuple[dict, bool]:
    ring = RingContext(cfg.n)
    consts = load_skein_constants(ring, cfg.skein)
    braid = BraidWord.parse(cfg.params["strands"], cfg.params["word"])
    reducer = BraidReducer(ring, consts, cfg.params.get("strategy", "leftmost"))
    return {"braid": braid, "reduction": reducer.reduce(braid)}, True


def cmd_pbeta(cfg: RunConfig) -> tuple[dict, bool]:
    ring = RingContext(cfg.n)
    consts = load_skein_constants(ring, cfg.skein)
    i = cfg.params["i"]
    value = p_i(ring, i, consts)
    result = {"i": i, "p_i": value}
    ok = True
    if 1 <= i <= 4:
        closed = verify_p_closed_form(ring, i, consts, settings.NUMERIC_TOL, value)
        result["closed_form"] = {
            k: closed[k] for k in ("closed_form", "closed_form_match", "roots", "roots_in_bad_set", "bad_set_required", "root_error")
        }
        ok = closed["ok"]
    else:
        logger.warning(f"⚠️ No closed form is asserted for i={i}; reporting P_{i} and its roots only")
        result["roots"] = root_report(ring, value, settings.NUMERIC_TOL)
    if i <= cfg.n - 1:
        prefactor = basis_web_prefactor(ring, i)
        result["prefactor"] = prefactor
        result["leading_coefficient"] = prefactor * value
    evaluations = evaluate_at_roots_of_unity(ring, i, consts, value)
    result["evaluations"] = {str(x): v for x, v in evaluations.items()}
    return result, ok and all(v["ok"] for v in evaluations.values())


# ==============================================================================
# SELFTEST SUITES
# ==============================================================================
def _random_scalar(rng: random.Random) -> LaurentScalar:
    return LaurentScalar({rng.randint(-6, 6): rng.randint(-3, 3) for _ in range(rng.randint(1, 3))})


def _random_element(rng: random.Random, quiver, terms: int = 3) -> TorusElement:
    size = quiver.tri.size
    out = {}
    for _ in range(rng.randint(1, terms)):
        d = tuple(rng.randint(-2, 2) for _ in range(size))
        out[d] = LaurentScalar.monomial(rng.randint(-4, 4), rng.choice((-2, -1, 1, 2)))
    return TorusElement(quiver, out)


def suite_scalars(n: int) -> tuple[int, int]:
    rng = random.Random(settings.RANDOM_SEED + n)
    passed = 0
    for _ in range(settings.RING_AXIOM_CASES):
        a, b, c = (_random_scalar(rng) for _ in range(3))
        u = LaurentScalar.monomial(rng.randint(-5, 5), rng.choice((1, -1)))
        ok = (
            a + b == b + a
            and a * b == b * a
            and (a * b) * c == a * (b * c)
            and a * (b + c) == a * b + a * c
            and (a - a).is_zero
            and u * u.inverse() == 1
        )
        passed += ok
    return passed, settings.RING_AXIOM_CASES


def suite_torus(n: int) -> tuple[int, int]:
    rng = random.Random(settings.RANDOM_SEED + 10 * n)
    tri = build_triangle(n)
    quiver = build_quiver(tri)
    passed = 0
    for _ in range(settings.RANDOM_CASES):
        a, b, c = (_random_element(rng, quiver) for _ in range(3))
        d = tuple(rng.randint(-3, 3) for _ in range(tri.size))
        u, v = rng.choice(tri.vertices), rng.choice(tri.vertices)
        xu, xv = TorusElement.generator(quiver, u), TorusElement.generator(quiver, v)
        twist = LaurentScalar.monomial(2 * quiver(u, v))
        ok = (
            (a * b) * c == a * (b * c)
            and TorusElement(quiver, {d: 1}) * TorusElement(quiver, {tuple(-x for x in d): 1}) == TorusElement.one(quiver)
            and xu * xv == (xv * xu).scale(twist)
        )
        passed += ok
    return passed, settings.RANDOM_CASES


def suite_matrices(n: int) -> tuple[int, int]:
    items = verify_diagonal_entries(n)["items"]
    return sum(bool(item["ok"]) for item in items.values()), len(items)


def suite_counit(n: int) -> tuple[int, int]:
    ring = RingContext(n)
    consts = load_counit_constants(ring)
    checks = [verify_symmetric_sum(ring, n, k, consts) for k in range(1, n)]
    checks.append(verify_zero_detection(ring, n, consts))
    return sum(checks), len(checks)


def suite_trace(n: int) -> tuple[int, int]:
    ctx = build_annulus(n)
    checks = [independence_check(ctx, 4)["ok"]] if n <= 6 else []
    if n <= settings.SELFTEST_MAX_N:
        checks.extend(highest_degree_report(ctx, k)["ok"] for k in range(1, n))
        checks.append(bool(trace_simple_loop(ctx).extras["all_coefficients_one"]))
        if n <= 4:
            checks.append(verify_peeling(ctx)["ok"])
    return sum(checks), len(checks)


def suite_tropical(n: int) -> tuple[int, int]:
    checks = [verify_t_inverse(n)]
    for k in range(1, n):
        t = tropical_t(n, k, "R")
        r = rhombus(t)
        checks.append(
            all(v == (1 if i == k else 0) for (i, _), v in r.bottom_left.items())
            and all(v == 0 for v in r.top.values())
            and all(v == 0 for v in r.bottom_right.values())
        )
        checks.append(fan_membership(t) == "cone_C")
        checks.append(tropical_t(n, n - k, "L") == t)
    if n <= 5:
        report = hilbert_basis(n, n * n)
        checks.append(set(report.basis) == {tropical_t(n, k, "R") for k in range(1, n)} and report.decomposition_ok)
    checks.append(len(annulus_fan_points(n, 2)) > 0)
    return sum(bool(c) for c in checks), len(checks)


def suite_braids(n: int) -> tuple[int, int]:
    ring = RingContext(n)
    consts = load_skein_constants(ring)
    rng = random.Random(settings.RANDOM_SEED + 100 * n)
    braids = [
        random_braid(rng, m, settings.CONFLUENCE_MAX_LETTERS)
        for m in range(2, 6)
        for _ in range(settings.CONFLUENCE_BRAIDS)
    ]
    checks = [
        check_skein_consistency(ring, consts),
        not check_confluence(ring, consts, braids),
        not check_classical_limit(ring, consts, braids, settings.NUMERIC_TOL),
    ]
    values = {i: p_i(ring, i, consts) for i in range(1, 6)}
    for i in range(1, min(4, n - 1) + 1):
        checks.append(verify_p_closed_form(ring, i, consts, settings.NUMERIC_TOL, values[i])["ok"])
    for i, value in values.items():
        checks.append(all(v["ok"] for v in evaluate_at_roots_of_unity(ring, i, consts, value).values()))
    return sum(bool(c) for c in checks), len(checks)


def suite_degeneration(n: int) -> tuple[int, int]:
    """[k]![n-k]! vanishes at a primitive (2m)-th root q exactly when max(k, n-k) >= m."""
    if n > settings.SELFTEST_MAX_N:
        return 0, 0
    ctx = build_annulus(n)
    coefficients = {k: highest_degree_report(ctx, k)["coefficient"] for k in range(1, n)}
    checks = []
    for m in range(2, n):
        q = cmath.exp(1j * cmath.pi / m)
        if not in_bad_set(q, n, settings.NUMERIC_TOL):
            checks.append(False)
            continue
        predicted = [k for k in range(1, n) if max(k, n - k) >= m]
        checks.append(degenerate_ranks(ctx, q, settings.NUMERIC_TOL, coefficients) == predicted)
    return sum(checks), len(checks)


SUITES = {
    "scalars": suite_scalars,
    "torus": suite_torus,
    "matrices": suite_matrices,
    "counit": suite_counit,
    "trace": suite_trace,
    "tropical": suite_tropical,
    "braids": suite_braids,
    "degeneration": suite_degeneration,
}


def _run_suite(task: tuple[str, int]) -> dict:
    name, n = task
    passed, total = SUITES[name](n)
    return {"suite": name, "n": n, "passed": passed, "total": total, "ok": passed == total}


def cmd_selftest(cfg: RunConfig) -> tuple[dict, bool]:
    tasks = [(name, n) for n in range(2, cfg.n + 1) for name in SUITES]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_run_suite, tasks))
    else:
        rows = [_run_suite(t) for t in tasks]
    for row in rows:
        icon = "✅" if row["ok"] else "❌"
        logger.info(f"{icon} {row['suite']} n={row['n']}: {row['passed']}/{row['total']}")
    return {"suites": rows}, all(r["ok"] for r in rows)


COMMANDS = {
    "qtrace": cmd_qtrace,
    "independence": cmd_independence,
    "matrices": cmd_matrices,
    "fan": cmd_fan,
    "reduce": cmd_reduce,
    "pbeta": cmd_pbeta,
    "selftest": cmd_selftest,
}


# ==============================================================================
# ENTRY POINT
# ==============================================================================
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Annulus skein computations: quantum traces, tropical fans, braid reductions.")
    parser.add_argument("--constants", default=None, help="Co-unit constants table (JSON).")
    parser.add_argument("--skein", default=None, help="Skein constants table (JSON).")
    parser.add_argument("--output", default=None, help="Write JSON here instead of stdout.")
    parser.add_argument("--pretty", action="store_true", help="Print a table instead of JSON.")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes for selftest.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_n(p):
        p.add_argument("--n", type=int, default=settings.DEFAULT_N)
        return p

    q = with_n(sub.add_parser("qtrace", help="Quantum trace of a basis web, a monomial or the simple loop."))
    group = q.add_mutually_exclusive_group(required=True)
    group.add_argument("--web", help="Basis web, e.g. B1.")
    group.add_argument("--powers", help="Comma-separated powers m1,...,m_{n-1}.")
    group.add_argument("--loop", action="store_true")
    q.add_argument("--method", choices=("minors", "states"), default="minors")

    ind = with_n(sub.add_parser("independence", help="Injectivity of the tropical degree map."))
    ind.add_argument("--max-total", type=int, default=4)

    mat = with_n(sub.add_parser("matrices", help="Quantum left/right matrices."))
    mat.add_argument("--side", choices=("left", "right"), default="left")

    fan = with_n(sub.add_parser("fan", help="Knutson-Tao fan checks."))
    mode = fan.add_mutually_exclusive_group(required=True)
    mode.add_argument("--hilbert", action="store_true")
    mode.add_argument("--check-point", help="TriangleFunction JSON file.")
    mode.add_argument("--annulus", action="store_true")
    fan.add_argument("--bound", type=int, default=None)
    fan.add_argument("--max-total", type=int, default=2)

    red = with_n(sub.add_parser("reduce", help="Reduce a braid closure to gamma monomials."))
    red.add_argument("--strands", type=int, required=True)
    red.add_argument("--word", default="", help='Signed generator indices, e.g. "1 -2 1".')
    red.add_argument("--strategy", choices=("leftmost", "rightmost"), default="leftmost")

    pb = with_n(sub.add_parser("pbeta", help="P_i with closed-form and root reports."))
    pb.add_argument("--i", type=int, required=True)

    with_n(sub.add_parser("selftest", help="Run every verification suite for n <= N."))
    return parser


def parse_config(argv: list[str] | None) -> RunConfig:
    args = build_parser().parse_args(argv)
    common = {"n", "command", "constants", "skein", "output", "pretty", "jobs"}
    params = {k: v for k, v in vars(args).items() if k not in common}
    return RunConfig(
        n=args.n,
        command=args.command,
        params=params,
        constants=args.constants,
        skein=args.skein,
        output=args.output,
        pretty=args.pretty,
        jobs=args.jobs,
    )


def _pretty(command: str, result: dict) -> str:
    if command == "selftest":
        return pd.DataFrame(result["suites"]).to_string(index=False)
    flat = pd.json_normalize(to_jsonable(result), max_level=1)
    return flat.T.to_string(header=False)


def run(cfg: RunConfig) -> int:
    logger.info(f"🚀 {cfg.command} n={cfg.n}")
    result, ok = COMMANDS[cfg.command](cfg)
    doc = envelope(cfg.command, cfg.n, result)
    doc["ok"] = bool(ok)
    text = _pretty(cfg.command, result) if cfg.pretty else dumps(doc)
    if cfg.output:
        Path(cfg.output).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.output).write_text(text + "\n", encoding="utf-8")
        logger.info(f"💾 Wrote {cfg.output}")
    else:
        sys.stdout.write(text + "\n")
    if not ok:
        logger.error(f"❌ {cfg.command} reported a failed verification")
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except ValueError as e:
        logger.error(f"❌ Invalid input: {e}")
        return 2
    try:
        return run(cfg)
    except ValueError as e:
        logger.error(f"❌ Invalid input: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
