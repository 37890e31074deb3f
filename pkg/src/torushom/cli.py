"""torushom command line: patterns, lk, zformula, brute, verify, kbounded, qcolor."""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import formulas
from .cluster_engine import HARD_MAX_K, L_k
from .exp_poly import ExpPoly, eval_float, render, to_json
from .graph_model import (GraphFormatError, NoPatternError, NotDominantError, Pattern,
                          WeightedGraph, complete_graph, delta, dominant_patterns, load_graph)
from .kbounded import MAX_N, count_via_hom, enumerate_bk
from .torus_oracle import (DEFAULT_ALPHA, CapExceeded, TorusSpec, partition_function,
                           partition_function_transfer, verify_tilde_identity)


class UsageError(ValueError):
    pass


def _fs(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph: str | None = None
    m: int = 2
    n: int | None = None
    k: int = 2
    q: int | None = None
    alpha: Fraction = DEFAULT_ALPHA
    pattern: str = "all"
    fmt: str = "text"
    rel_tol: float = 1e-12
    threads: int = 1
    unsafe_cap: bool = False
    exact: bool = False

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise UsageError(f"--m must be an even integer >= 2, got {self.m}")
        if not 1 <= self.k <= HARD_MAX_K:
            raise UsageError(f"--k must be in 1..{HARD_MAX_K}, got {self.k}")
        if not 0 < self.alpha < 1:
            raise UsageError(f"--alpha must lie in (0,1), got {self.alpha}")
        if self.n is not None and self.n < 0:
            raise UsageError("--n must be non-negative")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.rel_tol <= 0:
            raise UsageError("--rel-tol must be positive")

    def load(self) -> WeightedGraph:
        if self.graph is None:
            raise UsageError("--graph is required")
        path = Path(self.graph)
        try:
            text = path.read_text()
        except OSError as e:
            raise UsageError(f"{self.graph}: cannot read graph file ({e.strerror})") from None
        return load_graph(text, source=str(path))

    def need_n(self) -> int:
        if self.n is None:
            raise UsageError("--n is required")
        return self.n


# output helpers

class Report:
    """Lines for text mode, a dict for JSON mode, and an overall pass flag."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lines: list[str] = []
        self.data: dict = {"command": cfg.command}
        self.ok = True

    def line(self, s: str = ""):
        self.lines.append(s)

    def check(self, name: str, passed: bool, detail: str = ""):
        self.ok &= passed
        self.data.setdefault("checks", {})[name] = "PASS" if passed else "FAIL"
        self.line(f"{name}: {'PASS' if passed else 'FAIL'}{(' ' + detail) if detail else ''}")

    def emit(self, out) -> int:
        if self.cfg.fmt == "json":
            self.data["ok"] = self.ok
            out.write(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        else:
            out.write("\n".join(self.lines) + "\n")
        return 0 if self.ok else 1


def _select(G: WeightedGraph, sel: str) -> list[tuple[Pattern, int]]:
    """(pattern, multiplicity) pairs; 'all' gives one representative per symmetry class."""
    D = dominant_patterns(G)
    if sel == "all":
        return [(orbit[0], len(orbit)) for orbit in formulas.pattern_classes(G, D.patterns)]
    try:
        i = int(sel)
    except ValueError:
        raise UsageError(f"--pattern must be an integer or 'all', got {sel!r}") from None
    if not 1 <= i <= len(D):
        raise UsageError(f"--pattern {i} out of range 1..{len(D)}")
    return [(D.patterns[i - 1], 1)]


def _lk_job(args):
    G, P, m, j = args
    return L_k(G, P, m, j)


def _compute_lk(cfg: RunConfig, G: WeightedGraph, picks) -> list[list[ExpPoly]]:
    jobs = [(G, P, cfg.m, j) for P, _ in picks for j in range(1, cfg.k + 1)]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            flat = list(ex.map(_lk_job, jobs))
    else:
        flat = [_lk_job(a) for a in jobs]
    return [flat[i * cfg.k:(i + 1) * cfg.k] for i in range(len(picks))]


# subcommands

def cmd_patterns(cfg: RunConfig) -> Report:
    G = cfg.load()
    D = dominant_patterns(G)
    r = Report(cfg)
    r.line(f"eta = {_fs(D.eta)}")
    r.line(f"{len(D)} dominant patterns")
    rows = []
    for P in D.patterns:
        dl = delta(G, P)
        r.line(f"  {P.label()}  delta = {_fs(dl)}")
        rows.append({"pattern": P.label(), "delta": _fs(dl)})
    r.data.update(eta=_fs(D.eta), count=len(D), patterns=rows)
    return r


def cmd_lk(cfg: RunConfig) -> Report:
    G = cfg.load()
    picks = _select(G, cfg.pattern)
    results = _compute_lk(cfg, G, picks)
    r = Report(cfg)
    r.data.update(m=cfg.m, k=cfg.k, classes=[])
    for (P, mult), Ls in zip(picks, results):
        r.line(f"pattern {P.label()} (multiplicity {mult})")
        entry = {"pattern": P.label(), "multiplicity": mult, "L": {}}
        for j, L in enumerate(Ls, start=1):
            r.line(f"  L{j} = {render(L)}")
            entry["L"][str(j)] = to_json(L)
            if cfg.n is not None:
                fv = eval_float(L, cfg.n, cfg.rel_tol)
                r.line(f"     at n={cfg.n}: {fv.value!r} (rel err <= {fv.rel_err:.1e})")
                entry.setdefault("at_n", {})[str(j)] = repr(fv.value)
        r.data["classes"].append(entry)
    return r


def cmd_zformula(cfg: RunConfig) -> Report:
    G = cfg.load()
    zf = formulas.z_formula(G, cfg.m, cfg.k)
    dps = max(15, math.ceil(-math.log10(cfg.rel_tol)) + 2)
    r = Report(cfg)
    r.data.update(zf.to_json(cfg.n, dps))
    r.line(f"eta = {_fs(zf.eta)}, {zf.pattern_count} patterns, terms L1..L{cfg.k - 1}")
    for P, mult, expo in zf.classes:
        r.line(f"  {mult} x {P.label()}: exponent = {render(expo)}")
    r.line(f"truncation heuristic (unit constant): {render(zf.heuristic)}")
    if cfg.n is not None:
        r.line(f"ln Z~ at n={cfg.n}: {r.data['ln_Z_at_n']}")
    return r


def cmd_brute(cfg: RunConfig) -> Report:
    G = cfg.load()
    n = cfg.need_n()
    Z = partition_function(TorusSpec(cfg.m, n), G, unsafe_cap=cfg.unsafe_cap)
    r = Report(cfg)
    r.line(f"Z = {Z}")
    r.data.update(m=cfg.m, n=n, Z=_fs(Z))
    if n == 1:
        r.check("transfer-matrix", partition_function_transfer(cfg.m, G) == Z)
    return r


def cmd_verify(cfg: RunConfig) -> Report:
    G = cfg.load()
    T = TorusSpec(cfg.m, cfg.need_n())
    rep = verify_tilde_identity(T, G, cfg.alpha, unsafe_cap=cfg.unsafe_cap, with_tv=True)
    r = Report(cfg)
    r.data.update(rep.to_json())
    r.line(f"Z = {rep.Z}")
    r.line(f"Z~ = {rep.Z_tilde}")
    r.line(f"sum p_f w(f) = {rep.Z_tilde_from_capture}")
    r.line(f"TV(mu, mu_hat) = {rep.tv}")
    r.check("tilde-identity", rep.passed, "(exact)")
    return r


def cmd_kbounded(cfg: RunConfig) -> Report:
    r = Report(cfg)
    r.data["k"] = cfg.k
    if cfg.exact:
        n = cfg.need_n()
        if n > MAX_N:
            raise UsageError(f"--exact needs n <= {MAX_N}")
        count = enumerate_bk(n, cfg.k)
        r.line(str(count))
        r.data.update(n=n, count=count)
        via = count_via_hom(n, cfg.k, unsafe_cap=cfg.unsafe_cap)
        r.check("hom-count", via == count, f"(|Hom_0(Q_n, C({4 * cfg.k + 1}; S_k))| = {via})")
        return r
    a = formulas.kbounded_asymptotic(cfg.k)
    r.line(f"|B_{cfg.k}(n)| ~ {a.prefactor} * {a.lattice_base}^(2^(n-1)) * exp({render(a.exponent)})")
    r.data.update(prefactor=a.prefactor, lattice_base=a.lattice_base, exponent=to_json(a.exponent))
    if cfg.n is not None:
        val = str(a.log_value(cfg.n))
        r.line(f"log |B_{cfg.k}({cfg.n})| ~ {val}")
        r.data["log_at_n"] = val
    return r


def cmd_qcolor(cfg: RunConfig) -> Report:
    q = cfg.q
    if q is None or q < 3:
        raise UsageError("--q >= 3 is required")
    if cfg.m != 2:
        raise UsageError("qcolor compares the m = 2 closed forms")
    G = complete_graph(q)
    P = dominant_patterns(G).patterns[0]
    r = Report(cfg)
    r.data["q"] = q
    L1 = L_k(G, P, 2, 1)
    r.line(f"engine L1 = {render(L1)}")
    r.check("L1 vs f(n)", L1 == formulas.qcolor_f(q))
    r.data["L1"] = to_json(L1)
    if q >= 4:
        L2 = L_k(G, P, 2, 2)
        r.line(f"engine L2 = {render(L2)}")
        r.check("L2 vs closed form", L2 == formulas.qcolor_L2(q))
        r.data["L2"] = to_json(L2)
    lead = {}
    for k in range(1, cfg.k + 1):
        base = formulas.qcolor_leading_base(q, 2, k)
        got = (L1 if k == 1 else L_k(G, P, 2, k)).coeff(2 * k - 2, base)
        want = formulas.qcolor_ck(q, 2, k)
        tag = "agree" if got == want else "differ"
        r.line(f"leading coeff k={k}: engine {_fs(got)}, c_k formula {_fs(want)} ({tag})")
        lead[str(k)] = {"engine": _fs(got), "formula": _fs(want)}
    r.data["leading"] = lead
    if q == 5:
        c = L1.coeff(0, Fraction(4, 3))
        supported = {Fraction(3, 4): "(4/3)^(n-1)", Fraction(1): "(4/3)^n"}.get(c, "neither")
        r.line(f"q=5 exponent: engine supports {supported} + 1/3")
        r.data["q5_exponent"] = supported
    return r


COMMANDS = {
    "patterns": cmd_patterns,
    "lk": cmd_lk,
    "zformula": cmd_zformula,
    "brute": cmd_brute,
    "verify": cmd_verify,
    "kbounded": cmd_kbounded,
    "qcolor": cmd_qcolor,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torushom", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph file (q / lambda / edge lines)")
    common.add_argument("--m", type=int, default=2, help="even torus side length")
    common.add_argument("--n", type=int, help="dimension for evaluation and oracles")
    common.add_argument("--k", type=int, default=2, help="cluster order / k-bounded parameter")
    common.add_argument("--q", type=int, help="number of colours (qcolor)")
    common.add_argument("--alpha", type=Fraction, default=DEFAULT_ALPHA, help="polymer cutoff P/Q")
    common.add_argument("--pattern", default="all", help="1-based pattern index or 'all'")
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    common.add_argument("--rel-tol", type=float, default=1e-12)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--unsafe-cap", action="store_true", help="lift brute-force size caps")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "kbounded":
            sp.add_argument("--exact", action="store_true", help="enumerate instead of asymptotics")
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(command=args.command, graph=args.graph, m=args.m, n=args.n, k=args.k,
                        q=args.q, alpha=args.alpha, pattern=args.pattern, fmt=args.fmt,
                        rel_tol=args.rel_tol, threads=args.threads,
                        unsafe_cap=args.unsafe_cap, exact=getattr(args, "exact", False))
        return COMMANDS[args.command](cfg).emit(out)
    except (UsageError, GraphFormatError, NoPatternError, NotDominantError, CapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
