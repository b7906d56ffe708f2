"""Brute-force ground truth over small finite fields.

Everything here is independent of the constructive code: stabilizers are
found by scanning all y in H_{r,2k}, orbits by connected components of the
Schreier graph of a generating set, and conjugacy classes the same way.
The only shared piece with :mod:`witness` is the verifier, which
``sweep_verify`` calls on the constructed certificates.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .certificate import verify_certificate
from .errors import BudgetExceeded, KlyachkoError
from .exactfield import make_field, primitive_root
from .matlin import J, Matrix
from .modelgroups import (
    DEFAULT_BUDGET,
    ModelShape,
    PairShape,
    _transvection_generators,
    gl_array,
    gl_order,
    h_array,
    h_order,
    legal_pairs,
    matrix_codes,
)
from .witness import find_witness

_CHUNK_ELEMENTS = 1 << 21


def estimate_cost(n: int, q: int, pairs) -> int:
    """Rough count of elementary group operations for a full sweep."""
    total = 0
    for r, rp in pairs:
        total += h_order(ModelShape(n, r), q) * (2 if r == rp else 1)
    return gl_order(n, q) * total


def _inverses(G: np.ndarray, p: int) -> np.ndarray:
    return np.array([Matrix(g.tolist(), p).inv().rows for g in G], dtype=np.int64).reshape(G.shape)


def _in_hbar(Z: np.ndarray, shape: ModelShape, p: int) -> np.ndarray:
    """Vectorised membership of Z (..., n, n) in the transpose of H_{r,2k}."""
    n, r = shape.n, shape.r
    ok = np.ones(Z.shape[:-2], dtype=bool)
    if r:
        top = Z[..., :r, :r]
        lower = np.tril(np.ones((r, r), dtype=bool), -1)
        eye = np.eye(r, dtype=np.int64)
        ok &= np.all(np.where(lower, True, top == eye), axis=(-2, -1))
        ok &= np.all(Z[..., :r, r:] == 0, axis=(-2, -1))
    if r < n:
        s = Z[..., r:, r:]
        Jm = np.array(J(n - r, p).rows, dtype=np.int64)
        prod = np.swapaxes(s, -1, -2) @ Jm @ s % p
        ok &= np.all(prod == Jm, axis=(-2, -1))
    return ok


def _superdiag_sum(a: np.ndarray, r: int) -> np.ndarray:
    if r < 2:
        return np.zeros(a.shape[:-2], dtype=np.int64)
    return sum(a[..., i, i + 1] for i in range(r - 1))


def _subdiag_sum(a: np.ndarray, r: int) -> np.ndarray:
    if r < 2:
        return np.zeros(a.shape[:-2], dtype=np.int64)
    return sum(a[..., i + 1, i] for i in range(r - 1))


@dataclass
class ScanResult:
    """Per-element flags for one pair shape, aligned with the element array."""

    plus_nontrivial: np.ndarray
    twisted_nontrivial: np.ndarray

    @property
    def proposition(self) -> np.ndarray:
        return self.plus_nontrivial | self.twisted_nontrivial

    @property
    def contributing(self) -> np.ndarray:
        return ~self.plus_nontrivial


def scan_stabilizers(G: np.ndarray, p: int, shape: PairShape, budget=DEFAULT_BUDGET) -> ScanResult:
    """For each g, scan y in H_{r,2k} and test the partner in Hbar_{r',2k'}.

    plus_nontrivial[i]: some y with g^{-1} y g in Hbar' has theta != 1.
    twisted_nontrivial[i]: (r = r' only) some y with g^{-1} y t(g) in Hbar'
    has theta~ = -theta != 1.
    """
    n = shape.n
    H = h_array(shape.left, p, budget)
    cost = len(G) * len(H) * (2 if shape.r == shape.rp else 1)
    if budget is not None and cost > budget:
        raise BudgetExceeded(f"stabilizer scan {shape}", cost, budget)
    psi_y = _superdiag_sum(H, shape.r) % p
    Ginv = _inverses(G, p)
    plus = np.zeros(len(G), dtype=bool)
    twisted = np.zeros(len(G), dtype=bool)
    right = shape.right
    chunk = max(1, _CHUNK_ELEMENTS // max(1, len(H) * n * n))
    for start in range(0, len(G), chunk):
        g = G[start:start + chunk][:, None]
        gi = Ginv[start:start + chunk][:, None]
        left = gi @ H[None] % p
        Z = left @ g % p
        member = _in_hbar(Z, right, p)
        e = (psi_y[None] - _subdiag_sum(Z, shape.rp)) % p
        plus[start:start + chunk] = np.any(member & (e != 0), axis=1)
        if shape.r == shape.rp:
            Zt = left @ np.swapaxes(g, -1, -2) % p
            member_t = _in_hbar(Zt, right, p)
            et = (psi_y[None] - _subdiag_sum(Zt, shape.rp)) % p
            # theta~ = -zeta^e, which is 1 only when p = 2 and e is odd
            good = np.ones_like(et, dtype=bool) if p != 2 else (et == 0)
            twisted[start:start + chunk] = np.any(member_t & good, axis=1)
    return ScanResult(plus, twisted)


# orbits ------------------------------------------------------------------------

def _index_of(codes_sorted: np.ndarray, codes: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(codes_sorted, codes)
    if np.any(idx >= len(codes_sorted)) or np.any(codes_sorted[np.minimum(idx, len(codes_sorted) - 1)] != codes):
        raise KlyachkoError("generator move left the enumerated set")
    return idx


def _components(G: np.ndarray, p: int, moves) -> np.ndarray:
    """Connected components of the graph g -> move(g) for each move."""
    codes = matrix_codes(G, p)
    order = np.argsort(codes)
    if not np.all(order == np.arange(len(G))):
        raise KlyachkoError("element array must be sorted by code")
    src, dst = [], []
    base = np.arange(len(G))
    for mv in moves:
        img = mv(G) % p
        src.append(base)
        dst.append(_index_of(codes, matrix_codes(img, p)))
    if not src:
        return np.arange(len(G))
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(len(G), len(G)))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def model_generators(shape: ModelShape, p: int) -> list:
    """A generating set of H_{r,2k}(F_p) as int arrays."""
    n, r = shape.n, shape.r
    gens = []
    for i in range(r - 1):
        m = np.eye(n, dtype=np.int64)
        m[i, i + 1] = 1
        gens.append(m)
    for i in range(r):
        for j in range(r, n):
            m = np.eye(n, dtype=np.int64)
            m[i, j] = 1
            gens.append(m)
    for t in _transvection_generators(n - r, p):
        m = np.eye(n, dtype=np.int64)
        m[r:, r:] = t
        gens.append(m)
    return gens


def pair_moves(shape: PairShape, p: int) -> list:
    moves = []
    for h in model_generators(shape.left, p):
        moves.append(lambda G, h=h: h @ G)
    for h in model_generators(shape.right, p):
        ht = h.T.copy()
        moves.append(lambda G, ht=ht: G @ ht)
    return moves


@dataclass
class OrbitReport:
    n: int
    q: int
    shape: PairShape
    orbits: list = field(default_factory=list)  # (representative, size, contributing)

    @property
    def total(self) -> int:
        return sum(size for _, size, _ in self.orbits)

    @property
    def contributing(self) -> int:
        return sum(1 for *_, c in self.orbits if c)


def orbit_decompose(n: int, q: int, shape: PairShape, budget=DEFAULT_BUDGET, G=None) -> OrbitReport:
    make_field(q)
    if G is None:
        G = gl_array(n, q, budget)
    labels = _components(G, q, pair_moves(shape, q))
    # representative = first element (smallest code) of each orbit
    _, first, sizes = np.unique(labels, return_index=True, return_counts=True)
    reps = G[first]
    scan = scan_stabilizers(reps, q, shape, budget)
    orbits = []
    for i in np.argsort(first):
        rep = Matrix(reps[i].tolist(), q, n)
        orbits.append((rep, int(sizes[i]), bool(scan.contributing[i])))
    return OrbitReport(n, q, shape, orbits)


def mackey_count(n: int, q: int, shape: PairShape, budget=DEFAULT_BUDGET) -> int:
    """Number of orbits whose stabilizer character is trivial."""
    return orbit_decompose(n, q, shape, budget).contributing


def class_count(n: int, q: int, budget=DEFAULT_BUDGET) -> int:
    """Conjugacy classes of GL_n(F_q) as components under conjugation by generators."""
    G = gl_array(n, q, budget)
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                m = np.eye(n, dtype=np.int64)
                m[i, j] = 1
                gens.append(m)
    if q > 2 and n:
        m = np.eye(n, dtype=np.int64)
        m[0, 0] = primitive_root(q)
        gens.append(m)
    moves = []
    for x in gens:
        xi = np.array(Matrix(x.tolist(), q).inv().rows, dtype=np.int64)
        moves.append(lambda G, x=x, xi=xi: x @ G % q @ xi)
    labels = _components(G, q, moves)
    return len(np.unique(labels))


@dataclass
class MackeyTable:
    n: int
    q: int
    counts: dict
    classes: int

    @property
    def off_diagonal_zero(self) -> bool:
        return all(v == 0 for (r, rp), v in self.counts.items() if r != rp)

    @property
    def diagonal_sum(self) -> int:
        return sum(v for (r, rp), v in self.counts.items() if r == rp)

    @property
    def passed(self) -> bool:
        return self.off_diagonal_zero and self.diagonal_sum == self.classes


def mackey_table(n: int, q: int, budget=DEFAULT_BUDGET) -> MackeyTable:
    counts = {pair: mackey_count(n, q, PairShape(n, *pair), budget) for pair in legal_pairs(n)}
    return MackeyTable(n, q, counts, class_count(n, q, budget))


def klyachko_sum_check(n: int, q: int, budget=DEFAULT_BUDGET) -> bool:
    return mackey_table(n, q, budget).passed


# sweeps ----------------------------------------------------------------------

@dataclass
class PairSweep:
    pair: tuple
    elements: int = 0
    oracle_failures: int = 0
    witness_failures: int = 0
    disagreements: int = 0
    eps_counts: dict = field(default_factory=lambda: {1: 0, -1: 0})
    examples: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return self.oracle_failures + self.witness_failures + self.disagreements


@dataclass
class SweepReport:
    n: int
    q: int
    pairs: list
    elements: int
    results: list
    seconds: float = 0.0

    @property
    def failures(self) -> int:
        return sum(r.failures for r in self.results)

    def to_text(self, footer: bool = True) -> str:
        lines = [f"sweep n={self.n} q={self.q} elements={self.elements}"]
        lines.append(f"{'pair':>8} {'elements':>9} {'oracle':>7} {'witness':>8} {'disagree':>9} {'eps+':>6} {'eps-':>6}")
        for r in self.results:
            lines.append(
                f"{str(r.pair):>8} {r.elements:>9} {r.oracle_failures:>7} {r.witness_failures:>8} "
                f"{r.disagreements:>9} {r.eps_counts[1]:>6} {r.eps_counts[-1]:>6}"
            )
            for ex in r.examples:
                lines.append(f"    FAIL {ex}")
        lines.append(f"{self.failures} failures / {self.elements} elements")
        if footer:
            lines.append(f"# elapsed {self.seconds:.2f}s")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "q": self.q,
            "elements": self.elements,
            "failures": self.failures,
            "pairs": [
                {
                    "r": r.pair[0],
                    "rprime": r.pair[1],
                    "elements": r.elements,
                    "oracle_failures": r.oracle_failures,
                    "witness_failures": r.witness_failures,
                    "disagreements": r.disagreements,
                    "eps_plus": r.eps_counts[1],
                    "eps_minus": r.eps_counts[-1],
                    "examples": r.examples,
                }
                for r in self.results
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _witness_shard(args):
    rows, q, n, pair, plus, twisted = args
    shape = PairShape(n, *pair)
    out = PairSweep(pair)
    for arr, pl, tw in zip(rows, plus, twisted):
        g = Matrix(arr, q, n)
        out.elements += 1
        if not (pl or tw):
            out.oracle_failures += 1
            out.examples.append(f"{pair} oracle found no witness for {g.rows}")
        try:
            cert = find_witness(g, shape)
            verdict = verify_certificate(g, shape, cert)
        except KlyachkoError as exc:
            out.witness_failures += 1
            out.examples.append(f"{pair} {type(exc).__name__}: {exc} at {g.rows}")
            continue
        if not verdict:
            out.witness_failures += 1
            out.examples.append(f"{pair} {verdict} at {g.rows}")
            continue
        out.eps_counts[cert.eps] += 1
        # the certificate is an element of the scanned stabilizer
        if (cert.eps == 1 and not pl) or (cert.eps == -1 and not tw):
            out.disagreements += 1
            out.examples.append(f"{pair} certificate outside the oracle's stabilizer at {g.rows}")
    return out


def _merge(parts, pair):
    total = PairSweep(pair)
    for part in parts:
        total.elements += part.elements
        total.oracle_failures += part.oracle_failures
        total.witness_failures += part.witness_failures
        total.disagreements += part.disagreements
        for k in (1, -1):
            total.eps_counts[k] += part.eps_counts[k]
        total.examples.extend(part.examples)
    total.examples = total.examples[:10]
    return total


def sweep_verify(n: int, q: int, pairs=None, budget=DEFAULT_BUDGET, workers: int = 1) -> SweepReport:
    make_field(q)
    pairs = legal_pairs(n) if pairs in (None, "all") else [tuple(pr) for pr in pairs]
    for pr in pairs:
        PairShape(n, *pr)
    cost = estimate_cost(n, q, pairs)
    if budget is not None and cost > budget:
        raise BudgetExceeded(f"sweep n={n} q={q}", cost, budget)
    start = time.perf_counter()
    G = gl_array(n, q, budget)
    rows = [g.tolist() for g in G]
    results = []
    for pair in pairs:
        shape = PairShape(n, *pair)
        scan = scan_stabilizers(G, q, shape, None)
        nshards = max(1, workers) * 4 if workers > 1 else 1
        bounds = np.linspace(0, len(G), nshards + 1).astype(int)
        tasks = [
            (rows[a:b], q, n, pair, scan.plus_nontrivial[a:b].tolist(), scan.twisted_nontrivial[a:b].tolist())
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_witness_shard, tasks))
        else:
            parts = [_witness_shard(t) for t in tasks]
        results.append(_merge(parts, pair))
    return SweepReport(n, q, pairs, len(G), results, time.perf_counter() - start)


def mackey_report(table: MackeyTable, footer_seconds: float | None = None) -> str:
    rs = sorted({r for r, _ in table.counts}, reverse=True)
    lines = [f"mackey n={table.n} q={table.q}"]
    lines.append("r \\ r'  " + " ".join(f"{rp:>5}" for rp in rs))
    for r in rs:
        lines.append(f"{r:>7}  " + " ".join(f"{table.counts[(r, rp)]:>5}" for rp in rs))
    lines.append(f"off-diagonal zero: {'yes' if table.off_diagonal_zero else 'no'}")
    lines.append(f"diagonal sum: {table.diagonal_sum}")
    lines.append(f"class_count: {table.classes}")
    lines.append(f"klyachko_sum_check: {'PASS' if table.passed else 'FAIL'}")
    if footer_seconds is not None:
        lines.append(f"# elapsed {footer_seconds:.2f}s")
    return "\n".join(lines) + "\n"


def mackey_json(table: MackeyTable) -> str:
    doc = {
        "n": table.n,
        "q": table.q,
        "counts": [{"r": r, "rprime": rp, "count": c} for (r, rp), c in sorted(table.counts.items(), reverse=True)],
        "class_count": table.classes,
        "diagonal_sum": table.diagonal_sum,
        "off_diagonal_zero": table.off_diagonal_zero,
        "passed": table.passed,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
