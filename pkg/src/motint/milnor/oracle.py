"""Brute-force truncated-arc counts over F_p, the independent check on zeta functions."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from ..errors import BadPrime, TooLarge
from ..grothring import DEFAULT_CAP, get_symbol, point_count
from ..rvcalc import coefficient

log = logging.getLogger(__name__)


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _count_chunk(args):
    terms, d, p, m, first = args
    M = p ** (m + 1)
    target = p ** m % M
    vals = np.arange(0, M, p, dtype=np.int64)
    axes = [np.array([first], dtype=np.int64)] + [vals] * (d - 1)
    grids = np.meshgrid(*axes, indexing="ij") if d > 1 else [axes[0]]
    shape = grids[0].shape
    total = np.zeros(shape, dtype=np.int64)
    cache = {}
    for e, c in terms:
        term = np.full(shape, c % M, dtype=np.int64)
        for i, k in enumerate(e):
            if not k:
                continue
            key = (i, k)
            if key not in cache:
                pw = np.ones(shape, dtype=np.int64)
                for _ in range(k):
                    pw = pw * grids[i] % M
                cache[key] = pw
            term = term * cache[key] % M
        total = (total + term) % M
    return int((total == target).sum())


def arc_count_oracle(f, p, m, cap=DEFAULT_CAP, workers=1):
    """[X_m] L^{-md} at L = p: arcs x ∈ (pZ/p^{m+1})^d with f(x) ≡ p^m, over p^{md}.

    The enumeration is split by the value of the first coordinate; chunks are
    independent so they can be farmed out to worker processes.
    """
    d = f.d
    if not _is_prime(p):
        raise BadPrime(f"{p} is not prime")
    size = p ** (m * d)
    if size > cap:
        raise TooLarge(f"p^(m d) = {size} exceeds the cap {cap}")
    M = p ** (m + 1)
    firsts = range(0, M, p)
    jobs = [(f.terms, d, p, m, x0) for x0 in firsts]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            count = sum(ex.map(_count_chunk, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        count = sum(_count_chunk(j) for j in jobs)
    return Fraction(count, size)


def action_lcm(x):
    q = 1
    for b in x.blocks():
        for s in b.cls.symbols():
            q = lcm(q, get_symbol(s).action_order)
    return q


def choose_primes(order, candidates=(7, 13), d=1, m=1, cap=DEFAULT_CAP):
    """Candidates with p ≡ 1 mod ``order``; otherwise the least such prime within the cap."""
    good = [p for p in candidates if (p - 1) % order == 0 and _is_prime(p)]
    if good:
        return good
    p = order + 1
    while True:
        if _is_prime(p):
            if p ** (m * d) > cap:
                raise TooLarge(f"no admissible prime below the cap for action order {order}")
            return [p]
        p += order


@dataclass(frozen=True)
class OracleReport:
    p: int
    m: int
    oracle: Fraction
    pipeline: Fraction

    @property
    def match(self):
        return self.oracle == self.pipeline

    def to_json(self):
        return {"p": self.p, "m": self.m, "oracle": str(self.oracle),
                "pipeline": str(self.pipeline), "match": self.match}


def pipeline_value(x, p, m, cap=DEFAULT_CAP):
    return point_count(coefficient(x, m), p, cap)


def verify(f, p, max_m, cap=DEFAULT_CAP, x=None, workers=1, **kw):
    """Compare oracle and pipeline for m = 1..max_m."""
    from .decompose import decompose
    x = x if x is not None else decompose(f, **kw)
    order = action_lcm(x)
    if (p - 1) % order:
        raise BadPrime(f"p = {p} is not 1 mod the action order {order}")
    out = []
    for m in range(1, max_m + 1):
        out.append(OracleReport(p, m, arc_count_oracle(f, p, m, cap, workers),
                                pipeline_value(x, p, m, cap)))
    return out
