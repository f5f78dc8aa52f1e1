"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary
(see conftest.py), so ``pytest -v`` shows them without ``-s``.
"""

import os
import random
import subprocess
import sys
import time

import oracles
from glpwb import covering as C
from glpwb import jtree as J
from glpwb import nperiodic as N
from glpwb import word as W
from glpwb.gen import probe_grid, random_hset, random_ordinal_below
from glpwb.logic import TOP, Dia, Frame, eval_formula, is_valid_on_frame, parse
from glpwb.ordinal import ONE, add, ell_iter, omega_tower
from glpwb.suites import Params, d0_oracle, run_suite

W3, W4, W5 = omega_tower(3), omega_tower(4), omega_tower(5)

RESULTS = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def _grid(s):
    pts = set()
    for b, _ in s.terms():
        pts.update(probe_grid(b))
    return pts


def test_criterion_1_identities():
    t0 = time.time()
    rep = run_suite("glp-identities", 100, seed=0, params=Params(W4, 3))
    dt = time.time() - t0
    ok = rep.ok and dt < 300
    report(1, ok, f"{2 * rep.count} sets, {len(rep.failures)} failing pairs, {dt:.0f}s (target < 300s)")
    assert rep.ok, rep.render()
    assert dt < 300


def test_criterion_2_closure():
    t0 = time.time()
    bad = []
    nsets = 0
    for level in range(4):
        for k in range(8):
            rng = random.Random(f"closure:{level}:{k}")
            s = random_hset(rng, level, W4)
            nsets += 1
            for i in range(level + 1):
                d = N.derivative(s, i)
                text = N.format_hset(d)
                if N.parse_hset(text) != d or N.format_hset(N.parse_hset(text)) != text:
                    bad.append(f"reserialize level {level} case {k} i={i}")
            d0 = N.derivative(s, 0)
            for a in _grid(s):
                if N.member(d0, a) != d0_oracle(s, a):
                    bad.append(f"d0 at {a}, level {level} case {k}")
    # rank oracle for the whole space
    pts = probe_grid(W.ones(W5))
    for i in range(1, 4):
        s = N.full(0, W5)
        for k in range(1, 4):
            s = N.derivative(s, i)
            for a in pts:
                r = ell_iter(i + 1, a)
                expect = bool(r.terms) and (not r.is_finite or r.finite_value() >= k)
                if N.member(s, a) != expect:
                    bad.append(f"d_{i}^{k} rank at {a}")
    dt = time.time() - t0
    report(2, not bad, f"{nsets} sets, d_i for i <= level, rank iterates i = 1..3 at w_5, {len(bad)} disagreements, {dt:.0f}s")
    assert not bad, bad[:5]


def test_criterion_3_omega_squared():
    t0 = time.time()
    n = 0
    bad = []
    for head, tail, top in oracles.cases(4):
        n += 1
        x = oracles.block_word(head, tail, top)
        d = N.derivative(N.from_word(x), 0)
        if not N.equal(d, N.from_word(oracles.expected_d0(head, tail, top))):
            bad.append((head, tail, top))
            continue
        for k, j in oracles.grid(top):
            if N.member(d, oracles.point(k, j)) != oracles.limit_point(head, tail, k, j):
                bad.append((head, tail, top, k, j))
                break
    dt = time.time() - t0
    ok = not bad and dt < 60
    report(3, ok, f"{n} block-pattern sets below w^2+1, {len(bad)} disagreements, {dt:.0f}s (target < 60s)")
    assert not bad, bad[:5]
    assert dt < 60


def test_criterion_4_uset_laws():
    rng = random.Random("usets")
    counts = [0, 0, 0]
    bad = []
    while counts[0] < 50:
        a = random_hset(rng, rng.randint(0, 2), W4)
        if N.is_empty(a):
            continue
        counts[0] += 1
        if not N.equal(N.derivative(N.lift_ell(a), 0), N.uset(1, N.min_of(a), W4)):
            bad.append(f"ell-preimage {N.format_hset(a)}")
    for _ in range(50):
        nu = random_ordinal_below(rng, W3, 2)
        e = oracles.multiples(nu, W4)
        counts[1] += 1
        if not N.equal(N.derivative(e, 0), N.uset(1, add(nu, ONE), W4)):
            bad.append(f"d0(E) nu={nu}")
    for _ in range(50):
        nu = random_ordinal_below(rng, W3, 2)
        n = rng.randint(1, 3)
        e = oracles.multiples(nu, W4)
        counts[2] += 1
        if not N.equal(N.derivative(e, n), N.intersect(N.uset(n + 1, 0, W4), e)):
            bad.append(f"d{n}(E) nu={nu}")
    report(4, not bad, f"instances {counts[0]}/{counts[1]}/{counts[2]}, {len(bad)} failures")
    assert not bad, bad[:5]


def test_criterion_5_coverings():
    t0 = time.time()
    total = 0
    bad = []
    for n in range(3):
        for t in J.enumerate_trees(n, 5):
            total += 1
            c = C.cover(t)
            checks = C.verify(c, probes=100)
            failed = [ch.name for ch in checks if not ch.ok]
            if failed:
                bad.append(f"{J.format_sexp(J.tree_to_sexp(t))}: {failed}")
    dt = time.time() - t0
    ok = not bad and dt < 600
    report(5, ok, f"{total} trees (n <= 2, <= 5 nodes), {len(bad)} failing, {dt:.0f}s (target < 600s)")
    assert not bad, bad[:5]
    assert dt < 600


NON_THEOREMS = ["<0>T -> <1>T", "<0>p -> <1>p", "<0><1>p -> <1>p"]
THEOREMS = [
    ("[0]([0]p -> p) -> [0]p", 1),
    ("[1]([1]p -> p) -> [1]p", 1),
    ("<0>p -> [1]<0>p", 1),
    ("[0]p -> [1]p", 1),
    ("[2]([2]p -> p) -> [2]p", 2),
    ("<1>p -> [2]<1>p", 2),
    ("[0]p -> [2]p", 2),
]


def test_criterion_6_completeness_instances():
    t0 = time.time()
    bad = []
    for text in NON_THEOREMS:
        for n in (1, 2):
            f = parse(text)
            cert = C.completeness_pipeline(f, n)
            if cert is None or not cert.ok:
                bad.append(f"no valid certificate for {text} at n={n}")
                continue
            fr = cert.cover.frame()
            if N.member(eval_formula(f, cert.valuation, frame=fr), cert.witness):
                bad.append(f"witness does not falsify {text}")
    for text, n in THEOREMS:
        f = parse(text)
        if J.countermodel_search(f, n, node_budget=6) is not None:
            bad.append(f"countermodel found for theorem {text}")
        res = is_valid_on_frame(f, W3, n, count=100, seed=0)
        if not res.valid or res.tried != 100:
            bad.append(f"{text} fails on the frame at {res.witness}")
    dt = time.time() - t0
    report(6, not bad, f"6 certificates, {len(THEOREMS)} theorems NONE + 100 valuations, {dt:.0f}s")
    assert not bad, bad


def test_criterion_7_rank_law():
    bad = []
    for n in range(4):
        fr = Frame(W5, n)
        s = eval_formula(Dia(n, TOP), {}, frame=fr)
        if not N.equal(s, N.intersect(N.uset(n + 1, 0, fr.omega), fr.full)):
            bad.append(f"n={n} symbolic")
        for a in probe_grid(W.ones(fr.omega)):
            if a.terms and N.member(s, a) != bool(ell_iter(n + 1, a).terms):
                bad.append(f"n={n} at {a}")
    report(7, not bad, f"eval(<n>T) = {{a : ell^(n+1)(a) > 0}} over [1, w_5] for n = 0..3, {len(bad)} mismatches")
    assert not bad, bad[:5]


DETERMINISM_COMMANDS = [
    ["countermodel", "<0><1>p -> <1>p", "-n", "2", "--seed", "7"],
    ["countermodel", "<0>p -> <1>p", "-n", "1", "--format", "json"],
    ["cover", "(jtree 2 (nodes 0 1 2) (r 0 (0 2) (1 2)) (r 1) (r 2 (0 1)))"],
    ["validate", "<0>p -> [1]<0>p", "-n", "1", "--seed", "3", "--budget-vals", "10", "--format", "json"],
    ["fuzz", "glp-identities", "-k", "2", "--seed", "4", "--mutate", "--bound", "w^w", "-n", "1"],
    ["eval", "<1>T", "--bound", "w^w^w", "-n", "2"],
]


def _cli(args, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    env.pop("GLPWB_CACHE_DIR", None)
    res = subprocess.run([sys.executable, "-m", "glpwb.cli", *args], capture_output=True, env=env)
    return res.returncode, res.stdout


def test_criterion_8_determinism():
    bad = []
    for args in DETERMINISM_COMMANDS:
        a, b = _cli(args, 1), _cli(args, 2)
        if a != b or not a[1]:
            bad.append(args[0])
    report(8, not bad, f"{len(DETERMINISM_COMMANDS)} commands byte-identical across runs with different hash seeds")
    assert not bad, bad
