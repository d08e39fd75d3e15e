import random

import networkx as nx
import pytest

from rightlinear.automata import counterexample, equivalent, meet_product, to_nfa
from rightlinear.calculus import (
    ID, K, ProofGraph, ProofNode, Rule, Sequent, deserialize, serialize,
)
from rightlinear.expr import One, Prefix, Sum, Zero, parse, total_sum, unfold
from rightlinear.gen import random_expr, random_sequent
from rightlinear.invariant import (
    DisciplineError, MeetSystem, collect_G, meet_language, rleq_check,
    verify_invariant,
)
from rightlinear.prover import Proved, prove

TOP = parse("mu X. 1 + a.X")
E = parse("mu X. 1 + a.a.X")
O = Prefix("a", E)
MUXX = parse("mu X. X")
PARITY = prove(Sequent(TOP, [Sum(E, O)])).proof
ZERO_PROOF = prove(Sequent(MUXX, [Zero()])).proof


def test_collect_G_examples():
    one = ProofGraph((ProofNode(Sequent(One(), [One()]), Rule(ID)),))
    assert collect_G(one) == {One(): {(One(),)}}
    g = collect_G(ZERO_PROOF)
    assert g[MUXX] == {(Zero(),)}
    assert g[unfold(MUXX)] == g[MUXX]
    assert {(Sum(E, O),), (E, O)} <= collect_G(PARITY)[TOP]


def test_collect_G_discipline():
    general_id = ProofGraph((ProofNode(Sequent(TOP, [TOP]), Rule(ID)),))
    with pytest.raises(DisciplineError):
        collect_G(general_id)
    postponed = ProofGraph((
        ProofNode(Sequent(MUXX, [Zero()]), Rule("0-r", formula=Zero()), (1,)),
        ProofNode(Sequent(MUXX, []), Rule("mu-l"), (1,)),
    ))
    with pytest.raises(DisciplineError):
        collect_G(postponed)


def test_rleq_examples():
    e, f, g = parse("a.1"), parse("b.1"), parse("1")
    assert rleq_check([e], [e, f])
    assert rleq_check([g, e], [g, Sum(e, f)])
    assert not rleq_check([e], [f])
    assert rleq_check([], [e])
    assert rleq_check([unfold(TOP)], [TOP])
    assert not rleq_check([TOP], [unfold(TOP)])


def test_meet_language_examples():
    sys = MeetSystem.over([E, O, TOP, One()])
    assert meet_language([E, O], sys).automaton.is_empty()
    assert meet_language([One()], sys).automaton.words_upto(4) == {""}
    assert equivalent(meet_language([E], sys).automaton, to_nfa(E))
    with pytest.raises(ValueError):
        meet_language([], sys)
    with pytest.raises(ValueError):
        sys.variable([parse("b.b.1")])


def test_meet_language_is_meet_product():
    rng = random.Random(21)
    checked = 0
    while checked < 60:
        sums = [random_expr(rng, 2) for _ in range(3)]
        sys = MeetSystem.over(sums)
        if len(sys.universe) > 12:
            continue
        checked += 1
        F = rng.sample(sys.universe, rng.randint(1, min(3, len(sys.universe))))
        assert equivalent(meet_language(F, sys).automaton, meet_product(F))


def test_verify_invariant_accepts_examples():
    for p in (PARITY, ZERO_PROOF):
        cert = verify_invariant(p)
        assert cert.accepted, cert.to_text()
        assert not cert.failures


def test_certificate_rendering():
    cert = verify_invariant(ZERO_PROOF)
    d = cert.to_dict()
    assert d["verdict"] == "accepted"
    assert all(c["holds"] for c in d["clauses"])
    assert cert.to_text().endswith("accepted")
    assert '"accepted"' in cert.to_json()


def test_tampered_proofs_are_rejected():
    # drop a formula the proof needs: the node no longer matches its rule
    lines = serialize(PARITY).splitlines()
    assert lines[2].startswith("seq ")
    lines[2] = "seq mu X0. 1 + a.X0 |- mu X0. 1 + a.a.X0"
    tampered = deserialize("\n".join(lines), validate=False)
    cert = verify_invariant(tampered)
    assert not cert.accepted and "well-formed" in cert.failures[0].clause
    # a well-formed preproof of an invalid sequent: the root check fails
    loop = ProofGraph((ProofNode(Sequent(One(), [MUXX]), Rule("mu-r", formula=MUXX), (0,)),))
    cert = verify_invariant(loop)
    assert not cert.accepted
    assert any(v.witness is not None and str(v.witness) == "~" for v in cert.failures)


def _proved_corpus(seed, n):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        s = random_sequent(rng, 3)
        r = prove(s)
        if isinstance(r, Proved):
            out.append(r.proof)
    return out


CORPUS = _proved_corpus(77, 40)


def test_emitted_proofs_have_invariants():
    for p in CORPUS:
        assert verify_invariant(p).accepted


def test_observation_on_k_free_paths():
    # going up a K-free path, both sides only move down the cedent preorder
    checked = 0
    for p in CORPUS + [PARITY]:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(p)))
        g.add_edges_from((i, j) for i, j in p.edges() if p.nodes[i].rule.kind != K)
        for n in g.nodes:
            below = p.nodes[n].sequent
            for m in nx.descendants(g, n):
                above = p.nodes[m].sequent
                assert rleq_check([above.lhs], [below.lhs])
                assert rleq_check(above.rhs, below.rhs)
                checked += 1
    assert checked > 200


def _grow(rng, gamma, universe):
    """Apply a generating clause of the cedent preorder upward."""
    gamma = list(gamma)
    roll = rng.random()
    if roll < 0.4 or not gamma:
        gamma.append(rng.choice(universe))
    elif roll < 0.7:
        i = rng.randrange(len(gamma))
        gamma[i] = Sum(gamma[i], rng.choice(universe))
    else:
        i = rng.randrange(len(gamma))
        gamma[i] = Sum(rng.choice(universe), gamma[i])
    return gamma


def test_monotonicity_sampled():
    rng = random.Random(13)
    for _ in range(80):
        universe = [random_expr(rng, 2) for _ in range(4)]
        small = [rng.choice(universe)]
        big = small
        for _ in range(rng.randint(1, 3)):
            big = _grow(rng, big, universe)
        assert rleq_check(small, big)
        ctx = [rng.choice(universe) for _ in range(rng.randint(0, 2))]
        lo = meet_product(ctx + [total_sum(small)])
        hi = meet_product(ctx + [total_sum(big)])
        assert counterexample(lo, [hi]) is None
