import itertools
from collections import Counter

import pytest
from conftest import profiles

from zvline import (
    CertificationConfig,
    DeviationQuery,
    Dictator,
    Fixed,
    FStar,
    Graph,
    Mean,
    Median,
    OrderMechanism,
    PropertyClass,
    certify,
    check_deviation,
    dedupe_search_space,
    find_deviation,
    generate,
    iter_deviations,
)
from zvline.errors import BudgetExceeded, InvalidParameters
from zvline.oracle import apply_deviation, search_space_size, sub_multisets

MIS, ABS, FN, GROUP = PropertyClass.MISREPORT, PropertyClass.ABSTENTION, PropertyClass.FALSENAME, PropertyClass.GROUP


def naive_violations(g, m, max_agents, cap):
    """Independent oracle: every beneficial triple by direct evaluation."""
    out = []
    for x in profiles(g.vertices, max_agents):
        before = m(list(x))
        seen = set()
        for r in range(1, len(x) + 1):
            for pos in itertools.combinations(range(len(x)), r):
                c = tuple(x[i] for i in pos)
                if c in seen:
                    continue
                seen.add(c)
                rest = list(x)
                for b in c:
                    rest.remove(b)
                for s in range(cap + 1):
                    for a in itertools.combinations_with_replacement(g.vertices, s):
                        after_profile = rest + list(a)
                        if not after_profile and not m.accepts_empty:
                            continue
                        after = m(after_profile)
                        old = [g.distance(b, before) for b in c]
                        new = [g.distance(b, after) for b in c]
                        if all(n <= o for n, o in zip(new, old)) and any(n < o for n, o in zip(new, old)):
                            out.append((x, c, a))
    return out


def test_check_deviation_examples(line3, weighted):
    med = Median(line3, ["1", "2", "3"])
    cex = check_deviation(line3, med, DeviationQuery.of(["1", "3"], ["3"], ["3", "3"]))
    assert (cex.outcome_before, cex.outcome_after) == ("1", "3")
    assert cex.member_deltas == (("3", 2, 0),)
    assert cex.property_class is FN

    g, p = weighted
    fs = FStar(g, p, allow_weighted=True)
    cex = check_deviation(g, fs, DeviationQuery.of(["z_r", "v"], ["v"], ["z_l"]))
    assert (cex.outcome_before, cex.outcome_after, cex.member_deltas) == ("z_r", "z_l", (("v", 10, 1),))
    assert cex.property_class is MIS

    assert check_deviation(line3, med, DeviationQuery(("1", "3"), (), ())) is None
    assert check_deviation(line3, med, DeviationQuery.of(["1", "3"], ["3"], ["3"])) is None


def test_query_class_invariants():
    with pytest.raises(InvalidParameters):
        DeviationQuery.of(["a", "b"], ["a"], ["b"], ABS)
    with pytest.raises(InvalidParameters):
        DeviationQuery.of(["a", "b"], ["a", "b"], ["b"], MIS)
    assert DeviationQuery.of(["a", "b"], ["a", "b"], ["b"], GROUP).property_class is GROUP
    assert DeviationQuery.of(["a"], ["a"], []).property_class is ABS
    with pytest.raises(InvalidParameters):
        DeviationQuery.of(["a"], ["b"], [])


def test_apply_deviation_keeps_other_agents_in_place():
    assert apply_deviation(("a", "b", "c"), (0,), ("x",)) == ("x", "b", "c")
    assert apply_deviation(("a", "b", "c"), (0, 2), ("x",)) == ("x", "b")
    assert apply_deviation(("a", "b", "c"), (1,), ("x", "y")) == ("a", "x", "c", "y")
    assert apply_deviation(("a", "b"), (0, 1), ()) == ()


def test_dedupe_examples():
    g = Graph(["a", "b"], [("a", "b")])
    assert [x for n in (1, 2) for x in itertools.combinations_with_replacement("ab", n) if n == 2] == [
        ("a", "a"),
        ("a", "b"),
        ("b", "b"),
    ]
    assert sub_multisets((0, 1), include_empty=True) == [(), (0,), (1,), (0, 1)]
    assert sub_multisets((0, 0, 1)) == [(0,), (1,), (0, 0), (0, 1), (0, 0, 1)]
    cfg = CertificationConfig(max_agents=1, ballot_cap=2)
    triples = list(dedupe_search_space(cfg, g))
    # profile {a}: one coalition, replacements ∅,a,b,aa,ab,bb
    assert [t[2] for t in triples if t[0] == ("a",)] == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "b")]
    assert len(triples) == search_space_size(cfg, g) == 12


def test_find_deviation_examples(line3):
    ag = generate("discrete_line", 3)
    assert find_deviation(ag.graph, FStar(ag.graph, ag.partition), CertificationConfig(3, 3)) is None

    mean = Mean(line3, ["1", "2", "3"])
    cex = find_deviation(line3, mean, CertificationConfig(2, 1, property_classes={MIS}))
    assert cex is not None and cex.property_class is MIS
    assert check_deviation(line3, mean, cex.query) == cex


def test_median_falsename_control(line3):
    med = Median(line3, ["1", "2", "3"])
    cfg = CertificationConfig(2, 2, property_classes={FN})
    first = find_deviation(line3, med, cfg)
    assert first is not None and first.property_class is FN
    witnesses = {(c.query.true_profile, c.query.members, c.query.replacement) for c in iter_deviations(line3, med, cfg)}
    assert (("1", "3"), ("3",), ("3", "3")) in witnesses


@pytest.mark.parametrize(
    "make",
    [
        lambda g, p: FStar(g, p),
        lambda g, p: Median(g, None),
        lambda g, p: Mean(g, list(reversed(g.vertices))),
        lambda g, p: OrderMechanism(g, list(reversed(g.vertices))),
        lambda g, p: Fixed(g, g.vertices[-1]),
    ],
    ids=["fstar", "median", "mean", "order", "fixed"],
)
@pytest.mark.parametrize("family", [("discrete_line", 3), ("cycle", 4), ("biclique", 2, 2)])
def test_sweep_matches_independent_oracle(make, family):
    ag = generate(family[0], *family[1:])
    g = ag.graph
    m = make(g, ag.partition)
    cfg = CertificationConfig(3, 2)
    report = certify(g, m, cfg)
    naive = naive_violations(g, m, 3, 2)
    assert report.violation_count == len(naive)
    assert report.certified == (not naive)
    # one recorded counterexample per (profile, coalition), with the first replacement in canonical order
    first = {}
    for x, c, a in naive:
        first.setdefault((x, c), a)
    got = {(ce.query.true_profile, ce.query.members): ce.query.replacement for ce in report.counterexamples}
    assert got == first
    slow = list(iter_deviations(g, m, cfg))
    assert [(c.query.true_profile, c.query.members, c.query.replacement) for c in slow] == naive


def test_soundness_and_determinism():
    ag = generate("discrete_line", 4)
    g = ag.graph
    med = Median(g, None)
    cfg = CertificationConfig(3, 3)
    r1, r2 = certify(g, med, cfg), certify(g, med, cfg)
    assert not r1.certified
    assert r1.counterexamples == r2.counterexamples
    assert r1.lines()[:-1] == r2.lines()[:-1]
    for cex in r1.counterexamples:
        assert check_deviation(g, med, cex.query) == cex
        assert all(after <= before for _, before, after in cex.member_deltas)
        assert any(after < before for _, before, after in cex.member_deltas)
    assert any(c.property_class is FN for c in r1.counterexamples)


def test_parallel_merge_is_canonical():
    ag = generate("discrete_line", 3)
    med = Median(ag.graph, None)
    cfg = CertificationConfig(3, 2)
    serial = certify(ag.graph, med, cfg)
    parallel = certify(ag.graph, med, CertificationConfig(3, 2, jobs=2))
    assert serial.counterexamples == parallel.counterexamples
    assert serial.violation_count == parallel.violation_count
    assert find_deviation(ag.graph, med, CertificationConfig(3, 2, jobs=2)) == serial.counterexamples[0]


def test_larger_caps_never_restore_certification(line3):
    med = Median(line3, None)
    verdicts = [certify(line3, med, CertificationConfig(n, cap)).certified for n in (1, 2, 3) for cap in (1, 2, 3)]
    grid = [verdicts[i * 3 : i * 3 + 3] for i in range(3)]
    for i in range(3):
        for j in range(3):
            if not grid[i][j]:
                assert not any(grid[a][b] for a in range(i, 3) for b in range(j, 3))


@pytest.mark.parametrize("family", [("grid2n", 3), ("family_F", 2, 1, 2), ("cycle", 4)])
def test_group_certification_implies_special_cases(family):
    ag = generate(family[0], *family[1:])
    m = FStar(ag.graph, ag.partition)
    assert certify(ag.graph, m, CertificationConfig(3, 3)).certified
    for cls in (MIS, ABS, FN):
        assert certify(ag.graph, m, CertificationConfig(3, 3, property_classes={cls})).certified


def test_class_restricted_counterexamples_are_a_subset(line3):
    med = Median(line3, None)
    group = {(c.query.true_profile, c.query.members) for c in certify(line3, med, CertificationConfig(3, 3)).counterexamples}
    for cls in (MIS, ABS, FN):
        rep = certify(line3, med, CertificationConfig(3, 3, property_classes={cls}))
        assert all(c.property_class is cls for c in rep.counterexamples)
        assert {(c.query.true_profile, c.query.members) for c in rep.counterexamples} <= group


def test_property_suites(path5):
    g, p = path5
    fixed = certify(g, Fixed(g, "z2"), CertificationConfig(2, 2))
    assert fixed.certified
    assert any(f.startswith("onto") for f in fixed.property_failures)
    assert any(f.startswith("pareto") for f in fixed.property_failures)
    assert not fixed.ok
    fs = certify(g, FStar(g, p), CertificationConfig(2, 2, tau_list=(1, 2)))
    assert fs.ok
    assert "root-saturation" in fs.properties_checked


def test_dictator_audits_sequences(path5):
    g, _ = path5
    first = certify(g, Dictator(g, 1), CertificationConfig(3, 2))
    assert first.certified
    assert "anonymity" not in first.properties_checked
    # with three agents, agent 1 abstaining hands the decision to agent 3
    second = certify(g, Dictator(g, 2), CertificationConfig(3, 1))
    assert not second.certified
    assert any(c.property_class is ABS for c in second.counterexamples)
    assert search_space_size(CertificationConfig(1, 1), g, anonymous=False) == 5 * (1 + 5)


def test_budget_guard(path5):
    g, p = path5
    with pytest.raises(BudgetExceeded):
        certify(g, FStar(g, p), CertificationConfig(3, 3, budget=100))


def test_config_validation():
    with pytest.raises(InvalidParameters):
        CertificationConfig(max_agents=0)
    with pytest.raises(InvalidParameters):
        CertificationConfig(ballot_cap=-1)
    with pytest.raises(InvalidParameters):
        CertificationConfig(property_classes=set())
    assert PropertyClass.parse("false-name") is FN
    assert PropertyClass.parse("group") is GROUP


def test_report_records(weighted):
    g, p = weighted
    rep = certify(g, FStar(g, p, allow_weighted=True), CertificationConfig(2, 2))
    assert not rep.certified
    lines = rep.lines()
    assert lines[0].startswith("counterexample class=Misreport profile=z_r,v coalition=v A=z_l ")
    assert lines[-1].startswith("summary mechanism=fstar[z_l z_r] verdict=not certified")
    counts = Counter(c.property_class for c in rep.counterexamples)
    assert counts[MIS] >= 1
