import pytest

from fatsub import classify as C
from fatsub import liealg as L
from fatsub.errors import InvalidArgument


@pytest.fixture(scope="module")
def verdicts():
    return {v.key: v for v in C.verify_tables()}


def test_parse_params_and_expressions():
    rows = C.parse_rows("table-B | X | G=SU(2n+1) @ su({2*n+1}); H=SO(2n+1) @ so({2*n+1}); params=n:1,3\n")
    assert [r.key for r in rows] == ["table-B:X[n=1]", "table-B:X[n=3]"]
    assert rows[1].token("G") == "su(7)"
    assert rows[1].display("G") == "SU(2n+1)"


@pytest.mark.parametrize("bad", [
    "table-B | X",
    "nosuch | X | G=SU(3) @ su3",
    "table-B | X | G",
    "table-B | X | G=SU(3) @ su({n+1})",
    "table-B | X | G=SU(3) @ su({__import__('os')}); params=n:1",
    "table-B | X | G=SU(3) @ su3; params=m:1",
])
def test_parse_errors(bad):
    with pytest.raises(InvalidArgument):
        C.parse_rows(bad)


def test_shipped_row_counts():
    counts = {tid: len(C.load_table_rows(tid)) for tid in C.TABLE_IDS}
    assert counts["ziller-A"] == 5
    assert counts["table-B"] == 12


@pytest.mark.parametrize("d, source", [(1, "equality-case"), (3, "equality-case"), (7, "equality-case"),
                                       (2, "multiple"), (16, "multiple"), (5, "table-exception"), (9, "none")])
def test_fiber_rules(d, source):
    assert C.fiber_rule_source(d) == source
    assert C.fiber_dimension_rule(d) == (source != "none")


def test_fiber_rule_rejects_zero():
    with pytest.raises(InvalidArgument):
        C.fiber_dimension_rule(0)


@pytest.mark.parametrize("name, rank", [("so5", 2), ("su3", 2), ("sp3", 3), ("so7", 3)])
def test_subalgebra_rank(name, rank):
    g = L.algebra(name)
    assert C.subalgebra_rank(L.embed(g, name)) == rank


def test_failures_match_expected_flags(verdicts):
    got = {(k, c) for k, v in verdicts.items() for c in v.failures()}
    assert got == C.load_expected_flags()


@pytest.mark.parametrize("label", ["ziller-A:S7-Sp2", "ziller-A:S11-Sp3"])
def test_sp_rows_pass_fully(verdicts, label):
    v = verdicts[label]
    assert v.passed
    assert v.fatness_ok == C.PASS and v.margin > 0.1


def test_known_tensions_are_flagged(verdicts):
    assert verdicts["ziller-A:S7-SU3"].dim_ok == C.FAIL
    assert verdicts["berard-bergery-C:SU3-SO3-e"].even_base_ok == C.FAIL
    assert verdicts["table-B:SU3-SO3"].even_base_ok == C.FAIL
    assert "placeholder" in verdicts["table-A:unnamed-SO2n4[n=1]"].to_dict()["notes"]


def test_arithmetic_rows_are_not_silent(verdicts):
    v = verdicts["table-B:E6-F4"]
    assert v.dim_ok == C.PASS
    assert "arithmetic-only" in v.to_dict()["notes"]


def test_format_has_one_line_per_row(verdicts):
    vs = C.verify_tables("ziller-A")
    lines = C.format_verdicts(vs).splitlines()
    assert lines[0] == "ziller-A"
    assert sum(line.startswith(("RP^", "S^")) for line in lines) == len(vs) == 5


def test_enumerate_candidates():
    assert C.enumerate_candidates(3) == []
    small = C.enumerate_candidates(10)
    assert small and all(c.g == "sp(2)" and c.dim_p == 3 for c in small)
    with pytest.raises(InvalidArgument):
        C.enumerate_candidates(40)
