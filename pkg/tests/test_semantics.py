import pytest
from hypothesis import given, settings, strategies as st

from condikit.formula import And, CondBox, CondDiam, parse, random_formula
from condikit.semantics import (
    CCM_PROFILE,
    OLKHOVIKOV_PROFILE,
    WEISS_PROFILE,
    Clause,
    Model,
    ModelClass,
    ModelFormatError,
    ProfileError,
    SatProfile,
    check_frame,
    find_countermodel,
    hereditary_check,
    parse_model,
    random_model,
    repair_model,
    satisfies,
    truth_set,
    valid_in,
)

MC = ModelClass
SINGLE = Model.build(1)


# Hand-built models, checked against the clauses by hand.

# 0 <= 1, p only at 1: the root forces neither p nor ~p.
EXCLUDED_MIDDLE = Model.build(2, leq=[(0, 1)], val={1: ["p"]})

# One world where p fails, selecting itself for the empty set.
NO_IDENTITY = Model.build(1, rel={(): [(0, 0)]})

# 0 <= 1, q only at 1, and 1 selects 0 for the empty set (p holds nowhere).
# Nobody forces p > ~q, because 1 selects 0, which can still reach q; but
# 1 has no selected world with q, so the root fails p ?> q.
DIAMOND_DUAL = Model.build(2, leq=[(0, 1)], rel={(): [(1, 0)]}, val={1: ["q"]})


def test_hand_models():
    assert check_frame(EXCLUDED_MIDDLE, MC.CCM)
    assert not satisfies(EXCLUDED_MIDDLE, 0, parse("p | ~p"))
    assert satisfies(EXCLUDED_MIDDLE, 1, parse("p | ~p"))
    assert not satisfies(NO_IDENTITY, 0, parse("p > p"))
    assert not check_frame(NO_IDENTITY, MC.CCM_ID)
    f = parse("~(p > ~q) -> (p ?> q)")
    assert check_frame(DIAMOND_DUAL, MC.CCM)
    assert not satisfies(DIAMOND_DUAL, 0, f)
    assert truth_set(DIAMOND_DUAL, parse("~(p > ~q)")) == {0, 1}
    assert truth_set(DIAMOND_DUAL, parse("p ?> q")) == frozenset()


def test_check_frame_examples():
    for cls in MC:
        if "mp" in cls.conditions:
            # (mp) makes a world in X select itself, so empty relations fail it.
            assert check_frame(SINGLE, cls).witness == (0, frozenset({0}))
        else:
            assert check_frame(SINGLE, cls)
    assert check_frame(Model.build(1, rel={(0,): [(0, 0)]}), MC.CCM_MPID)
    lc = Model.build(3, leq=[(0, 1)], rel={(2,): [(1, 2)]})
    rep = check_frame(lc, MC.WEISS)
    assert not rep and rep.condition == "LC" and rep.witness == (0, 1, 2, frozenset({2}))
    assert check_frame(lc, MC.CCM)
    inside = Model.build(2, rel={(1,): [(0, 1), (1, 1)], (0, 1): [(0, 0)]})
    assert check_frame(inside, MC.CCM_ID)
    rep = check_frame(inside, MC.CCM_MP)
    assert not rep and rep.condition == "mp"


def test_check_frame_well_formedness():
    m = Model(3, (0b011, 0b110, 0b100), (frozenset(),) * 3)
    assert check_frame(m, MC.CCM).condition == "transitive"
    m = Model(2, (0b11, 0b10), (frozenset({"p"}), frozenset()))
    assert check_frame(m, MC.CCM).condition == "monotone"
    m = Model(1, (0,), (frozenset(),))
    assert check_frame(m, MC.CCM).condition == "reflexive"


def test_satisfies_examples():
    assert satisfies(SINGLE, 0, parse("true"))
    assert satisfies(SINGLE, 0, parse("p > q"))
    assert not satisfies(SINGLE, 0, parse("p ?> q"))
    with pytest.raises(ProfileError):
        satisfies(SINGLE, 0, parse("p ?> q"), WEISS_PROFILE)
    with pytest.raises(ValueError):
        satisfies(SINGLE, 3, parse("p"))


def test_local_and_global_clauses_differ():
    # 0 <= 1 and only 1 selects anything: the local clause ignores it.
    m = Model.build(2, leq=[(0, 1)], rel={(0, 1): [(1, 1)]})
    box, dia = parse("true > false"), parse("true ?> true")
    assert satisfies(m, 0, box, WEISS_PROFILE)
    assert not satisfies(m, 0, box, CCM_PROFILE)
    # 0 <= 1, 0 selects 0, 1 selects nothing.
    m = Model.build(2, leq=[(0, 1)], rel={(0, 1): [(0, 0)]})
    assert satisfies(m, 0, dia, OLKHOVIKOV_PROFILE)
    assert not satisfies(m, 0, dia, CCM_PROFILE)


def test_valid_in_examples():
    for s in range(30):
        m = random_model(MC.CCM, 3, s)
        assert valid_in(m, parse("true"))
        assert valid_in(m, parse("p > true"))
        assert valid_in(random_model(MC.CCM_ID, 3, s), parse("p > p"))
    assert not valid_in(NO_IDENTITY, parse("p > p"))


def test_cw_holds_pointwise():
    for s in range(100):
        m = random_model(MC.CCM, 4, s)
        f = random_formula(2, 2, True, s)
        g = random_formula(2, 2, True, s + 1)
        h = random_formula(2, 2, True, s + 2)
        for w in range(m.size):
            if satisfies(m, w, CondDiam(f, g)) and satisfies(m, w, CondBox(f, h)):
                assert satisfies(m, w, CondDiam(f, And(g, h)))


def test_random_model_contract():
    assert random_model(MC.CCM, 1, 5).size == 1
    assert random_model(MC.WEISS, 4, 9) == random_model(MC.WEISS, 4, 9)
    for s in range(50):
        assert check_frame(random_model(MC.WEISS, 4, s), MC.WEISS)
        assert check_frame(random_model(MC.CCM_MPID, 3, s), MC.CCM_MPID)
    with pytest.raises(ValueError):
        random_model(MC.CCM, 0, 1)


@pytest.mark.parametrize("cls", list(MC))
def test_generated_models_pass_frame_and_heredity(cls):
    for s in range(25):
        m = random_model(cls, 4, s)
        assert check_frame(m, cls)
        for i in range(8):
            f = random_formula(5, 3, cls.profile.diam is not None, 1000 * s + i)
            assert hereditary_check(m, cls.profile, f)


@pytest.mark.parametrize("cls", list(MC))
def test_repair_is_idempotent(cls):
    for s in range(20):
        m = random_model(cls, 3, s)
        assert repair_model(m, cls) == m


def test_repair_closes_broken_models():
    m = Model.build(3, leq=[(0, 1), (1, 2)], rel={(0, 1, 2): [(1, 2)]}, val={0: ["p"]})
    for cls in (MC.WEISS, MC.OLKHOVIKOV, MC.CCM_MP):
        fixed = repair_model(m, cls)
        assert check_frame(fixed, cls)
        assert repair_model(fixed, cls) == fixed
    with pytest.raises(ValueError):
        repair_model(Model.build(1, rel={(): [(0, 0)]}), MC.CCM_ID)


def test_countermodel_examples():
    m, w = find_countermodel(parse("p | ~p"), MC.CCM, max_worlds=2)
    assert m == EXCLUDED_MIDDLE and w == 0
    assert find_countermodel(parse("~(p ?> false)"), MC.CCM, max_worlds=3) is None
    m, w = find_countermodel(parse("~(p > ~q) -> (p ?> q)"), MC.CCM, max_worlds=4)
    assert m.size <= 4 and not satisfies(m, w, parse("~(p > ~q) -> (p ?> q)"))
    m, w = find_countermodel(parse("p > p"), MC.CCM, max_worlds=2)
    assert m == NO_IDENTITY
    assert find_countermodel(parse("p > p"), MC.CCM_ID, max_worlds=3) is None
    assert find_countermodel(parse("(p > q) -> (p -> q)"), MC.CCM_MP, max_worlds=2) is None
    m, _ = find_countermodel(parse("~~(true > false) -> (true > false)"), MC.WEISS, max_worlds=2)
    assert check_frame(m, MC.WEISS)
    assert find_countermodel(parse("~~(true > false) -> (true > false)"), MC.OLKHOVIKOV, max_worlds=2) is None


def test_mp_countermodels_are_completed():
    m, w = find_countermodel(parse("p > q"), MC.CCM_MP, max_worlds=1)
    assert check_frame(m, MC.CCM_MP)
    assert m.relation_pairs(0b1) == [(0, 0)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([MC.CCM, MC.CCM_ID, MC.WEISS, MC.OLKHOVIKOV]))
def test_countermodels_reverify(seed, cls):
    f = random_formula(4, 2, cls.profile.diam is not None, seed)
    found = find_countermodel(f, cls, max_worlds=2)
    if found is not None:
        m, w = found
        assert check_frame(m, cls)
        assert not satisfies(m, w, f, cls.profile)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(list(MC)))
def test_model_formats_round_trip(seed, cls):
    m = random_model(cls, 4, seed)
    assert parse_model(m.to_text()) == m
    assert Model.from_json(m.to_json()) == m


def test_model_text_format():
    text = "# chain\nworlds: 2\nleq: (0,1)\nrel[{0,1}]: (0,0) (1,1)\nval(1): p q\n"
    m = parse_model(text)
    assert m.leq_pairs() == [(0, 0), (0, 1), (1, 1)]
    assert m.relation_pairs(0b11) == [(0, 0), (1, 1)]
    assert m.val == (frozenset(), frozenset({"p", "q"}))
    assert m.to_text() == "worlds: 2\nleq: (0,1)\nrel[{0,1}]: (0,0) (1,1)\nval(0):\nval(1): p q\n"
    for bad in ["leq: (0,1)", "worlds: 2\nleq: (0,5)", "worlds: x", "worlds: 1\nfoo"]:
        with pytest.raises(ModelFormatError):
            parse_model(bad)


def test_profile_and_class_parsing():
    assert MC.parse("CCM-ID") is MC.CCM_ID
    with pytest.raises(ValueError):
        MC.parse("kripke")
    assert MC.WEISS.profile == SatProfile(Clause.LOCAL, None)
