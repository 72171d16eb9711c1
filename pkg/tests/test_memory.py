import pytest

from instances import MIXED_ALPHABET, memory_instances
from pomcka.core import EMPTY, Load, PartialString, Store, antichain, chain
from pomcka.errors import MalformedRf, PreconditionError
from pomcka.memory import (
    BOTTOM,
    RfMap,
    all_rf_maps,
    check_axioms,
    find_races,
    hb_stores,
    is_sc_relaxed,
    lift_rf,
    lub_hb_stores,
    rf_candidates,
    sc_relaxed_restrict,
    theorem3_equivalence,
    with_initializers,
)
from pomcka.program import ONE, Program, enumerate_closure
from pomcka.samples import message_passing, message_passing_n

ACQ = Load("acquire", "r0", "a")
REL = Store("release", "a", 1)
REL0 = Store("release", "a", 0)
ST = Store("none", "a", 1)
LD = Load("none", "r1", "a")


class TestScRelaxed:
    def test_message_passing_is_not(self):
        assert not is_sc_relaxed(message_passing())

    def test_n_shape_is(self):
        assert is_sc_relaxed(message_passing_n())

    def test_vacuous(self):
        assert is_sc_relaxed(antichain("a", "b"))
        assert is_sc_relaxed(PartialString([ST, LD]))

    def test_unordered_releases(self):
        assert not is_sc_relaxed(PartialString([REL, REL0]))
        assert is_sc_relaxed(PartialString([REL, REL0], [(0, 1)]))


class TestHb:
    def test_n_shape_acquire_sees_nothing(self):
        x = message_passing_n()
        assert hb_stores(x, 0) == frozenset()
        assert lub_hb_stores(x, 0) is BOTTOM

    def test_single_store(self):
        x = PartialString([ST, LD], [(0, 1)])
        assert hb_stores(x, 1) == {0}
        assert lub_hb_stores(x, 1) == 0

    def test_two_ordered_stores(self):
        x = PartialString([REL0, REL, ACQ], [(0, 1), (1, 2)])
        assert hb_stores(x, 2) == {0, 1}
        assert lub_hb_stores(x, 2) == 1

    def test_diamond_has_no_lub(self):
        x = PartialString(["t", REL, REL0, ACQ], [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert hb_stores(x, 3) == {1, 2}
        assert lub_hb_stores(x, 3) is None

    def test_other_address_ignored(self):
        x = PartialString([Store("release", "b", 1), ACQ], [(0, 1)])
        assert hb_stores(x, 1) == frozenset()

    def test_sync_scope_skips_plain_stores(self):
        x = PartialString([ST, ACQ], [(0, 1)])
        assert hb_stores(x, 1, "all") == {0}
        assert hb_stores(x, 1, "sync") == frozenset()

    def test_non_load(self):
        with pytest.raises(PreconditionError):
            hb_stores(PartialString([ST]), 0)


class TestRf:
    def test_candidates(self):
        x = PartialString([REL, ACQ, REL0], [(0, 1)])
        assert rf_candidates(x, 1) == [0, 2]
        y = PartialString([REL, ACQ])
        assert rf_candidates(y, 1) == [0, BOTTOM]
        z = PartialString([ST, ACQ], [(0, 1)])
        assert rf_candidates(z, 1) == [BOTTOM]
        assert rf_candidates(z, 1, "all") == [0]

    def test_malformed(self):
        x = PartialString([REL, ACQ, Store("release", "b", 1)], [(0, 1)])
        with pytest.raises(MalformedRf, match="not total"):
            check_axioms(x, RfMap({}))
        with pytest.raises(MalformedRf, match="different addresses"):
            check_axioms(x, RfMap({1: 2}))
        with pytest.raises(MalformedRf, match="cannot read"):
            check_axioms(x, RfMap({1: BOTTOM}))
        with pytest.raises(MalformedRf, match="non-store"):
            check_axioms(x, RfMap({1: 1}))
        with pytest.raises(MalformedRf, match="non-load"):
            check_axioms(x, RfMap({1: 0, 0: 0}))

    def test_acquire_cannot_read_plain_store(self):
        x = PartialString([ST, ACQ])
        with pytest.raises(MalformedRf):
            check_axioms(x, RfMap({1: 0}))

    def test_all_maps(self):
        x = PartialString([REL, ACQ, REL0, LD])
        maps = list(all_rf_maps(x))
        # the acquire: two releases or bottom; the plain load: the same three
        assert len(maps) == 9


class TestAxioms:
    def test_n_shape_with_initializers(self):
        x, inits = with_initializers(message_passing_n())
        assert x.name(inits["b"]) == "init_b" and len(x) == 6
        acq = x.index_of("e0")
        ld = x.index_of("e1")
        rf = RfMap({acq: inits["b"], ld: inits["a"]})
        rep = check_axioms(x, rf)
        assert rep.sw and rep.wc and rep.fr
        assert rep.weak_rc and rep.strong_rc and rep.sc_relaxed
        assert rep.witnesses == []
        assert theorem3_equivalence(x, rf)

    def test_lift_rf(self):
        x = message_passing_n()
        y, inits = with_initializers(x)
        lifted = lift_rf(x, RfMap({0: BOTTOM, 1: BOTTOM}), inits)
        assert inits == {"a": 0, "b": 1}
        assert lifted.targets == {2: 1, 3: 0}
        assert check_axioms(y, lifted).strong_rc

    def test_stale_read(self):
        # s ⪯ s' ⪯ l and l reads s
        x = PartialString([REL0, REL, ACQ], [(0, 1), (1, 2)])
        rep = check_axioms(x, RfMap({2: 0}))
        assert rep.sw and rep.wc
        assert not rep.fr and not rep.weak_rc and not rep.strong_rc
        assert ("fr", 2, 0, 1) in rep.witnesses
        assert rep.sc_relaxed
        assert theorem3_equivalence(x, RfMap({2: 0}))

    def test_read_from_future(self):
        x = PartialString([ACQ, REL], [(0, 1)])
        rep = check_axioms(x, RfMap({0: 1}))
        assert not rep.sw and not rep.strong_rc
        assert ("sw", 0, 1) in rep.witnesses

    def test_unordered_releases_break_wc(self):
        x = PartialString([REL, REL0, ACQ], [(0, 2)])
        rep = check_axioms(x, RfMap({2: 0}))
        assert not rep.wc and not rep.sc_relaxed
        assert ("wc", 0, 1) in rep.witnesses

    def test_vacuous(self):
        x = chain("a", "b")
        rep = check_axioms(x, RfMap({}))
        assert all((rep.sw, rep.wc, rep.fr, rep.weak_rc, rep.strong_rc, rep.sc_relaxed))
        assert theorem3_equivalence(x, RfMap({}))
        assert theorem3_equivalence(EMPTY, RfMap({}))

    def test_flags_have_witnesses(self):
        for x, rf in memory_instances(3, MIXED_ALPHABET):
            rep = check_axioms(x, rf)
            kinds = {w[0] for w in rep.witnesses}
            for flag in ("sw", "wc", "fr", "sc_relaxed"):
                if not getattr(rep, flag):
                    assert flag in kinds
            if not rep.weak_rc:
                assert kinds & {"weak_rc", "no-lub"}
            if not rep.strong_rc:
                assert kinds & {"strong_rc", "no-lub"}

    def test_to_dict_names_events(self):
        x = PartialString([REL0, REL, ACQ], [(0, 1), (1, 2)], ["s", "t", "l"])
        d = check_axioms(x, RfMap({2: 0})).to_dict(x)
        assert d["fr"] is False
        assert ["fr", "l", "s", "t"] in d["witnesses"]

    def test_all_scope_includes_plain_accesses(self):
        x = PartialString([ST, LD, Store("none", "a", 0)], [(0, 1)])
        rf = RfMap({1: 0})
        assert check_axioms(x, rf, "sync").wc
        assert not check_axioms(x, rf, "all").wc


@pytest.fixture(scope="module")
def reports():
    return [(x, rf, check_axioms(x, rf)) for x, rf in memory_instances(4, MIXED_ALPHABET)]


class TestPropositions:
    """Small exhaustive sweep; the acceptance run covers five events."""

    def test_lub_exists_under_coherence(self, reports):
        for x, rf, rep in reports:
            if rep.wc:
                for l in rf:
                    if x.labels[l].is_acquire:
                        assert lub_hb_stores(x, l, "sync") is not None

    def test_weak_rc_dual_form(self, reports):
        for x, rf, rep in reports:
            if not rep.wc:
                continue
            acqs = [l for l in rf if x.labels[l].is_acquire]
            rels = [s for s in x.events if isinstance(x.labels[s], Store) and x.labels[s].is_release]
            dual = all(
                rf[l] is not BOTTOM and x.leq(s2, rf[l])
                for l in acqs for s2 in rels if x.leq(s2, l)
            )
            assert rep.weak_rc == dual

    def test_weak_rc_is_fr_on_sc_relaxed(self, reports):
        for x, rf, rep in reports:
            if rep.sc_relaxed:
                assert rep.weak_rc == rep.fr

    def test_strong_is_weak_and_sw(self, reports):
        for x, rf, rep in reports:
            assert rep.strong_rc == (rep.weak_rc and rep.sw)

    def test_axioms_imply_sc_relaxed(self, reports):
        for x, rf, rep in reports:
            if rep.sw and rep.wc and rep.fr:
                assert rep.sc_relaxed

    def test_equivalence(self, reports):
        for x, rf, _ in reports:
            assert theorem3_equivalence(x, rf)


class TestRestrict:
    def test_message_passing_closure(self):
        got = sc_relaxed_restrict(Program([message_passing()]), 4)
        closure = enumerate_closure(Program([message_passing()]), 4)
        assert 0 < len(got) < len(closure)
        assert message_passing_n().canonical() in {s.canonical() for s in got}
        assert message_passing().canonical() not in {s.canonical() for s in got}
        assert all(is_sc_relaxed(s) for s in got)

    def test_one(self):
        assert sc_relaxed_restrict(ONE, 0) == [EMPTY]

    def test_opaque_is_unrestricted(self):
        P = Program([antichain("a", "b")])
        assert len(sc_relaxed_restrict(P, 2)) == len(enumerate_closure(P, 2)) == 3


class TestRaces:
    def test_n_shape(self):
        x = message_passing_n()
        assert find_races(x) == [(1, 2)]
        assert str(x.labels[1]) == "r1:=[a]_none" and str(x.labels[2]) == "[a]_none:=1"

    def test_chain(self):
        x = PartialString([ST, LD], [(0, 1)])
        assert find_races(x) == []

    def test_read_read(self):
        assert find_races(PartialString([LD, Load("none", "r2", "a")])) == []

    def test_sync_members_excluded(self):
        assert find_races(PartialString([REL, LD])) == []
        assert find_races(PartialString([ST, Store("none", "a", 0)])) == [(0, 1)]
