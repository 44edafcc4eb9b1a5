import itertools

import pytest

from polymeasure.core import Map, STAR, carrier
from polymeasure.functor import (
    apply_to_set,
    automaton_functor,
    bintree_functor,
    bounded_tree_functor,
    const_monoid_functor,
    identity_functor,
    list_functor,
    maybe_functor,
    trivial_monoid,
    unit_functor,
    z_mod,
)
from polymeasure.fixpoints import (
    AdamekResult,
    Algebra,
    INF,
    adamek,
    algebra,
    bisim_partition,
    cata,
    coalgebra,
    enumerate_algebra_homs,
    enumerate_algebras,
    is_preinitial,
    is_subterminal,
    lambek_check,
    list_alg,
    list_coalg,
    maybe_index,
    nat_automaton,
    nat_lazy,
    node,
    quotient_algebra,
    reachable_set,
    std_alg,
    std_coalg,
    subcoalgebras,
    tree_alg,
    tree_coalg,
    unfold,
    unique_hom_from_preinitial,
    witness_terms,
)

from conftest import random_coalgebra


def succ_term(n):
    t = node("Zero")
    for _ in range(n):
        t = node("Succ", t)
    return t


class TestCata:
    def test_truncation_clamps(self):
        assert cata(succ_term(2), std_alg(1)) == 1  # min(2, 1)

    def test_terminal_algebra_collapses_everything(self):
        one = algebra(maybe_functor(), [STAR], lambda pos, args: STAR)
        assert cata(succ_term(5), one) == STAR

    def test_list_length_fold(self):
        lst = list_functor(z_mod(2))
        length = algebra(
            lst, range(4), lambda pos, args: 0 if not args else min(args[0] + 1, 3)
        )
        t = node(1, node(0, node(1, node("nil"))))
        assert cata(t, length) == 3

    def test_cata_commutes_with_homomorphisms(self):
        # the defining uniqueness property, on every hom found by search
        a, b = std_alg(3), std_alg(1)
        for h in enumerate_algebra_homs(a, b):
            for n in range(6):
                assert h(cata(succ_term(n), a)) == cata(succ_term(n), b)


class TestUnfold:
    def test_std_coalg_index(self):
        c = std_coalg(4)
        for k in range(5):
            assert maybe_index(c, k) == k

    def test_self_loop_has_exact_infinite_index(self):
        loop = coalgebra(maybe_functor(), ["s"], lambda s: ("Succ", ("s",)))
        assert maybe_index(loop, "s") == INF
        assert not unfold(loop, "s", 5).total

    def test_list_unfold_recovers_the_list(self):
        lf = list_functor(z_mod(2))
        c = list_coalg(lf, 2)
        behavior = unfold(c, (1, 0), 5)
        assert behavior.total
        assert behavior.tree == (1, ((0, (("nil", ()),)),))

    def test_homomorphisms_preserve_index(self):
        c = std_coalg(3)
        target = nat_automaton(5)
        from polymeasure.measuring import find_coalgebra_homs

        homs = find_coalgebra_homs(c, target, limit=2)
        assert len(homs) == 1
        assert all(maybe_index(target, homs[0](k)) == k for k in range(4))


class TestAdamek:
    def test_const_monoid_stabilizes_with_carrier_x(self):
        result = adamek(const_monoid_functor(z_mod(3)), "forward", 6)
        assert result.stabilized
        assert len(result.fixpoint.carrier) == 3

    def test_unit_functor_initial_algebra_is_a_point(self):
        result = adamek(unit_functor(), "forward", 6)
        assert result.stabilized
        assert len(result.fixpoint.carrier) == 1
        ok, witness = lambek_check(result, hom_size=3)
        assert ok, witness

    def test_maybe_never_stabilizes(self):
        fwd = adamek(maybe_functor(), "forward", 5)
        assert not fwd.stabilized
        assert [len(s) for s in fwd.stages] == [0, 1, 2, 3, 4, 5]
        bwd = adamek(maybe_functor(), "backward", 5)
        assert not bwd.stabilized
        assert [len(s) for s in bwd.stages] == [1, 2, 3, 4, 5, 6]

    def test_forward_stages_embed(self):
        for functor in (maybe_functor(), list_functor(z_mod(2)), bintree_functor(z_mod(2))):
            result = adamek(functor, "forward", 3)
            for connect in result.maps:
                assert len(set(connect.images)) == len(connect.images)

    def test_lambek_rejects_corrupted_structure(self):
        good = adamek(const_monoid_functor(z_mod(2)), "forward", 4)
        fix = good.fixpoint
        corrupt = Algebra(
            fix.functor,
            fix.carrier,
            Map.from_callable(fix.structure.dom, fix.carrier, lambda e: fix.carrier.elements[0]),
        )
        bad = AdamekResult("forward", good.stages, good.maps, True, corrupt)
        ok, witness = lambek_check(bad, hom_size=1)
        assert not ok
        assert witness[0] == "structure map not bijective"

    def test_identity_functor_has_empty_initial_algebra(self):
        result = adamek(identity_functor(), "forward", 3)
        assert result.stabilized
        assert len(result.fixpoint.carrier) == 0


class TestPreinitial:
    def test_std_alg_is_preinitial(self):
        for n in range(4):
            a = std_alg(n)
            assert reachable_set(a) == frozenset(a.carrier)
            assert is_preinitial(a)

    def test_disjoint_fixed_point_is_unreachable(self):
        a = algebra(
            maybe_functor(),
            [0, 1, "w"],
            lambda pos, args: 0 if pos == "Zero" else ("w" if args[0] == "w" else min(args[0] + 1, 1)),
        )
        assert not is_preinitial(a)
        assert set(a.carrier) - reachable_set(a) == {"w"}

    def test_list_truncation_is_preinitial(self):
        assert is_preinitial(list_alg(list_functor(z_mod(2)), 2))

    def test_tree_truncations_are_preinitial(self):
        assert is_preinitial(tree_alg(bintree_functor(z_mod(2)), 1))
        assert is_preinitial(tree_alg(bounded_tree_functor(trivial_monoid(), 2), 1))

    def test_reachable_set_is_an_idempotent_closure(self, rng):
        from conftest import random_algebra
        from polymeasure.core import Map, carrier as mk_carrier
        from polymeasure.functor import apply_to_set

        for _ in range(6):
            a = random_algebra(maybe_functor(), rng.randrange(1, 5), rng)
            reached = reachable_set(a)
            if not reached:
                continue
            sub = mk_carrier(reached)
            restricted = Algebra(
                a.functor,
                sub,
                Map.from_callable(apply_to_set(a.functor, sub), sub, a.structure),
            )
            assert reachable_set(restricted) == reached


class TestBisimulation:
    def test_std_coalg_is_discrete(self):
        assert is_subterminal(std_coalg(3))

    def test_duplicated_self_loops_collapse(self):
        c = coalgebra(
            maybe_functor(), ["s", "t"], lambda s: ("Succ", ("t" if s == "s" else "s",))
        )
        assert bisim_partition(c) == (("s", "t"),)
        assert not is_subterminal(c)

    def test_list_coalg_is_discrete(self):
        assert is_subterminal(list_coalg(list_functor(z_mod(2)), 2))

    def test_partition_matches_behavioral_equivalence(self, rng):
        # oracle: states are bisimilar iff their unfoldings to depth |C|+1
        # agree once truncation markers are anonymized
        from polymeasure.core import Tag

        def scrub(tree):
            if isinstance(tree, Tag):
                return Tag("cut", "?")
            pos, children = tree
            return (pos, tuple(scrub(t) for t in children))

        for functor in (maybe_functor(), list_functor(z_mod(2))):
            for _ in range(8):
                c = random_coalgebra(functor, rng.choice([2, 3, 4]), rng)
                depth = len(c.carrier) + 1
                classes = bisim_partition(c)
                block = {s: i for i, cls in enumerate(classes) for s in cls}
                for s, t in itertools.combinations(c.carrier.elements, 2):
                    same = scrub(unfold(c, s, depth).tree) == scrub(unfold(c, t, depth).tree)
                    assert same == (block[s] == block[t])


class TestSubcoalgebras:
    def test_empty_coalgebra_has_only_itself(self):
        empty = coalgebra(maybe_functor(), (), {})
        assert [len(s.carrier) for s in subcoalgebras(empty)] == [0]

    def test_nat_automaton_families(self):
        k = 3
        subs = subcoalgebras(nat_automaton(k))
        kinds = set()
        for sub in subs:
            states = set(sub.carrier)
            finite = {s for s in states if s != "inf"}
            assert finite == set(range(len(finite)))  # downward closed
            has_inf = "inf" in states
            if not states:
                kinds.add("empty")
            elif states == set(range(k + 1)) | {"inf"}:
                kinds.add("all-with-infinity")
            elif states == set(range(k + 1)):
                kinds.add("all-finite")
            elif has_inf and not finite:
                kinds.add("infinity-only")
            elif has_inf:
                kinds.add("bounded-with-infinity")
            else:
                kinds.add("bounded")
        assert kinds == {
            "empty",
            "bounded",
            "infinity-only",
            "bounded-with-infinity",
            "all-finite",
            "all-with-infinity",
        }
        assert len(subs) == 2 * (k + 2)

    def test_list_subcoalgebras_are_tail_closed(self):
        lf = list_functor(z_mod(2))
        c = list_coalg(lf, 2)
        subs = subcoalgebras(c)
        # oracle: brute-force count of tail-closed subsets
        elems = c.carrier.elements
        count = 0
        for mask in range(2 ** len(elems)):
            subset = {elems[i] for i in range(len(elems)) if mask >> i & 1}
            if all(xs[1:] in subset for xs in subset if xs):
                count += 1
        assert len(subs) == count


class TestQuotient:
    def test_identifying_top_elements_truncates(self):
        q, proj = quotient_algebra(std_alg(5), [(4, 5)])
        assert len(q.carrier) == 5
        hom = unique_hom_from_preinitial(std_alg(4), q)
        assert hom is not None and set(hom.images) == set(q.carrier)

    def test_empty_pairs_give_isomorphic_copy(self):
        a = std_alg(3)
        q, proj = quotient_algebra(a, [])
        assert q.carrier == a.carrier
        assert q.structure.images == a.structure.images

    def test_list_take_quotient(self):
        lf = list_functor(z_mod(2))
        a = list_alg(lf, 3)
        pairs = [(xs, xs[:2]) for xs in a.carrier if len(xs) == 3]
        q, proj = quotient_algebra(a, pairs)
        assert len(q.carrier) == 7  # lists of length <= 2
        b = list_alg(lf, 2)
        hom = unique_hom_from_preinitial(b, q)
        assert hom is not None

    def test_congruence_closure_propagates_upward(self):
        # identifying 0 ~ 1 in std_alg(3) forces 1 ~ 2 ~ 3
        q, proj = quotient_algebra(std_alg(3), [(0, 1)])
        assert len(q.carrier) == 1


class TestWitnessTerms:
    def test_every_reachable_element_has_a_term(self):
        a = std_alg(3)
        terms = witness_terms(a)
        assert set(terms) == set(a.carrier)
        for element, term in terms.items():
            assert cata(term, a) == element

    def test_unique_hom_exists_iff_compatible(self):
        # there is no total homomorphism std_alg(1) -> nat (the lazy initial)
        assert unique_hom_from_preinitial(std_alg(1), nat_lazy()) is None
        # but std_alg(3) -> std_alg(1) exists and clamps
        hom = unique_hom_from_preinitial(std_alg(3), std_alg(1))
        assert hom is not None and hom.images == (0, 1, 1, 1)


def test_enumerate_algebras_counts():
    maybe = maybe_functor()
    # |F(B)|'s per size: 2 -> 2^1? sizes m: count = m^(1+m)
    assert len(enumerate_algebras(maybe, 2)) == 1 ** 2 + 2 ** 3
