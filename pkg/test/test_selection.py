from itertools import product
from typing import Iterator

import pytest

from supercomb import oracle
from supercomb.convexity import convexify
from supercomb.errors import GroundMismatch, HypothesisFailed, NotALift, NotClosed, NotExtendable, PreconditionFailed
from supercomb.finitespace import FiniteSpace, PointMap, SetValuedMap, is_continuous, is_s_convex_map
from supercomb.fixtures import (chain, continuous_maps, discrete_space, invertibility_corpus, s_continuous_convex_maps,
                                s_continuous_maps, sierpinski, softness_corpus, topologies, tri, validated_fixtures)
from supercomb.selection import (RandomPointRule, SelectionInstance, SmallestPointRule, SoftnessInstance,
                                 check_invertible, check_soft, extend_total, lift_project, select, select_extend)
from supercomb.setfam import GroundSet, Subbase, mask_of
from supercomb.superext import enumerate_mls, eta, lambda_map, lambda_point_map, lambda_subbase, mls_from_points

DELTA = mls_from_points(3, [[0, 1], [0, 2], [1, 2]])


def ground_map(values: tuple, m: int) -> PointMap:
    n = len(values)
    return PointMap(domain=FiniteSpace.discrete(n, [str(i) for i in range(n)]), codomain=GroundSet(n=m),
                    values=values)


def test_extend_total() -> None:
    ground = GroundSet(n=3)
    assert extend_total(sierpinski(), mask_of([1]), {1: 2}, ground).values == (2, 2)
    assert extend_total(discrete_space(2), mask_of([0]), {0: 0}, ground).values == (0, 0)
    assert extend_total(discrete_space(2), 0, {}, ground).values == (0, 0)
    with pytest.raises(NotClosed):
        extend_total(sierpinski(), mask_of([0]), {0: 1}, ground)
    with pytest.raises(NotExtendable):
        extend_total(FiniteSpace.indiscrete(2), 3, {0: 0, 1: 1}, ground)


def test_select_examples() -> None:
    sb = chain(3)
    phi = SetValuedMap(domain=discrete_space(2), ground=sb.ground, values=(mask_of([0, 1]), mask_of([1, 2])))
    assert select(discrete_space(2), phi, sb).values == (0, 1)
    full = SetValuedMap(domain=sierpinski(), ground=sb.ground, values=(7, 7))
    assert select(sierpinski(), full, sb).values == (0, 0)


def test_select_preconditions() -> None:
    sb = chain(3)
    phi = SetValuedMap(domain=sierpinski(), ground=sb.ground, values=(7, 3))
    with pytest.raises(PreconditionFailed) as info:
        select(sierpinski(), phi, sb)
    assert info.value.kind == 'NotSContinuous'
    assert info.value.verdict.witness['member'] == [2]
    split = SetValuedMap(domain=discrete_space(1), ground=sb.ground, values=(5,))
    with pytest.raises(PreconditionFailed) as info:
        select(discrete_space(1), split, sb)
    assert info.value.kind == 'NotConvexValue'
    with pytest.raises(PreconditionFailed) as info:
        select(discrete_space(1), SetValuedMap(domain=discrete_space(1), ground=tri().ground, values=(1,)), tri())
    assert info.value.kind == 'BadSubbase'


def test_every_base_point_rule_gives_a_selection() -> None:
    sb = chain(4)
    for space in topologies(2):
        for phi in s_continuous_convex_maps(space, sb):
            for rule in (SmallestPointRule(), RandomPointRule(seed=7)):
                h = select(space, phi, sb, rule)
                assert is_continuous(h).holds
                assert all(phi.values[z] >> x & 1 for z, x in enumerate(h.values))


def test_select_extend_examples() -> None:
    sb = chain(3)
    space = discrete_space(2)
    phi = SetValuedMap(domain=space, ground=sb.ground, values=(mask_of([0, 1]), mask_of([1, 2])))
    inst = SelectionInstance(space=space, closed=mask_of([0]), partial={0: 1}, phi=phi, subbase=sb)
    assert select_extend(inst).values == (1, 1)
    empty = SelectionInstance(space=space, closed=0, partial={}, phi=phi, subbase=sb)
    assert select_extend(empty) == select(space, phi, sb)
    whole = SelectionInstance(space=space, closed=3, partial={0: 1, 1: 2}, phi=phi, subbase=sb)
    assert select_extend(whole).values == (1, 2)


def test_selection_instance_validation() -> None:
    sb = chain(3)
    phi = SetValuedMap(domain=sierpinski(), ground=sb.ground, values=(3, 3))
    with pytest.raises(ValueError):
        SelectionInstance(space=sierpinski(), closed=mask_of([0]), partial={0: 0}, phi=phi, subbase=sb)
    with pytest.raises(ValueError):
        SelectionInstance(space=sierpinski(), closed=mask_of([1]), partial={1: 2}, phi=phi, subbase=sb)
    with pytest.raises(ValueError):
        SelectionInstance(space=sierpinski(), closed=mask_of([1]), partial={}, phi=phi, subbase=sb)


def test_selection_agrees_with_bruteforce() -> None:
    for _, sb in validated_fixtures(3):
        for space in topologies(1) + topologies(2) + topologies(3):
            for phi in s_continuous_convex_maps(space, sb):
                assert oracle.selection_exists(phi)
                h = select(space, phi, sb)
                assert h.values in set(oracle.selections(phi))


@pytest.mark.slow
def test_selection_sweep_on_four_point_spaces() -> None:
    for _, sb in validated_fixtures(4):
        for space in topologies(4):
            for phi in s_continuous_convex_maps(space, sb):
                h = select(space, phi, sb)
                assert h.values in set(oracle.selections(phi))


def test_convexified_maps_have_selections() -> None:
    sb = chain(3)
    for space in topologies(2):
        for phi in s_continuous_maps(space, sb, range(1, 8)):
            psi = convexify(sb, phi)
            h = select(space, psi, sb)
            assert all(psi.values[z] >> x & 1 for z, x in enumerate(h.values))


def test_check_invertible() -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    corpus = invertibility_corpus(f.codomain, 3)
    assert check_invertible(f, sb, corpus).holds
    assert all(oracle.lift_exists(f, g) for _, g in corpus)
    identity = ground_map((0, 1, 2), 3)
    assert check_invertible(identity, sb, invertibility_corpus(identity.codomain, 2)).holds
    with pytest.raises(HypothesisFailed) as info:
        check_invertible(ground_map((0, 1, 0), 2), sb, corpus)
    assert info.value.kind == 'NotSConvex'
    assert info.value.verdict.witness['fiber'] == [0, 2]
    with pytest.raises(HypothesisFailed) as info:
        check_invertible(ground_map((0, 1, 1), 2), tri(), corpus)
    assert info.value.kind == 'BadSubbase'


def test_check_soft() -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    k = PointMap(domain=sierpinski(), codomain=f.codomain, values=(0, 0))
    inst = SoftnessInstance(f=f, space=sierpinski(), closed=mask_of([1]), k=k, partial={1: 0})
    verdict = check_soft(f, sb, [inst])
    assert verdict.holds
    assert oracle.extension_exists(inst)
    with pytest.raises(HypothesisFailed):
        check_soft(ground_map((0, 1, 0), 2), sb, [])


def test_check_soft_reduces_to_invertibility_without_constraints() -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    instances = [SoftnessInstance(f=f, space=space, closed=0, k=g, partial={})
                 for space, g in invertibility_corpus(f.codomain, 2)]
    assert check_soft(f, sb, instances).holds


def test_check_soft_agrees_with_bruteforce() -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    for inst in softness_corpus(f, 3):
        verdict = check_soft(f, sb, [inst])
        assert verdict.holds
        unresolved = any('does not extend' in note for note in verdict.notes)
        assert unresolved != oracle.extension_exists(inst)


def test_softness_instance_validation() -> None:
    f = ground_map((0, 1, 1), 2)
    k = PointMap(domain=sierpinski(), codomain=f.codomain, values=(0, 0))
    with pytest.raises(ValueError):
        SoftnessInstance(f=f, space=sierpinski(), closed=mask_of([1]), k=k, partial={1: 2})
    jump = PointMap(domain=sierpinski(), codomain=f.codomain, values=(0, 1))
    with pytest.raises(ValueError):
        SoftnessInstance(f=f, space=sierpinski(), closed=0, k=jump, partial={})


def test_lift_project() -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    point = discrete_space(1)
    g = PointMap(domain=point, codomain=f.codomain, values=(1,))
    assert lift_project(f, sb, g, [DELTA]).values == (1,)
    with pytest.raises(NotALift):
        lift_project(f, sb, PointMap(domain=point, codomain=f.codomain, values=(0,)), [DELTA])
    assert lift_project(ground_map((0, 1, 2), 3), sb, PointMap(domain=point, codomain=GroundSet(n=3), values=(1,)),
                        [eta(1, 3)]).values == (1,)


def s_convex_surjections(sb: Subbase) -> Iterator[PointMap]:
    for m in range(1, sb.n + 1):
        for values in product(range(m), repeat=sb.n):
            f = ground_map(values, m)
            if len(set(values)) == m and is_s_convex_map(f, sb).holds:
                yield f


def test_lift_project_on_every_lift() -> None:
    """ f o r o g1 = g for every lift g1 of g through lambda f """
    for _, sb in validated_fixtures(3):
        systems = enumerate_mls(sb.n).elements
        for f in s_convex_surjections(sb):
            m = max(f.values) + 1
            lifts = {y: [s for s in systems if lambda_map(f.values, m, s) == eta(y, m)] for y in range(m)}
            for space in topologies(1) + topologies(2):
                for g in continuous_maps(space, f.codomain):
                    for chosen in product(*(lifts[y] for y in g.values)):
                        bar = lift_project(f, sb, g, chosen)
                        assert tuple(f.values[x] for x in bar.values) == g.values


def test_lambda_maps_are_invertible_and_soft() -> None:
    """ lambda f between superextensions lifts every corpus map and extends every extendable partial lift """
    lam_x = enumerate_mls(3)
    sb = lambda_subbase(lam_x)
    for m in (1, 2, 3):
        lam_y = enumerate_mls(m)
        for f in product(range(m), repeat=3):
            if len(set(f)) < m or (m == 3 and f != (1, 2, 0)):
                continue
            big_f = lambda_point_map(f, m, lam_x, lam_y)
            corpus = invertibility_corpus(big_f.codomain, 2)
            assert check_invertible(big_f, sb, corpus).holds, f"lambda {f} is not invertible"
            assert all(oracle.lift_exists(big_f, g) for _, g in corpus)
            for inst in softness_corpus(big_f, 2):
                verdict = check_soft(big_f, sb, [inst])
                assert verdict.holds, f"lambda {f} fails softness on {inst.partial}"
                unresolved = any('does not extend' in note for note in verdict.notes)
                assert unresolved != oracle.extension_exists(inst)


def test_ground_mismatch() -> None:
    f = ground_map((0, 1, 1), 2)
    with pytest.raises(GroundMismatch):
        check_invertible(f, chain(5), [])
    with pytest.raises(GroundMismatch):
        check_soft(f, chain(5), [])
    g = PointMap(domain=discrete_space(1), codomain=f.codomain, values=(1,))
    with pytest.raises(GroundMismatch):
        lift_project(f, chain(5), g, [DELTA])
    with pytest.raises(GroundMismatch):
        lift_project(f, chain(3), g, [DELTA, DELTA])
    wide = PointMap(domain=discrete_space(1), codomain=GroundSet(n=3), values=(2,))
    with pytest.raises(GroundMismatch):
        check_invertible(f, chain(3), [(discrete_space(1), wide)])
    k = PointMap(domain=sierpinski(), codomain=f.codomain, values=(0, 0))
    foreign = SoftnessInstance(f=ground_map((0, 0, 1), 2), space=sierpinski(), closed=0, k=k, partial={})
    with pytest.raises(GroundMismatch):
        check_soft(f, chain(3), [foreign])
