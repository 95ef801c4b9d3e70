from typing import Iterator

import pytest

from supercomb.convexity import convexify, hull, hull_mask, is_convex, xi
from supercomb.errors import EmptyTarget, NotSingleton, OutOfRangePoint
from supercomb.finitespace import FiniteSpace, SetValuedMap, is_s_continuous
from supercomb.fixtures import chain, discrete_space, s_continuous_maps, sierpinski, tri, validated_fixtures
from supercomb.setfam import mask_of, points_of


def test_hull_examples() -> None:
    assert hull(chain(3), mask_of([0, 2])).hull == mask_of([0, 1, 2])
    assert hull(chain(3), mask_of([1])).hull == mask_of([1])
    result = hull(chain(5), mask_of([1, 3]))
    assert points_of(result.hull) == [1, 2, 3]
    assert sorted(points_of(m) for m in result.supporting) == [[0, 1, 2, 3], [0, 1, 2, 3, 4], [1, 2, 3], [1, 2, 3, 4]]


def test_hull_rejects_points_outside_ground() -> None:
    with pytest.raises(OutOfRangePoint):
        hull(chain(3), mask_of([3]))


def test_is_convex() -> None:
    verdict = is_convex(chain(3), mask_of([0, 2]))
    assert verdict.witness == {'pair': [0, 2], 'hull': [0, 1, 2]}
    assert is_convex(chain(5), mask_of([1, 2, 3])).holds
    assert is_convex(chain(5), 0).holds
    assert is_convex(chain(5), mask_of([4])).holds


def test_hulls_are_convex() -> None:
    for _, sb in validated_fixtures(5):
        for mask in range(1, sb.full + 1):
            assert is_convex(sb, hull_mask(sb, mask)).holds


def submasks(mask: int) -> Iterator[int]:
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def test_hull_is_a_closure_operator() -> None:
    for name, sb in validated_fixtures(6):
        for mask in range(1, sb.full + 1):
            closed = hull_mask(sb, mask)
            assert mask & ~closed == 0, f"{name}: hull of {points_of(mask)} misses part of it"
            assert hull_mask(sb, closed) == closed, f"{name}: hull of {points_of(mask)} is not stable"
            for sub in submasks(mask):
                assert hull_mask(sb, sub) & ~closed == 0, f"{name}: hull is not monotone below {points_of(mask)}"


def test_convex_sets_are_their_own_hulls() -> None:
    for name, sb in validated_fixtures(6):
        for mask in range(1, sb.full + 1):
            assert is_convex(sb, mask).holds == (hull_mask(sb, mask) == mask), f"{name}: {points_of(mask)}"


def test_xi_examples() -> None:
    assert xi(chain(5), 3, mask_of([0, 1])) == 1
    assert xi(chain(3), 0, mask_of([0, 1])) == 0
    assert xi(chain(5), 0, mask_of([2, 4])) == 2


def test_xi_errors() -> None:
    with pytest.raises(EmptyTarget):
        xi(chain(3), 0, 0)
    with pytest.raises(OutOfRangePoint):
        xi(chain(3), 3, 1)
    with pytest.raises(NotSingleton):
        xi(tri(), 0, mask_of([1, 2]))


def test_xi_is_a_singleton_everywhere() -> None:
    """ Nearest points exist for every fixture, lie in the hull and fix points of the hull """
    for name, sb in validated_fixtures(6):
        for target in range(1, sb.full + 1):
            target_hull = hull_mask(sb, target)
            for x in range(sb.n):
                point = xi(sb, x, target)
                assert target_hull >> point & 1, f"xi leaves the hull on {name}"
                if target_hull >> x & 1:
                    assert point == x, f"xi moves a point of the hull on {name}"


def test_xi_on_chains_is_a_clamp() -> None:
    for n in range(1, 7):
        sb = chain(n)
        for target in range(1, sb.full + 1):
            low, high = points_of(target)[0], points_of(target)[-1]
            for x in range(n):
                assert xi(sb, x, target) == min(max(x, low), high)


def test_convexify() -> None:
    space = discrete_space(1)
    phi = SetValuedMap(domain=space, ground=chain(3).ground, values=(mask_of([0, 2]),))
    assert convexify(chain(3), phi).values == (mask_of([0, 1, 2]),)
    convex = SetValuedMap(domain=space, ground=chain(3).ground, values=(mask_of([1, 2]),))
    assert convexify(chain(3), convex) == convex
    constant = SetValuedMap(domain=sierpinski(), ground=chain(3).ground, values=(2, 2))
    assert convexify(chain(3), constant).values == (2, 2)


def test_convexify_preserves_s_continuity() -> None:
    sb = chain(3)
    for space in (sierpinski(), FiniteSpace.from_preorder(['p', 'q', 'r'], [(0, 1), (1, 2)])):
        for phi in s_continuous_maps(space, sb, range(1, sb.full + 1)):
            assert is_s_continuous(convexify(sb, phi), sb).holds
