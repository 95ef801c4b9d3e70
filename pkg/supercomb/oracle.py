"""
Brute-force deciders used to cross-check the fast implementations.

Each oracle restates its property from the definition and shares no search
code with the module it checks.
"""
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple
import logging

from supercomb.finitespace import FiniteSpace, PointMap, SetValuedMap
from supercomb.selection import SoftnessInstance
from supercomb.setfam import Subbase, points_of

log = logging.getLogger(__name__)

LITERAL_LIMIT = 16  # members up to which every subfamily is inspected


def _pairwise_meet(masks: Sequence[int]) -> bool:
    return all(a & b for a, b in combinations(masks, 2))


def _core(masks: Sequence[int], full: int) -> int:
    core = full
    for mask in masks:
        core &= mask
    return core


def binary_literal(sb: Subbase) -> bool:
    members = sb.members
    if len(members) > LITERAL_LIMIT:
        raise ValueError(f'{len(members)} members is too many to inspect every subfamily')
    for bits in range(1, 1 << len(members)):
        chosen = [members[i] for i in range(len(members)) if bits >> i & 1]
        if _pairwise_meet(chosen) and _core(chosen, sb.full) == 0:
            return False
    return True


def binary_shrinking(sb: Subbase) -> bool:
    """ DFS over linked subfamilies in which every new member strictly shrinks the common part """
    members = sb.members

    def search(start: int, chosen: List[int], core: int) -> bool:
        for i in range(start, len(members)):
            mask = members[i]
            if core & ~mask == 0 or not all(mask & other for other in chosen):
                continue
            if core & mask == 0:
                return True
            chosen.append(mask)
            found = search(i + 1, chosen, core & mask)
            chosen.pop()
            if found:
                return True
        return False

    return not search(0, [], sb.full)


def binary(sb: Subbase) -> bool:
    if len(sb.members) <= LITERAL_LIMIT:
        return binary_literal(sb)
    return binary_shrinking(sb)


def normal(sb: Subbase) -> bool:
    members = sb.members
    for s0, s1 in product(members, repeat=2):
        if s0 & s1:
            continue
        if not any(not s0 & t1 and not t0 & s1 and t0 | t1 == sb.full
                   for t0, t1 in product(members, repeat=2)):
            return False
    return True


def separating(sb: Subbase) -> bool:
    for x, y in product(range(sb.n), repeat=2):
        if x != y and not any(s >> x & 1 and not s >> y & 1 for s in sb.members):
            return False
    return True


def _antichains(n: int, linked: bool) -> Iterator[List[int]]:
    """ Antichains of nonempty subsets, each produced once with members ascending """
    masks = list(range(1, 1 << n))

    def grow(start: int, chosen: List[int]) -> Iterator[List[int]]:
        yield chosen
        for i in range(start, len(masks)):
            mask = masks[i]
            if any(mask & other in (mask, other) for other in chosen):
                continue
            if linked and not all(mask & other for other in chosen):
                continue
            chosen.append(mask)
            yield from grow(i + 1, chosen)
            chosen.pop()

    return grow(0, [])


def _covers(family: Sequence[int], s: int) -> bool:
    return any(m & ~s == 0 for m in family)


def mls_bruteforce(n: int) -> List[Tuple[int, ...]]:
    """ Linked antichains whose up-closure holds exactly one of each complementary pair """
    full = (1 << n) - 1
    keys = []
    for family in _antichains(n, linked=True):
        if family and all(_covers(family, s) != _covers(family, full ^ s) for s in range(1 << n)):
            keys.append(tuple(family))
    return sorted(keys)


def count_linked_antichains(k: int) -> int:
    """ Linked antichains of nonempty sets on k points, the empty antichain included """
    if k == 0:
        return 1
    return sum(1 for _ in _antichains(k, linked=True))


def count_mls_by_antichains(n: int) -> int:
    """ An MLS on n points is fixed by its members avoiding the last point """
    return count_linked_antichains(n - 1)


def _continuous(space: FiniteSpace, values: Sequence[int]) -> bool:
    for value in set(values):
        fiber = sum(1 << z for z, v in enumerate(values) if v == value)
        if not space.is_open(fiber):
            return False
    return True


def selections(phi: SetValuedMap) -> Iterator[Tuple[int, ...]]:
    for values in product(*(points_of(value) for value in phi.values)):
        if _continuous(phi.domain, values):
            yield values


def selection_exists(phi: SetValuedMap) -> bool:
    return next(selections(phi), None) is not None


def find_lift(f: PointMap, g: PointMap) -> Optional[Tuple[int, ...]]:
    for values in product(range(f.domain.size), repeat=g.domain.size):
        if all(f.values[x] == g.values[z] for z, x in enumerate(values)) and _continuous(g.domain, values):
            return values
    return None


def lift_exists(f: PointMap, g: PointMap) -> bool:
    return find_lift(f, g) is not None


def extension_exists(inst: SoftnessInstance) -> bool:
    for values in product(range(inst.f.domain.size), repeat=inst.space.size):
        if any(values[z] != x for z, x in inst.partial.items()):
            continue
        if any(inst.f.values[x] != inst.k.values[z] for z, x in enumerate(values)):
            continue
        if _continuous(inst.space, values):
            return True
    return False
