from functools import lru_cache, partial
from multiprocessing import Pool
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

from pydantic import BaseModel, ConfigDict, model_validator

from supercomb.errors import EmptySet, GroundMismatch, GroundTooLarge, NotLinked, NotSingleton, OutOfRangePoint
from supercomb.finitespace import FiniteSpace, PointMap
from supercomb.setfam import (MAX_ENUM, GroundSet, SetFamily, Subbase, is_linked, mask_of,
                              points_of, popcount)

log = logging.getLogger(__name__)

MAX_LAMBDA_SUBBASE = 4

# search state: (subsets decided in, subsets decided out, next pair index)
State = Tuple[int, int, int]


class _Tables:
    """ Bit tables over the 2^n subsets of an n-point ground set """

    def __init__(self, n: int) -> None:
        self.n = n
        self.size = 1 << n
        full = self.size - 1
        self.up = [0] * self.size       # supersets of s, as a bitmask over subsets
        self.down = [0] * self.size     # subsets of s
        for s in range(self.size):
            for t in range(self.size):
                if s & ~t == 0:
                    self.up[s] |= 1 << t
                    self.down[t] |= 1 << s
        # complementary pairs, small side first, ordered by (size of small side, mask)
        reps = [s for s in range(self.size)
                if popcount(s) < popcount(full ^ s) or (popcount(s) == popcount(full ^ s) and s < full ^ s)]
        reps.sort(key=lambda s: (popcount(s), s))
        self.pair_bit = [1 << s for s in reps]
        self.in_small = [self.up[s] for s in reps]
        self.out_small = [self.down[full ^ s] for s in reps]
        self.in_large = [self.up[full ^ s] for s in reps]
        self.out_large = [self.down[s] for s in reps]
        # subsets lacking point i, with the shift that adds point i
        self.lacking = []
        for i in range(n):
            bits = 0
            for s in range(self.size):
                if not s >> i & 1:
                    bits |= 1 << s
            self.lacking.append((bits, 1 << i))


@lru_cache(maxsize=None)
def _tables(n: int) -> _Tables:
    return _Tables(n)


def _minimal_key(tables: _Tables, inn: int) -> bytes:
    """ Canonical key of an up-closed family: its minimal members, ascending """
    nonmin = 0
    for bits, shift in tables.lacking:
        nonmin |= (inn & bits) << shift
    minimal = inn & ~nonmin
    positions = []
    while minimal:
        low = minimal & -minimal
        positions.append(low.bit_length() - 1)
        minimal ^= low
    return bytes(positions)


def _children(tables: _Tables, state: State) -> Optional[List[State]]:
    """ Consistent successors of a state, or None at a leaf """
    inn, out, i = state
    decided = inn | out
    while i < len(tables.pair_bit) and decided & tables.pair_bit[i]:
        i += 1
    if i == len(tables.pair_bit):
        return None
    result = []
    for add_in, add_out in ((tables.in_small[i], tables.out_small[i]), (tables.in_large[i], tables.out_large[i])):
        child_in, child_out = inn | add_in, out | add_out
        if not child_in & child_out:
            result.append((child_in, child_out, i + 1))
    return result


def _walk(n: int, state: State, leaf: Callable[[int], None]) -> None:
    tables = _tables(n)
    pair_bit, npairs = tables.pair_bit, len(tables.pair_bit)
    in_small, out_small = tables.in_small, tables.out_small
    in_large, out_large = tables.in_large, tables.out_large

    def walk(inn: int, out: int, i: int) -> None:
        decided = inn | out
        while i < npairs and decided & pair_bit[i]:
            i += 1
        if i == npairs:
            leaf(inn)
            return
        # a consistent partial state never blocks both sides of a pair
        child_in, child_out = inn | in_small[i], out | out_small[i]
        if not child_in & child_out:
            walk(child_in, child_out, i + 1)
        child_in, child_out = inn | in_large[i], out | out_large[i]
        if not child_in & child_out:
            walk(child_in, child_out, i + 1)

    walk(*state)


def _count_subtree(n: int, state: State) -> int:
    counter = [0]

    def leaf(_: int) -> None:
        counter[0] += 1

    _walk(n, state, leaf)
    return counter[0]


def _group_seed(tables: _Tables, v: int) -> Optional[State]:
    """ Root state of the systems whose numerically smallest minimal member is v, or None if there are none """
    full = tables.size - 1
    inn, out = tables.up[v], tables.down[full ^ v]
    # every smaller mask is absent, so its complement is present
    for s in range(1, v):
        inn |= tables.up[full ^ s]
        out |= tables.down[s]
    if inn & out:
        return None
    return inn, out, 0


def _group_keys(n: int, v: int) -> List[bytes]:
    tables = _tables(n)
    seed = _group_seed(tables, v)
    keys: List[bytes] = []
    if seed is not None:
        _walk(n, seed, lambda inn: keys.append(_minimal_key(tables, inn)))
    keys.sort()
    return keys


def _frontier(n: int, branches: int, root: State = (0, 0, 0)) -> List[State]:
    """ Split the search tree into at least `branches` disjoint subtrees where possible """
    tables = _tables(n)
    states = [root]
    while len(states) < branches:
        expanded: List[State] = []
        progressed = False
        for state in states:
            children = _children(tables, state)
            if children is None:
                expanded.append(state)
            else:
                expanded.extend(children)
                progressed = True
        states = expanded
        if not progressed:
            break
    return states


def _check_enumerable(n: int) -> None:
    if not 1 <= n <= MAX_ENUM:
        raise GroundTooLarge(n, MAX_ENUM)


def count_mls(n: int, par: int = 1, branches: int = 8) -> int:
    """ Number of maximal linked systems on n points, without materialising them """
    _check_enumerable(n)
    if par <= 1:
        return _count_subtree(n, (0, 0, 0))
    states = _frontier(n, max(branches, par))
    log.info('counting MLS(%d) over %d subtrees with %d workers', n, len(states), par)
    with Pool(par) as pool:
        return sum(pool.starmap(_count_subtree, [(n, state) for state in states]))


def iter_mls_keys(n: int, par: int = 1) -> Iterator[Tuple[int, ...]]:
    """ Canonical minimal-antichain keys in ascending order, identical for every par

    Keys are produced one group at a time, a group holding the systems that share their smallest
    minimal member, so only the current group is ever held in memory.
    """
    _check_enumerable(n)
    masks = range(1, 1 << n)
    if par <= 1:
        for v in masks:
            for key in _group_keys(n, v):
                yield tuple(key)
        return
    log.info('enumerating MLS(%d) over %d groups with %d workers', n, len(masks), par)
    with Pool(par) as pool:
        for group in pool.imap(partial(_group_keys, n), masks):
            for key in group:
                yield tuple(key)


class MLS(BaseModel):
    model_config = ConfigDict(frozen=True)

    ground: GroundSet       # the ground set X
    minimal: SetFamily      # antichain of inclusion-minimal members

    @model_validator(mode='after')
    def _check_maximal_linked(self) -> 'MLS':
        if self.minimal.ground != self.ground:
            raise ValueError('minimal members live on a different ground set')
        _check_enumerable(self.ground.n)
        members = self.minimal.members
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if not a & b:
                    raise ValueError(f'{points_of(a)} and {points_of(b)} are disjoint')
                if a & b in (a, b):
                    raise ValueError(f'{points_of(a)} and {points_of(b)} are comparable')
        tables = _tables(self.ground.n)
        up = 0
        for mask in members:
            up |= tables.up[mask]
        full = self.ground.full
        for s in range(tables.size):
            if (up >> s & 1) == (up >> (full ^ s) & 1):
                raise ValueError(f'exactly one of {points_of(s)} and its complement must be a member')
        return self

    @property
    def key(self) -> Tuple[int, ...]:
        return self.minimal.members

    @property
    def label(self) -> str:
        return '|'.join(''.join(str(p) for p in points_of(mask)) for mask in self.minimal.members)


def _from_key(ground: GroundSet, key: Sequence[int]) -> MLS:
    # keys produced by the search satisfy every MLS invariant
    return MLS.model_construct(ground=ground, minimal=SetFamily.model_construct(ground=ground, members=tuple(key)))


class Superextension(BaseModel):
    model_config = ConfigDict(frozen=True)

    ground: GroundSet               # the ground set X
    elements: Tuple[MLS, ...]       # all MLS over X in canonical order

    @model_validator(mode='after')
    def _check_order(self) -> 'Superextension':
        keys = [eta.key for eta in self.elements]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError('elements must be strictly ascending by canonical key')
        return self

    def index(self) -> Dict[Tuple[int, ...], int]:
        return {eta.key: idx for idx, eta in enumerate(self.elements)}

    def plus_sets(self) -> List[Tuple[int, ...]]:
        """ F+ for every nonempty F, indexed by the mask of F minus one """
        return [plus_set(mask, self) for mask in range(1, self.ground.full + 1)]


def mls_contains(eta: MLS, mask: int) -> bool:
    eta.ground.check(mask)
    return any(not member & ~mask for member in eta.minimal.members)


def mls_complete(linked: SetFamily) -> List[MLS]:
    """ Every MLS whose up-closure contains all members of a linked family """
    if not is_linked(linked):
        raise NotLinked('family is not linked')
    n = linked.ground.n
    _check_enumerable(n)
    tables = _tables(n)
    inn = out = 0
    for mask in linked.members:
        inn |= tables.up[mask]
        out |= tables.down[linked.ground.full ^ mask]
    keys: List[bytes] = []
    _walk(n, (inn, out, 0), lambda family: keys.append(_minimal_key(tables, family)))
    return [_from_key(linked.ground, key) for key in sorted(keys)]


def enumerate_mls(n: int, par: int = 1) -> Superextension:
    ground = GroundSet(n=n)
    elements = tuple(_from_key(ground, key) for key in iter_mls_keys(n, par))
    log.info('enumerated %d MLS on %d points', len(elements), n)
    return Superextension.model_construct(ground=ground, elements=elements)


def eta(x: int, n: int) -> MLS:
    """ The principal system of all sets containing x """
    if not 0 <= x < n:
        raise OutOfRangePoint(x, n)
    ground = GroundSet(n=n)
    return MLS(ground=ground, minimal=SetFamily(ground=ground, members=(1 << x,)))


def plus_set(mask: int, lam: Superextension) -> Tuple[int, ...]:
    lam.ground.check(mask)
    if mask == 0:
        raise EmptySet('F+ needs a nonempty F')
    return tuple(idx for idx, element in enumerate(lam.elements) if mls_contains(element, mask))


def lambda_subbase(lam: Superextension) -> Subbase:
    """ The family {F+} as a subbase on the index set of the superextension """
    if lam.ground.n > MAX_LAMBDA_SUBBASE:
        raise GroundTooLarge(lam.ground.n, MAX_LAMBDA_SUBBASE)
    members = {mask_of(plus) for plus in lam.plus_sets()}
    ground = GroundSet(n=len(lam.elements))
    return Subbase(family=SetFamily(ground=ground, members=tuple(sorted(members))))


def lambda_map(f: Sequence[int], m: int, system: MLS) -> MLS:
    """ lambda f: B belongs to the image exactly when its preimage belongs to the system """
    n = system.ground.n
    if len(f) != n:
        raise GroundMismatch(f'map has {len(f)} values for {n} points')
    for value in f:
        if not 0 <= value < m:
            raise OutOfRangePoint(value, m)
    target = GroundSet(n=m)
    image = set()
    for mask in range(1, target.full + 1):
        preimage = mask_of(x for x in range(n) if mask >> f[x] & 1)
        if preimage and mls_contains(system, preimage):
            image.add(mask)
    minimal = sorted(mask for mask in image
                     if not any(mask >> j & 1 and mask ^ 1 << j in image for j in range(m)))
    return MLS(ground=target, minimal=SetFamily(ground=target, members=tuple(minimal)))


def lambda_point_map(f: Sequence[int], m: int, lam_x: Superextension, lam_y: Superextension) -> PointMap:
    """ lambda f as a map between the discrete superextensions """
    index_y = lam_y.index()
    values = tuple(index_y[lambda_map(f, m, element).key] for element in lam_x.elements)
    domain = FiniteSpace.discrete(len(lam_x.elements), [element.label for element in lam_x.elements])
    return PointMap(domain=domain, codomain=GroundSet(n=len(lam_y.elements)), values=values)


def retract(sb: Subbase, system: MLS) -> int:
    """ r(eta): the point pinned down by the subbase members the system contains """
    if sb.n != system.ground.n:
        raise GroundMismatch(f'subbase lives on {sb.n} points, system on {system.ground.n}')
    core = sb.full
    for member in sb.members:
        if mls_contains(system, member):
            core &= member
    if core == 0 or core & (core - 1):
        raise NotSingleton(f'r({system.label})', points_of(core))
    return core.bit_length() - 1


def mls_to_points(system: MLS) -> List[List[int]]:
    return system.minimal.as_lists()


def mls_from_points(n: int, lists: Sequence[Sequence[int]]) -> MLS:
    ground = GroundSet(n=n)
    masks = set()
    for points in lists:
        for point in points:
            if not 0 <= point < n:
                raise OutOfRangePoint(point, n)
        masks.add(mask_of(points))
    return MLS(ground=ground, minimal=SetFamily(ground=ground, members=tuple(sorted(masks))))


def mls_graph(lam: Superextension) -> List[Tuple[int, int]]:
    """ Pairs of systems whose minimal antichains differ by one member on each side """
    keys = [frozenset(element.key) for element in lam.elements]
    edges = []
    for i, a in enumerate(keys):
        for j in range(i + 1, len(keys)):
            b = keys[j]
            if len(a - b) <= 1 and len(b - a) <= 1:
                edges.append((i, j))
    return edges
