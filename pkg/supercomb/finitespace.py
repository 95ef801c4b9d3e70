from functools import lru_cache
from typing import FrozenSet, Iterable, List, Sequence, Tuple, Union
import logging

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator

from supercomb.convexity import is_convex
from supercomb.errors import EmptyValue, NotSurjective
from supercomb.setfam import GroundSet, Subbase, Verdict, mask_of, points_of

log = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _open_lookup(opens: Tuple[int, ...]) -> FrozenSet[int]:
    return frozenset(opens)


def is_topology(points: Sequence[str], opens: Iterable[int]) -> Verdict:
    full = (1 << len(points)) - 1
    family = sorted(set(opens))
    present = set(family)
    for required in (0, full):
        if required not in present:
            return Verdict.fail({'missing': points_of(required)})
    if len(present) == 1 << len(points) and family[-1] == full:
        return Verdict.ok()
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            for mask in (a | b, a & b):
                if mask not in present:
                    return Verdict.fail({'missing': points_of(mask)})
    return Verdict.ok()


class FiniteSpace(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: Tuple[str, ...]     # point names, index = position
    opens: Tuple[int, ...]      # all open sets as ascending masks, including empty and full

    @model_validator(mode='after')
    def _check_topology(self) -> 'FiniteSpace':
        if len(set(self.points)) != len(self.points):
            raise ValueError('point names must be distinct')
        if list(self.opens) != sorted(set(self.opens)):
            raise ValueError('open sets must be strictly ascending')
        if any(mask & ~self.full for mask in self.opens):
            raise ValueError('open set leaves the point set')
        verdict = is_topology(self.points, self.opens)
        if not verdict.holds:
            raise ValueError(f'not a topology, missing open set {verdict.witness}')
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def is_open(self, mask: int) -> bool:
        return mask in _open_lookup(self.opens)

    def index(self, name: str) -> int:
        return self.points.index(name)

    def names(self, mask: int) -> List[str]:
        return [self.points[i] for i in points_of(mask)]

    def minimal_open(self, z: int) -> int:
        result = self.full
        for mask in self.opens:
            if mask >> z & 1:
                result &= mask
        return result

    def clopens(self) -> List[int]:
        opens = _open_lookup(self.opens)
        return [mask for mask in self.opens if self.full ^ mask in opens]

    @classmethod
    def discrete(cls, size: int, names: Sequence[str] = ()) -> 'FiniteSpace':
        points = tuple(names) if names else tuple(f'z{i}' for i in range(size))
        return cls(points=points, opens=tuple(range(1 << size)))

    @classmethod
    def indiscrete(cls, size: int, names: Sequence[str] = ()) -> 'FiniteSpace':
        points = tuple(names) if names else tuple(f'z{i}' for i in range(size))
        return cls(points=points, opens=(0, (1 << size) - 1))

    @classmethod
    def generated(cls, points: Sequence[str], subbasis: Iterable[int]) -> 'FiniteSpace':
        """ Coarsest topology in which every given set is open """
        full = (1 << len(points)) - 1
        basis = {full}
        for mask in subbasis:
            basis |= {mask & b for b in basis} | {mask}
        opens = {0}
        for b in sorted(basis):
            opens |= {b | o for o in opens}
        return cls(points=tuple(points), opens=tuple(sorted(opens)))

    @classmethod
    def from_preorder(cls, points: Sequence[str], relations: Iterable[Tuple[int, int]]) -> 'FiniteSpace':
        """ Alexandrov topology of a preorder: (x, y) means x <= y, open sets are up-sets """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(points)))
        graph.add_edges_from(relations)
        closure = nx.transitive_closure(graph, reflexive=True)
        up = [mask_of(closure.successors(x)) for x in range(len(points))]
        return cls.generated(points, up)

    @classmethod
    def disjoint_union(cls, first: 'FiniteSpace', second: 'FiniteSpace') -> 'FiniteSpace':
        shift = first.size
        opens = sorted({a | b << shift for a in first.opens for b in second.opens})
        return cls(points=first.points + second.points, opens=tuple(opens))


def subspace(space: FiniteSpace, mask: int) -> FiniteSpace:
    """ Subspace topology on the points of mask, re-indexed in ascending order """
    kept = points_of(mask)
    opens = {mask_of(i for i, z in enumerate(kept) if u >> z & 1) for u in space.opens}
    return FiniteSpace(points=tuple(space.points[z] for z in kept), opens=tuple(sorted(opens)))


class PointMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    domain: FiniteSpace                         # source space
    codomain: Union[GroundSet, FiniteSpace]     # discrete ground set or finite space
    values: Tuple[int, ...]                     # image of each domain point

    @model_validator(mode='after')
    def _check_values(self) -> 'PointMap':
        if len(self.values) != self.domain.size:
            raise ValueError(f'map has {len(self.values)} values for {self.domain.size} points')
        size = codomain_size(self.codomain)
        for idx, value in enumerate(self.values):
            if not 0 <= value < size:
                raise ValueError(f'value {value} at {self.domain.points[idx]!r} leaves the codomain')
        return self

    def preimage(self, mask: int) -> int:
        return mask_of(z for z, value in enumerate(self.values) if mask >> value & 1)

    def image(self, mask: int) -> int:
        return mask_of(self.values[z] for z in points_of(mask))


class SetValuedMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    domain: FiniteSpace         # the space Z
    ground: GroundSet           # the discrete space X
    values: Tuple[int, ...]     # Phi(z) as nonempty masks

    @model_validator(mode='after')
    def _check_values(self) -> 'SetValuedMap':
        if len(self.values) != self.domain.size:
            raise ValueError(f'map has {len(self.values)} values for {self.domain.size} points')
        for idx, value in enumerate(self.values):
            if value == 0:
                raise ValueError(f'value at {self.domain.points[idx]!r} is empty')
            if value & ~self.ground.full:
                raise ValueError(f'value at {self.domain.points[idx]!r} leaves the ground set')
        return self


def codomain_size(codomain: Union[GroundSet, FiniteSpace]) -> int:
    return codomain.n if isinstance(codomain, GroundSet) else codomain.size


def as_space(codomain: Union[GroundSet, FiniteSpace]) -> FiniteSpace:
    if isinstance(codomain, GroundSet):
        return FiniteSpace.discrete(codomain.n, [str(i) for i in range(codomain.n)])
    return codomain


@lru_cache(maxsize=1024)
def components(space: FiniteSpace) -> Tuple[Tuple[int, ...], ...]:
    """ Connected components, ordered by smallest point """
    clopens = space.clopens()
    graph = nx.Graph()
    graph.add_nodes_from(range(space.size))
    for i in range(space.size):
        for j in range(i + 1, space.size):
            if all((c >> i & 1) == (c >> j & 1) for c in clopens):
                graph.add_edge(i, j)
    return tuple(sorted(tuple(sorted(part)) for part in nx.connected_components(graph)))


def is_continuous(h: PointMap) -> Verdict:
    if isinstance(h.codomain, GroundSet):
        for part in components(h.domain):
            values = sorted({h.values[z] for z in part})
            if len(values) > 1:
                return Verdict.fail({'component': [h.domain.points[z] for z in part], 'values': values})
        return Verdict.ok()
    for mask in h.codomain.opens:
        preimage = h.preimage(mask)
        if not h.domain.is_open(preimage):
            return Verdict.fail({'open': h.codomain.names(mask), 'preimage': h.domain.names(preimage)})
    return Verdict.ok()


def is_s_continuous(phi: SetValuedMap, sb: Subbase) -> Verdict:
    for member in sb.members:
        outside = sb.full & ~member
        hits = mask_of(z for z, value in enumerate(phi.values) if value & outside)
        if not phi.domain.is_open(hits):
            return Verdict.fail({'member': points_of(member), 'set': 'hits', 'points': phi.domain.names(hits)})
        inside = mask_of(z for z, value in enumerate(phi.values) if not value & member)
        if not phi.domain.is_open(inside):
            return Verdict.fail({'member': points_of(member), 'set': 'contained',
                                 'points': phi.domain.names(inside)})
    return Verdict.ok()


def _opens_of(space: Union[GroundSet, FiniteSpace]) -> Iterable[int]:
    if isinstance(space, GroundSet):
        return range(1 << space.n)
    return space.opens


def is_lsc(phi: SetValuedMap, space: Union[GroundSet, FiniteSpace]) -> Verdict:
    for mask in _opens_of(space):
        hits = mask_of(z for z, value in enumerate(phi.values) if value & mask)
        if not phi.domain.is_open(hits):
            return Verdict.fail({'open': points_of(mask), 'points': phi.domain.names(hits)})
    return Verdict.ok()


def is_usc(phi: SetValuedMap, space: Union[GroundSet, FiniteSpace]) -> Verdict:
    for mask in _opens_of(space):
        inside = mask_of(z for z, value in enumerate(phi.values) if not value & ~mask)
        if not phi.domain.is_open(inside):
            return Verdict.fail({'open': points_of(mask), 'points': phi.domain.names(inside)})
    return Verdict.ok()


def _check_surjective(f: PointMap) -> None:
    missing = sorted(set(range(codomain_size(f.codomain))) - set(f.values))
    if missing:
        raise NotSurjective(missing)


def is_s_open(f: PointMap, sb: Subbase) -> Verdict:
    _check_surjective(f)
    if isinstance(f.codomain, GroundSet):
        return Verdict.ok('vacuous: every subset of a discrete codomain is open')
    for member in sb.members:
        image = f.image(sb.full & ~member)
        if not f.codomain.is_open(image):
            return Verdict.fail({'member': points_of(member), 'image': f.codomain.names(image)})
    return Verdict.ok()


def is_s_convex_map(f: PointMap, sb: Subbase) -> Verdict:
    for y in range(codomain_size(f.codomain)):
        fiber = f.preimage(1 << y)
        verdict = is_convex(sb, fiber)
        if not verdict.holds:
            assert verdict.witness is not None
            return Verdict.fail({'point': y, 'fiber': points_of(fiber), **verdict.witness})
    return Verdict.ok()


def fiber_map(f: PointMap) -> SetValuedMap:
    _check_surjective(f)
    size = codomain_size(f.codomain)
    values = tuple(f.preimage(1 << y) for y in range(size))
    return SetValuedMap(domain=as_space(f.codomain), ground=GroundSet(n=f.domain.size), values=values)


def compose_fibers(f: PointMap, g: PointMap) -> SetValuedMap:
    """ Phi(z) = f^-1(g(z)) """
    fibers = [f.preimage(1 << y) for y in range(codomain_size(f.codomain))]
    for z, y in enumerate(g.values):
        if fibers[y] == 0:
            raise EmptyValue(g.domain.points[z])
    return SetValuedMap(domain=g.domain, ground=GroundSet(n=f.domain.size),
                        values=tuple(fibers[y] for y in g.values))
