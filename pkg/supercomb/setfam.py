from enum import Enum
from functools import lru_cache, reduce
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator

from supercomb.errors import OutOfRangePoint

log = logging.getLogger(__name__)

MAX_GROUND = 24     # bit-vector width for set operations
MAX_ENUM = 7        # superextension enumeration


def mask_of(points: Iterable[int]) -> int:
    mask = 0
    for point in points:
        mask |= 1 << point
    return mask


def points_of(mask: int) -> List[int]:
    points = []
    while mask:
        low = mask & -mask
        points.append(low.bit_length() - 1)
        mask ^= low
    return points


def popcount(mask: int) -> int:
    return bin(mask).count('1')


class GroundSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int  # number of points, the points are 0..n-1

    @model_validator(mode='after')
    def _check_size(self) -> 'GroundSet':
        if not 1 <= self.n <= MAX_GROUND:
            raise ValueError(f'ground set size must lie in 1..{MAX_GROUND}, got {self.n}')
        return self

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def check(self, mask: int) -> int:
        """ Return the mask unchanged, or raise if it has bits outside the ground set """
        if mask < 0 or mask & ~self.full:
            raise OutOfRangePoint(max(points_of(mask & ~self.full)) if mask > 0 else -1, self.n)
        return mask


class SetFamily(BaseModel):
    model_config = ConfigDict(frozen=True)

    ground: GroundSet           # the ground set {0..n-1}
    members: Tuple[int, ...]    # strictly ascending nonempty masks

    @model_validator(mode='after')
    def _check_members(self) -> 'SetFamily':
        previous = 0
        for mask in self.members:
            if mask <= previous:
                raise ValueError('members must be nonempty and strictly ascending')
            if mask & ~self.ground.full:
                raise ValueError(f'member {points_of(mask)} leaves the ground set of {self.ground.n} points')
            previous = mask
        return self

    def __len__(self) -> int:
        return len(self.members)

    def as_lists(self) -> List[List[int]]:
        return [points_of(mask) for mask in self.members]


class Strictness(str, Enum):
    VANMILL = 'vanmill'            # nonempty members only
    PAPER_STRICT = 'paperstrict'   # additionally closed under union and nonempty intersection


class Subbase(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: SetFamily                           # the members of S
    strictness: Strictness = Strictness.VANMILL  # validation profile

    @classmethod
    def from_lists(cls, n: int, raw: Sequence[Sequence[int]], strictness: Strictness = Strictness.VANMILL,
                   notes: Optional[List[str]] = None) -> 'Subbase':
        return cls(family=normalize_family(raw, GroundSet(n=n), notes), strictness=strictness)

    @property
    def ground(self) -> GroundSet:
        return self.family.ground

    @property
    def n(self) -> int:
        return self.family.ground.n

    @property
    def full(self) -> int:
        return self.family.ground.full

    @property
    def members(self) -> Tuple[int, ...]:
        return self.family.members


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    holds: bool                                 # true if the property holds
    witness: Optional[Dict[str, Any]] = None    # first counterexample in search order
    notes: Tuple[str, ...] = ()                 # remarks that do not affect the outcome

    @model_validator(mode='after')
    def _check_witness(self) -> 'Verdict':
        if self.holds != (self.witness is None):
            raise ValueError('a verdict holds exactly when it has no witness')
        return self

    @classmethod
    def ok(cls, *notes: str) -> 'Verdict':
        return cls(holds=True, notes=notes)

    @classmethod
    def fail(cls, witness: Dict[str, Any]) -> 'Verdict':
        return cls(holds=False, witness=witness)


def normalize_family(raw: Sequence[Sequence[int]], ground: GroundSet,
                     notes: Optional[List[str]] = None) -> SetFamily:
    """ Build the canonical family: duplicates and empty sets dropped, masks ascending """
    masks = set()
    dropped = 0
    for points in raw:
        for point in points:
            if not 0 <= point < ground.n:
                raise OutOfRangePoint(point, ground.n)
        mask = mask_of(points)
        if mask == 0:
            dropped += 1
            continue
        masks.add(mask)
    if dropped:
        log.info('dropped %d empty set(s) from family', dropped)
        if notes is not None:
            notes.append(f'dropped {dropped} empty set(s)')
    return SetFamily(ground=ground, members=tuple(sorted(masks)))


def lattice_close(fam: SetFamily) -> SetFamily:
    members = set(fam.members)
    frontier = sorted(members)
    while frontier:
        found = set()
        current = sorted(members)
        for a in frontier:
            for b in current:
                for mask in (a | b, a & b):
                    if mask and mask not in members:
                        found.add(mask)
        members |= found
        frontier = sorted(found)
    return SetFamily(ground=fam.ground, members=tuple(sorted(members)))


def is_linked(fam: SetFamily) -> bool:
    members = fam.members
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if not a & b:
                return False
    return True


def _intersection(masks: Iterable[int], full: int) -> int:
    return reduce(lambda a, b: a & b, masks, full)


@lru_cache(maxsize=1024)
def is_binary(sb: Subbase) -> Verdict:
    """ Every linked subfamily has a common point; only maximal linked subfamilies are inspected """
    graph = nx.Graph()
    graph.add_nodes_from(sb.members)
    members = sb.members
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if a & b:
                graph.add_edge(a, b)
    failing = []
    for clique in nx.find_cliques(graph):
        if _intersection(clique, sb.full) == 0:
            failing.append(tuple(sorted(clique)))
    if not failing:
        return Verdict.ok()
    first = min(failing)
    return Verdict.fail({'subfamily': [points_of(mask) for mask in first]})


def find_screen(sb: Subbase, s0: int, s1: int) -> Optional[Tuple[int, int]]:
    """ First (T0, T1) with S0∩T1 = ∅ = T0∩S1 and T0∪T1 = X, or None """
    left = [t for t in sb.members if not t & s1]
    right = [t for t in sb.members if not t & s0]
    for t0 in left:
        for t1 in right:
            if t0 | t1 == sb.full:
                return t0, t1
    return None


@lru_cache(maxsize=1024)
def is_normal(sb: Subbase) -> Verdict:
    members = sb.members
    for i, s0 in enumerate(members):
        for s1 in members[i + 1:]:
            if s0 & s1:
                continue
            if find_screen(sb, s0, s1) is None:
                return Verdict.fail({'pair': [points_of(s0), points_of(s1)]})
    return Verdict.ok()


@lru_cache(maxsize=1024)
def is_point_separating(sb: Subbase) -> Verdict:
    for x in range(sb.n):
        residual = _intersection((s for s in sb.members if s >> x & 1), sb.full)
        if residual != 1 << x:
            return Verdict.fail({'point': x, 'residual': points_of(residual)})
    return Verdict.ok()


def lattice_closure_witness(fam: SetFamily) -> Verdict:
    present = set(fam.members)
    members = fam.members
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if a | b not in present:
                return Verdict.fail({'operation': 'union', 'pair': [points_of(a), points_of(b)],
                                     'missing': points_of(a | b)})
            if a & b and a & b not in present:
                return Verdict.fail({'operation': 'intersection', 'pair': [points_of(a), points_of(b)],
                                     'missing': points_of(a & b)})
    return Verdict.ok()


@lru_cache(maxsize=1024)
def validate_subbase(sb: Subbase) -> Verdict:
    checks = [('binary', is_binary), ('normal', is_normal), ('point-separating', is_point_separating)]
    for axiom, check in checks:
        verdict = check(sb)
        if not verdict.holds:
            return Verdict.fail({'axiom': axiom, 'detail': verdict.witness})
    if sb.strictness == Strictness.PAPER_STRICT:
        verdict = lattice_closure_witness(sb.family)
        if not verdict.holds:
            assert verdict.witness is not None
            return Verdict.fail({'axiom': f"{verdict.witness['operation']}-closure", 'detail': verdict.witness})
        return Verdict.ok()
    return Verdict.ok('lattice closure not required under the vanmill profile')
