from abc import ABCMeta, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import random

from pydantic import BaseModel, ConfigDict, model_validator

from supercomb.convexity import is_convex, xi
from supercomb.errors import (GroundMismatch, HypothesisFailed, InternalXiFailure, NotALift, NotClosed, NotExtendable,
                              NotSingleton, PreconditionFailed, SelectionInvariantError)
from supercomb.finitespace import (FiniteSpace, PointMap, SetValuedMap, codomain_size, components,
                                   compose_fibers, is_continuous, is_s_continuous, is_s_convex_map,
                                   is_s_open, subspace)
from supercomb.setfam import GroundSet, Subbase, Verdict, points_of, validate_subbase
from supercomb.superext import MLS, eta, lambda_map, retract

log = logging.getLogger(__name__)


class BasePointRule(metaclass=ABCMeta):

    @abstractmethod
    def select_point(self, phi: SetValuedMap) -> int:
        """ Choose the base point x0 from the value at the first domain point """


class SmallestPointRule(BasePointRule):

    def select_point(self, phi: SetValuedMap) -> int:
        if not phi.values:
            return 0
        return points_of(phi.values[0])[0]


class RandomPointRule(BasePointRule):

    def __init__(self, seed: Optional[int] = None) -> None:
        self.rng = random.Random(seed)

    def select_point(self, phi: SetValuedMap) -> int:
        if not phi.values:
            return 0
        return self.rng.choice(points_of(phi.values[0]))


def _check_closed(space: FiniteSpace, closed: int, partial: Dict[int, int]) -> None:
    if not space.is_open(space.full & ~closed):
        raise ValueError(f'{space.names(closed)} is not closed')
    if sorted(partial) != points_of(closed):
        raise ValueError('partial map must be defined exactly on the closed set')


class SelectionInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    space: FiniteSpace          # the domain Z
    closed: int                 # the closed set A
    partial: Dict[int, int]     # the selection g on A
    phi: SetValuedMap           # the set-valued map
    subbase: Subbase            # the subbase S on X

    @model_validator(mode='after')
    def _check_instance(self) -> 'SelectionInstance':
        if self.phi.domain != self.space:
            raise ValueError('phi is defined on a different space')
        if self.phi.ground != self.subbase.ground:
            raise ValueError('phi and the subbase live on different ground sets')
        _check_closed(self.space, self.closed, self.partial)
        for z, value in self.partial.items():
            if not self.phi.values[z] >> value & 1:
                raise ValueError(f'g({self.space.points[z]!r}) = {value} is not in phi')
        return self


class SoftnessInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    f: PointMap                 # the surjection X -> Y
    space: FiniteSpace          # the domain Z
    closed: int                 # the closed set A
    k: PointMap                 # the map Z -> Y
    partial: Dict[int, int]     # the partial lift h on A

    @model_validator(mode='after')
    def _check_instance(self) -> 'SoftnessInstance':
        if self.k.domain != self.space:
            raise ValueError('k is defined on a different space')
        if self.k.codomain != self.f.codomain:
            raise ValueError('k and f have different codomains')
        _check_closed(self.space, self.closed, self.partial)
        for z, value in self.partial.items():
            if not 0 <= value < self.f.domain.size:
                raise ValueError(f'h({self.space.points[z]!r}) = {value} leaves X')
            if self.f.values[value] != self.k.values[z]:
                raise ValueError(f'f(h({self.space.points[z]!r})) differs from k')
        if not is_continuous(self.k).holds:
            raise ValueError('k is not continuous')
        kept = points_of(self.closed)
        h = PointMap(domain=subspace(self.space, self.closed), codomain=GroundSet(n=self.f.domain.size),
                     values=tuple(self.partial[z] for z in kept))
        if not is_continuous(h).holds:
            raise ValueError('h is not continuous on A')
        return self


def extend_total(space: FiniteSpace, closed: int, partial: Dict[int, int], ground: GroundSet) -> PointMap:
    """ Continuous extension of g to Z, constant on each component """
    if not space.is_open(space.full & ~closed):
        raise NotClosed(space.names(closed))
    assigned: Dict[int, int] = {}
    for part in components(space):
        seen = sorted({partial[z] for z in part if z in partial})
        if len(seen) > 1:
            raise NotExtendable([space.points[z] for z in part], seen)
        for z in part:
            assigned[z] = seen[0] if seen else 0
    values = [assigned[z] for z in range(space.size)]
    return PointMap(domain=space, codomain=ground, values=tuple(values))


def _check_preconditions(phi: SetValuedMap, sb: Subbase) -> None:
    verdict = validate_subbase(sb)
    if not verdict.holds:
        raise PreconditionFailed('BadSubbase', verdict)
    verdict = is_s_continuous(phi, sb)
    if not verdict.holds:
        raise PreconditionFailed('NotSContinuous', verdict)
    for z, value in enumerate(phi.values):
        verdict = is_convex(sb, value)
        if not verdict.holds:
            assert verdict.witness is not None
            raise PreconditionFailed('NotConvexValue',
                                     Verdict.fail({'point': phi.domain.points[z], **verdict.witness}))


def _assemble(phi: SetValuedMap, sb: Subbase, bases: Sequence[int]) -> PointMap:
    values = []
    for z, value in enumerate(phi.values):
        try:
            values.append(xi(sb, bases[z], value))
        except NotSingleton as exc:
            raise InternalXiFailure(str(exc)) from exc
    h = PointMap(domain=phi.domain, codomain=phi.ground, values=tuple(values))
    for z, value in enumerate(h.values):
        if not phi.values[z] >> value & 1:
            raise SelectionInvariantError(f'h({phi.domain.points[z]!r}) = {value} is not in phi')
    verdict = is_continuous(h)
    if not verdict.holds:
        raise SelectionInvariantError(f'selection is not continuous: {verdict.witness}')
    return h


def select(space: FiniteSpace, phi: SetValuedMap, sb: Subbase,
           rule: Optional[BasePointRule] = None) -> PointMap:
    """ h(z) = xi(x0, Phi(z)) for a base point x0 in Phi(z0) """
    if phi.domain != space:
        raise GroundMismatch('phi is defined on a different space')
    _check_preconditions(phi, sb)
    base = (rule or SmallestPointRule()).select_point(phi)
    log.debug('selecting with base point %d', base)
    return _assemble(phi, sb, [base] * space.size)


def select_extend(inst: SelectionInstance, rule: Optional[BasePointRule] = None) -> PointMap:
    """ h(z) = xi(g_bar(z), Phi(z)) where g_bar extends the selection on A """
    if inst.closed == 0:
        return select(inst.space, inst.phi, inst.subbase, rule)
    _check_preconditions(inst.phi, inst.subbase)
    extension = extend_total(inst.space, inst.closed, inst.partial, inst.phi.ground)
    h = _assemble(inst.phi, inst.subbase, extension.values)
    for z, value in inst.partial.items():
        if h.values[z] != value:
            raise SelectionInvariantError(f'selection moves g at {inst.space.points[z]!r}')
    return h


def _check_hypotheses(f: PointMap, sb: Subbase) -> Tuple[str, ...]:
    if f.domain.size != sb.n:
        raise GroundMismatch(f'map is defined on {f.domain.size} points, subbase on {sb.n}')
    verdict = validate_subbase(sb)
    if not verdict.holds:
        raise HypothesisFailed('BadSubbase', verdict)
    opened = is_s_open(f, sb)
    if not opened.holds:
        raise HypothesisFailed('NotSOpen', opened)
    verdict = is_s_convex_map(f, sb)
    if not verdict.holds:
        raise HypothesisFailed('NotSConvex', verdict)
    return opened.notes


def check_invertible(f: PointMap, sb: Subbase, corpus: Sequence[Tuple[FiniteSpace, PointMap]]) -> Verdict:
    """ Every g: Z -> Y in the corpus lifts through f via a selection of f^-1 o g """
    notes = _check_hypotheses(f, sb)
    for entry, (space, g) in enumerate(corpus):
        if g.domain != space or g.codomain != f.codomain:
            raise GroundMismatch(f'corpus entry {entry} does not map its space into the codomain of f')
        phi = compose_fibers(f, g)
        try:
            h = select(space, phi, sb)
        except PreconditionFailed as exc:
            return Verdict.fail({'entry': entry, 'reason': exc.kind, 'detail': exc.verdict.witness})
        if tuple(f.values[x] for x in h.values) != g.values:
            return Verdict.fail({'entry': entry, 'reason': 'composition', 'selection': list(h.values)})
    log.info('checked %d invertibility entries', len(corpus))
    return Verdict.ok(*notes)


def check_soft(f: PointMap, sb: Subbase, instances: Sequence[SoftnessInstance]) -> Verdict:
    """ Every partial lift h on a closed A extends to a lift g of k """
    notes: List[str] = list(_check_hypotheses(f, sb))
    for entry, inst in enumerate(instances):
        if inst.f != f:
            raise GroundMismatch(f'instance {entry} is built for a different map')
        phi = compose_fibers(f, inst.k)
        problem = SelectionInstance(space=inst.space, closed=inst.closed, partial=inst.partial, phi=phi, subbase=sb)
        try:
            g = select_extend(problem)
        except NotExtendable as exc:
            notes.append(f'instance {entry}: h does not extend over component {exc.component}')
            continue
        except PreconditionFailed as exc:
            return Verdict.fail({'entry': entry, 'reason': exc.kind, 'detail': exc.verdict.witness})
        if not is_continuous(g).holds:
            return Verdict.fail({'entry': entry, 'reason': 'continuity', 'lift': list(g.values)})
        if any(g.values[z] != value for z, value in inst.partial.items()):
            return Verdict.fail({'entry': entry, 'reason': 'extension', 'lift': list(g.values)})
        if tuple(f.values[x] for x in g.values) != inst.k.values:
            return Verdict.fail({'entry': entry, 'reason': 'composition', 'lift': list(g.values)})
    return Verdict.ok(*notes)


def lift_project(f: PointMap, sb: Subbase, g: PointMap, lifts: Sequence[MLS]) -> PointMap:
    """ g_bar = r o g1 for a lift g1 of g through lambda f """
    if f.domain.size != sb.n:
        raise GroundMismatch(f'map is defined on {f.domain.size} points, subbase on {sb.n}')
    if len(lifts) != g.domain.size:
        raise GroundMismatch(f'{len(lifts)} lifts for {g.domain.size} points')
    verdict = validate_subbase(sb)
    if not verdict.holds:
        raise HypothesisFailed('BadSubbase', verdict)
    verdict = is_s_convex_map(f, sb)
    if not verdict.holds:
        raise HypothesisFailed('NotSConvex', verdict)
    m = codomain_size(f.codomain)
    values = []
    for z, system in enumerate(lifts):
        if lambda_map(f.values, m, system).key != eta(g.values[z], m).key:
            raise NotALift(g.domain.points[z])
        point = retract(sb, system)
        if f.values[point] != g.values[z]:
            raise SelectionInvariantError(f'r(g1({g.domain.points[z]!r})) leaves the fiber of g')
        values.append(point)
    return PointMap(domain=g.domain, codomain=sb.ground, values=tuple(values))
