from __future__ import annotations

from functools import lru_cache
from typing import TYPE_CHECKING, Tuple
import logging

from pydantic import BaseModel, ConfigDict, model_validator

from supercomb.errors import EmptyTarget, EmptyValue, NotSingleton, OutOfRangePoint
from supercomb.setfam import Subbase, Verdict, points_of

if TYPE_CHECKING:
    from supercomb.finitespace import SetValuedMap

log = logging.getLogger(__name__)


class ConvexHullResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    input: int                      # the set B
    hull: int                       # I_S(B)
    supporting: Tuple[int, ...]     # members of S containing B, ascending

    @model_validator(mode='after')
    def _check_hull(self) -> 'ConvexHullResult':
        if self.input & ~self.hull:
            raise ValueError('hull must contain its input')
        return self


@lru_cache(maxsize=65536)
def _hull_mask(members: Tuple[int, ...], full: int, mask: int) -> int:
    result = full
    for member in members:
        if not mask & ~member:
            result &= member
    return result


def hull_mask(sb: Subbase, mask: int) -> int:
    """ I_S(B) as a bare mask """
    return _hull_mask(sb.members, sb.full, mask)


def hull(sb: Subbase, mask: int) -> ConvexHullResult:
    sb.ground.check(mask)
    supporting = tuple(member for member in sb.members if not mask & ~member)
    return ConvexHullResult(input=mask, hull=hull_mask(sb, mask), supporting=supporting)


def is_convex(sb: Subbase, mask: int) -> Verdict:
    sb.ground.check(mask)
    points = points_of(mask)
    for i, x in enumerate(points):
        for y in points[i + 1:]:
            pair_hull = hull_mask(sb, 1 << x | 1 << y)
            if pair_hull & ~mask:
                return Verdict.fail({'pair': [x, y], 'hull': points_of(pair_hull)})
    return Verdict.ok()


def xi(sb: Subbase, x: int, target: int) -> int:
    """ Nearest point of I_S(F) to x; the intersection must be a single point """
    if not 0 <= x < sb.n:
        raise OutOfRangePoint(x, sb.n)
    sb.ground.check(target)
    if target == 0:
        raise EmptyTarget('xi needs a nonempty target set')
    core = hull_mask(sb, target)
    for a in points_of(target):
        core &= hull_mask(sb, 1 << x | 1 << a)
    if core == 0 or core & (core - 1):
        raise NotSingleton(f'xi({x}, {points_of(target)})', points_of(core))
    return core.bit_length() - 1


def convexify(sb: Subbase, phi: SetValuedMap) -> SetValuedMap:
    """ Psi(z) = I_S(Phi(z)) pointwise """
    values = []
    for idx, value in enumerate(phi.values):
        if value == 0:
            raise EmptyValue(phi.domain.points[idx])
        values.append(hull_mask(sb, value))
    log.debug('convexified %d values', len(values))
    return phi.model_copy(update={'values': tuple(values)})
