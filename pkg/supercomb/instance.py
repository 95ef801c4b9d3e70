"""
JSON instance files.

Each file kind has a schema model that only checks structure (fields, types,
no extras) and a `build` step that turns it into the validated domain object.
Structural problems surface as SchemaError, broken invariants as
InvariantError and unreadable JSON as ParseError, all carrying the file path
and the location inside the document.
"""
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Type, TypeVar, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from supercomb.errors import InputError, InvariantError, OutOfRangePoint, ParseError, SchemaError
from supercomb.finitespace import FiniteSpace, PointMap, SetValuedMap, as_space
from supercomb.selection import SelectionInstance, SoftnessInstance
from supercomb.setfam import MAX_ENUM, GroundSet, Strictness, Subbase, mask_of, points_of
from supercomb.superext import MLS, mls_from_points

log = logging.getLogger(__name__)


class InstanceKind(str, Enum):
    SUBBASE = 'subbase'
    SPACE = 'space'
    MAP = 'map'
    SELECTION = 'selection'
    SOFTNESS = 'softness'


class SoftnessBundle(BaseModel):
    model_config = ConfigDict(frozen=True)

    f: PointMap                                 # the surjection X -> Y
    subbase: Subbase                            # the subbase S on X
    instances: Tuple[SoftnessInstance, ...]     # empty means: generate the corpus


Instance = Union[Subbase, FiniteSpace, PointMap, SelectionInstance, SoftnessBundle]


@contextmanager
def _located(path: str, location: str) -> Iterator[None]:
    """ Report any invariant violated inside the block as an InvariantError at location """
    try:
        yield
    except ValidationError as exc:
        first = exc.errors()[0]
        raise InvariantError(path, first['msg'], location) from exc
    except (ValueError, KeyError, InputError) as exc:
        raise InvariantError(path, str(exc), location) from exc


def _by_name(space: FiniteSpace, names: Sequence[str]) -> List[int]:
    indices = []
    for name in names:
        if name not in space.points:
            raise ValueError(f'unknown point {name!r}')
        indices.append(space.index(name))
    return indices


def _total(space: FiniteSpace, mapping: Mapping[str, int]) -> Tuple[int, ...]:
    unknown = sorted(set(mapping) - set(space.points))
    if unknown:
        raise ValueError(f'unknown points {unknown}')
    missing = [name for name in space.points if name not in mapping]
    if missing:
        raise ValueError(f'no value for points {missing}')
    return tuple(mapping[name] for name in space.points)


class _FileModel(BaseModel):
    model_config = ConfigDict(extra='forbid', strict=True, populate_by_name=True)


class SubbaseFile(_FileModel):
    n: int
    subbase: List[List[int]]
    strictness: Strictness = Strictness.VANMILL

    def build(self, notes: Optional[List[str]] = None) -> Subbase:
        return Subbase.from_lists(self.n, self.subbase, self.strictness, notes)

    @classmethod
    def of(cls, sb: Subbase) -> 'SubbaseFile':
        return cls(n=sb.n, subbase=sb.family.as_lists(), strictness=sb.strictness)


class SpaceFile(_FileModel):
    points: List[str]
    opens: List[List[int]]

    def build(self) -> FiniteSpace:
        for points in self.opens:
            for point in points:
                if not 0 <= point < len(self.points):
                    raise ValueError(f'open set {points} refers to point {point}')
        return FiniteSpace(points=tuple(self.points), opens=tuple(sorted({mask_of(o) for o in self.opens})))

    @classmethod
    def of(cls, space: FiniteSpace) -> 'SpaceFile':
        return cls(points=list(space.points), opens=[points_of(mask) for mask in space.opens])


class GroundFile(_FileModel):
    n: int

    def build(self) -> GroundSet:
        return GroundSet(n=self.n)


class MapFile(_FileModel):
    """ A map from the discrete ground set {0..n-1} into a ground set or a finite space """
    n: int
    values: List[int]
    codomain: Union[GroundFile, SpaceFile]

    def build(self) -> PointMap:
        if self.n > MAX_ENUM:
            raise ValueError(f'maps are limited to {MAX_ENUM} domain points, got {self.n}')
        domain = as_space(GroundSet(n=self.n))
        return PointMap(domain=domain, codomain=self.codomain.build(), values=tuple(self.values))

    @classmethod
    def of(cls, f: PointMap) -> 'MapFile':
        codomain: Union[GroundFile, SpaceFile]
        if isinstance(f.codomain, GroundSet):
            codomain = GroundFile(n=f.codomain.n)
        else:
            codomain = SpaceFile.of(f.codomain)
        return cls(n=f.domain.size, values=list(f.values), codomain=codomain)


class SelectionFile(_FileModel):
    space: SpaceFile
    subbase: SubbaseFile
    closed: List[str] = Field(default_factory=list, alias='A')
    g: Dict[str, int] = Field(default_factory=dict)
    phi: Dict[str, List[int]]

    def build(self, path: str) -> SelectionInstance:
        with _located(path, 'space'):
            space = self.space.build()
        with _located(path, 'subbase'):
            sb = self.subbase.build()
        with _located(path, 'phi'):
            for points in self.phi.values():
                for point in points:
                    if not 0 <= point < sb.n:
                        raise OutOfRangePoint(point, sb.n)
            values = _total(space, {name: mask_of(points) for name, points in self.phi.items()})
            phi = SetValuedMap(domain=space, ground=sb.ground, values=values)
        with _located(path, 'A'):
            closed = mask_of(_by_name(space, self.closed))
        with _located(path, 'g'):
            partial = dict(zip(_by_name(space, list(self.g)), self.g.values()))
            return SelectionInstance(space=space, closed=closed, partial=partial, phi=phi, subbase=sb)

    @classmethod
    def of(cls, inst: SelectionInstance) -> 'SelectionFile':
        points = inst.space.points
        return cls(space=SpaceFile.of(inst.space), subbase=SubbaseFile.of(inst.subbase),
                   closed=inst.space.names(inst.closed),
                   g={points[z]: value for z, value in sorted(inst.partial.items())},
                   phi={points[z]: points_of(value) for z, value in enumerate(inst.phi.values)})


class SoftnessEntryFile(_FileModel):
    space: SpaceFile
    closed: List[str] = Field(default_factory=list, alias='A')
    k: Dict[str, int]
    h: Dict[str, int] = Field(default_factory=dict)


class SoftnessFile(_FileModel):
    f: MapFile = Field(alias='map')
    subbase: SubbaseFile
    instances: List[SoftnessEntryFile] = Field(default_factory=list)

    def build(self, path: str) -> SoftnessBundle:
        with _located(path, 'map'):
            f = self.f.build()
        with _located(path, 'subbase'):
            sb = self.subbase.build()
        instances = []
        for idx, entry in enumerate(self.instances):
            with _located(path, f'instances.{idx}'):
                space = entry.space.build()
                k = PointMap(domain=space, codomain=f.codomain, values=_total(space, entry.k))
                closed = mask_of(_by_name(space, entry.closed))
                partial = dict(zip(_by_name(space, list(entry.h)), entry.h.values()))
                instances.append(SoftnessInstance(f=f, space=space, closed=closed, k=k, partial=partial))
        with _located(path, 'map'):
            return SoftnessBundle(f=f, subbase=sb, instances=tuple(instances))

    @classmethod
    def of(cls, bundle: SoftnessBundle) -> 'SoftnessFile':
        entries = []
        for inst in bundle.instances:
            points = inst.space.points
            entries.append(SoftnessEntryFile(
                space=SpaceFile.of(inst.space), closed=inst.space.names(inst.closed),
                k={points[z]: value for z, value in enumerate(inst.k.values)},
                h={points[z]: value for z, value in sorted(inst.partial.items())}))
        return cls(f=MapFile.of(bundle.f), subbase=SubbaseFile.of(bundle.subbase), instances=entries)


_Model = TypeVar('_Model', bound=_FileModel)


def _load(path: Union[str, Path], schema: Type[_Model]) -> _Model:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(str(path), f'cannot read file: {exc.strerror}') from exc
    try:
        return schema.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = '.'.join(str(part) for part in first['loc']) or None
        if first['type'] == 'json_invalid':
            raise ParseError(str(path), first['msg'], location) from exc
        raise SchemaError(str(path), first['msg'], location) from exc


def parse_subbase(path: Union[str, Path], notes: Optional[List[str]] = None) -> Subbase:
    model = _load(path, SubbaseFile)
    with _located(str(path), 'subbase'):
        return model.build(notes)


def parse_space(path: Union[str, Path]) -> FiniteSpace:
    model = _load(path, SpaceFile)
    with _located(str(path), 'opens'):
        return model.build()


def parse_map(path: Union[str, Path]) -> PointMap:
    model = _load(path, MapFile)
    with _located(str(path), 'values'):
        return model.build()


def parse_selection(path: Union[str, Path]) -> SelectionInstance:
    return _load(path, SelectionFile).build(str(path))


def parse_softness(path: Union[str, Path]) -> SoftnessBundle:
    return _load(path, SoftnessFile).build(str(path))


def parse_instance(path: Union[str, Path], kind: InstanceKind) -> Instance:
    parsers = {
        InstanceKind.SUBBASE: parse_subbase,
        InstanceKind.SPACE: parse_space,
        InstanceKind.MAP: parse_map,
        InstanceKind.SELECTION: parse_selection,
        InstanceKind.SOFTNESS: parse_softness,
    }
    instance: Instance = parsers[kind](path)
    log.debug('parsed %s instance from %s', kind.value, path)
    return instance


def dump_instance(value: Instance) -> str:
    model: _FileModel
    if isinstance(value, Subbase):
        model = SubbaseFile.of(value)
    elif isinstance(value, FiniteSpace):
        model = SpaceFile.of(value)
    elif isinstance(value, PointMap):
        model = MapFile.of(value)
    elif isinstance(value, SelectionInstance):
        model = SelectionFile.of(value)
    else:
        model = SoftnessFile.of(value)
    return model.model_dump_json(by_alias=True, indent=2) + '\n'


def write_instance(path: Union[str, Path], value: Instance) -> Path:
    target = Path(path)
    target.write_text(dump_instance(value), encoding='utf-8')
    return target


_STREAM_LINE = TypeAdapter(List[List[int]])


def read_mls_stream(path: Union[str, Path], n: int) -> List[MLS]:
    """ Read an NDJSON stream with one MLS per line, given as its minimal members """
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as exc:
        raise ParseError(str(path), f'cannot read file: {exc.strerror}') from exc
    systems = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        location = f'line {lineno}'
        try:
            lists = _STREAM_LINE.validate_json(line, strict=True)
        except ValidationError as exc:
            first = exc.errors()[0]
            if first['type'] == 'json_invalid':
                raise ParseError(str(path), first['msg'], location) from exc
            raise SchemaError(str(path), first['msg'], location) from exc
        with _located(str(path), location):
            systems.append(mls_from_points(n, lists))
    log.debug('read %d systems from %s', len(systems), path)
    return systems
