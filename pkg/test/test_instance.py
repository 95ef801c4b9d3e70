import json
from pathlib import Path
from typing import List

import pytest

from supercomb.cache import stream_lines
from supercomb.errors import InvariantError, ParseError, SchemaError
from supercomb.finitespace import FiniteSpace, PointMap, SetValuedMap
from supercomb.fixtures import chain, discrete_space, sierpinski, validated_fixtures
from supercomb.instance import (InstanceKind, SoftnessBundle, dump_instance, parse_instance, parse_selection,
                                parse_space, parse_subbase, read_mls_stream, write_instance)
from supercomb.selection import SelectionInstance, SoftnessInstance
from supercomb.setfam import GroundSet, Strictness, mask_of
from supercomb.superext import enumerate_mls

CHAIN3 = {'n': 3, 'subbase': [[0], [1], [2], [0, 1], [1, 2], [0, 1, 2]]}
SIERP = {'points': ['a', 'b'], 'opens': [[], [0], [0, 1]]}


def write_json(path: Path, content: object) -> Path:
    path.write_text(json.dumps(content), encoding='utf-8')
    return path


def test_parse_subbase(tmp_path: Path) -> None:
    sb = parse_subbase(write_json(tmp_path / 'chain3.json', CHAIN3))
    assert sb == chain(3)
    strict = parse_subbase(write_json(tmp_path / 'strict.json', {**CHAIN3, 'strictness': 'paperstrict'}))
    assert strict.strictness == Strictness.PAPER_STRICT


def test_parse_subbase_collects_notes(tmp_path: Path) -> None:
    notes: List[str] = []
    raw = {'n': 3, 'subbase': [[], [0], [1], [2], [0, 1], [1, 2], [0, 1, 2]]}
    sb = parse_subbase(write_json(tmp_path / 'empty.json', raw), notes)
    assert sb == chain(3)
    assert notes == ['dropped 1 empty set(s)']


def test_parse_space(tmp_path: Path) -> None:
    assert parse_space(write_json(tmp_path / 'sierp.json', SIERP)) == sierpinski()
    with pytest.raises(InvariantError) as info:
        parse_space(write_json(tmp_path / 'open.json', {'points': ['a', 'b'], 'opens': [[], [0]]}))
    assert info.value.location == 'opens'


def test_malformed_json(tmp_path: Path) -> None:
    path = tmp_path / 'broken.json'
    path.write_text('{"n": 3, "subbase": [[0]', encoding='utf-8')
    with pytest.raises(ParseError) as info:
        parse_subbase(path)
    assert type(info.value) is ParseError, "Broken JSON is neither a schema nor an invariant problem"
    with pytest.raises(ParseError):
        parse_subbase(tmp_path / 'missing.json')


def test_schema_errors(tmp_path: Path) -> None:
    with pytest.raises(SchemaError) as info:
        parse_subbase(write_json(tmp_path / 'extra.json', {**CHAIN3, 'colour': 'red'}))
    assert info.value.location == 'colour'
    with pytest.raises(SchemaError) as info:
        parse_subbase(write_json(tmp_path / 'missing.json', {'subbase': [[0]]}))
    assert info.value.location == 'n'
    with pytest.raises(SchemaError):
        parse_subbase(write_json(tmp_path / 'type.json', {'n': '3', 'subbase': [[0]]}))


def test_subbase_invariants(tmp_path: Path) -> None:
    with pytest.raises(InvariantError) as info:
        parse_subbase(write_json(tmp_path / 'range.json', {'n': 2, 'subbase': [[2]]}))
    assert info.value.location == 'subbase'


def selection_document(**changes: object) -> dict:
    document = {
        'space': {'points': ['z0', 'z1'], 'opens': [[], [0], [1], [0, 1]]},
        'subbase': CHAIN3,
        'A': ['z0'],
        'g': {'z0': 1},
        'phi': {'z0': [0, 1], 'z1': [1, 2]},
    }
    document.update(changes)
    return document


def test_parse_selection(tmp_path: Path) -> None:
    inst = parse_selection(write_json(tmp_path / 'select.json', selection_document()))
    assert inst.closed == mask_of([0])
    assert inst.partial == {0: 1}
    assert inst.phi.values == (mask_of([0, 1]), mask_of([1, 2]))


@pytest.mark.parametrize('changes, location', [
    ({'g': {'z0': 2}}, 'g'),
    ({'A': ['z9'], 'g': {}}, 'A'),
    ({'phi': {'z0': [0, 1]}}, 'phi'),
    ({'phi': {'z0': [0, 1], 'z1': [3]}}, 'phi'),
    ({'space': {'points': ['z0', 'z1'], 'opens': [[], [0]]}}, 'space'),
])
def test_selection_invariants(tmp_path: Path, changes: dict, location: str) -> None:
    with pytest.raises(InvariantError) as info:
        parse_selection(write_json(tmp_path / 'bad.json', selection_document(**changes)))
    assert info.value.location == location


def test_not_closed_is_an_invariant_error(tmp_path: Path) -> None:
    document = selection_document(space=SIERP, A=['a'], g={'a': 0}, phi={'a': [0, 1], 'b': [0, 1]})
    with pytest.raises(InvariantError):
        parse_selection(write_json(tmp_path / 'open.json', document))


def ground_map(values: tuple, m: int) -> PointMap:
    n = len(values)
    return PointMap(domain=FiniteSpace.discrete(n, [str(i) for i in range(n)]), codomain=GroundSet(n=m),
                    values=values)


def test_round_trip(tmp_path: Path) -> None:
    sb = chain(3)
    f = ground_map((0, 1, 1), 2)
    phi = SetValuedMap(domain=discrete_space(2), ground=sb.ground, values=(mask_of([0, 1]), mask_of([1, 2])))
    k = PointMap(domain=sierpinski(), codomain=f.codomain, values=(0, 0))
    values = [
        (InstanceKind.SPACE, sierpinski()),
        (InstanceKind.MAP, f),
        (InstanceKind.MAP, PointMap(domain=f.domain, codomain=sierpinski(), values=(0, 1, 1))),
        (InstanceKind.SELECTION,
         SelectionInstance(space=discrete_space(2), closed=mask_of([0]), partial={0: 1}, phi=phi, subbase=sb)),
        (InstanceKind.SOFTNESS, SoftnessBundle(f=f, subbase=sb, instances=(
            SoftnessInstance(f=f, space=sierpinski(), closed=mask_of([1]), k=k, partial={1: 0}),))),
    ]
    values += [(InstanceKind.SUBBASE, fixture) for _, fixture in validated_fixtures(6)]
    for idx, (kind, value) in enumerate(values):
        path = write_instance(tmp_path / f'{idx}.json', value)
        assert parse_instance(path, kind) == value, f"{kind.value} instance changed on the way through a file"
        assert path.read_text(encoding='utf-8') == dump_instance(value)


def test_read_mls_stream(tmp_path: Path) -> None:
    path = tmp_path / 'mls-3.ndjson'
    path.write_bytes(b''.join(stream_lines(3)))
    assert read_mls_stream(path, 3) == list(enumerate_mls(3).elements)
    path.write_text('[[0,1],[2]]\n', encoding='utf-8')
    with pytest.raises(InvariantError) as info:
        read_mls_stream(path, 3)
    assert info.value.location == 'line 1'
    path.write_text('[[0]]\n[[0,"1"]]\n', encoding='utf-8')
    with pytest.raises(SchemaError) as info:
        read_mls_stream(path, 3)
    assert info.value.location == 'line 2'
    path.write_text('[[0]\n', encoding='utf-8')
    with pytest.raises(ParseError):
        read_mls_stream(path, 3)
