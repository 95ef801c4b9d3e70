from functools import lru_cache
from itertools import permutations, product
from typing import Dict, Iterator, List, Sequence, Tuple, Union
import logging

import networkx as nx

from supercomb.convexity import is_convex
from supercomb.finitespace import (FiniteSpace, PointMap, SetValuedMap, codomain_size, is_continuous,
                                   is_s_continuous)
from supercomb.selection import SoftnessInstance
from supercomb.setfam import GroundSet, Subbase, mask_of, points_of, validate_subbase

log = logging.getLogger(__name__)

MAX_Z = 4   # largest space enumerated up to homeomorphism

# trees with at most 6 vertices, as edge lists
TREES: Dict[str, Tuple[int, List[Tuple[int, int]]]] = {
    'star4': (4, [(0, 1), (0, 2), (0, 3)]),
    'fork5': (5, [(0, 1), (1, 2), (2, 3), (2, 4)]),
    'star5': (5, [(0, 1), (0, 2), (0, 3), (0, 4)]),
    'spider6': (6, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5)]),
    'caterpillar6': (6, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5)]),
    'star6': (6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]),
}


def _intervals(n: int) -> List[List[int]]:
    return [list(range(a, b + 1)) for a in range(n) for b in range(a, n)]


def chain(n: int) -> Subbase:
    """ CHAIN_n: all intervals of 0 < 1 < ... < n-1 """
    return Subbase.from_lists(n, _intervals(n))


def box(rows: int, cols: int) -> Subbase:
    """ Products of row and column intervals; point (i, j) has index i * cols + j """
    members = [[i * cols + j for i in rows_ for j in cols_]
               for rows_ in _intervals(rows) for cols_ in _intervals(cols)]
    return Subbase.from_lists(rows * cols, members)


def subtree_family(size: int, edges: Sequence[Tuple[int, int]]) -> Subbase:
    """ Vertex sets of all subtrees of a tree """
    tree = nx.Graph()
    tree.add_nodes_from(range(size))
    tree.add_edges_from(edges)
    members = []
    for mask in range(1, 1 << size):
        nodes = points_of(mask)
        if nx.is_connected(tree.subgraph(nodes)):
            members.append(nodes)
    return Subbase.from_lists(size, members)


def tri() -> Subbase:
    """ Three pairwise intersecting sets with empty intersection """
    return Subbase.from_lists(3, [[0, 1], [1, 2], [0, 2]])


def full_family(n: int) -> Subbase:
    return Subbase.from_lists(n, [points_of(mask) for mask in range(1, 1 << n)])


def validated_fixtures(max_n: int = 6) -> List[Tuple[str, Subbase]]:
    """ Named subbases on at most max_n points that pass every axiom """
    candidates: List[Tuple[str, Subbase]] = [(f'chain{n}', chain(n)) for n in range(1, 7)]
    candidates += [('box2x2', box(2, 2)), ('box2x3', box(2, 3)), ('full2', full_family(2))]
    candidates += [(name, subtree_family(size, edges)) for name, (size, edges) in TREES.items()]
    result = [(name, sb) for name, sb in candidates if sb.n <= max_n]
    for name, sb in result:
        if not validate_subbase(sb).holds:
            raise AssertionError(f'fixture {name} is expected to be a binary normal subbase')
    return result


def sierpinski() -> FiniteSpace:
    """ Two points a, b with open sets {}, {a}, {a, b} """
    return FiniteSpace(points=('a', 'b'), opens=(0, 1, 3))


def discrete_space(size: int) -> FiniteSpace:
    return FiniteSpace.discrete(size)


def _canonical(size: int, opens: Tuple[int, ...]) -> Tuple[int, ...]:
    best = None
    for perm in permutations(range(size)):
        image = tuple(sorted(mask_of(perm[p] for p in points_of(mask)) for mask in opens))
        if best is None or image < best:
            best = image
    assert best is not None
    return best


@lru_cache(maxsize=None)
def topologies(size: int) -> Tuple[FiniteSpace, ...]:
    """ All topologies on `size` points up to homeomorphism (1, 3, 9, 33 for 1..4 points) """
    pairs = [(x, y) for x in range(size) for y in range(size) if x != y]
    labelled = set()
    for bits in range(1 << len(pairs)):
        relation = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        opens = tuple(mask for mask in range(1 << size)
                      if all(not mask >> x & 1 or mask >> y & 1 for x, y in relation))
        labelled.add(opens)
    classes = sorted({_canonical(size, opens) for opens in labelled})
    log.debug('%d labelled and %d unlabelled topologies on %d points', len(labelled), len(classes), size)
    names = tuple(f'z{i}' for i in range(size))
    return tuple(FiniteSpace(points=names, opens=opens) for opens in classes)


def all_spaces(max_size: int) -> List[FiniteSpace]:
    return [space for size in range(1, max_size + 1) for space in topologies(size)]


def convex_sets(sb: Subbase) -> List[int]:
    return [mask for mask in range(1, sb.full + 1) if is_convex(sb, mask).holds]


def s_continuous_maps(space: FiniteSpace, sb: Subbase, candidates: Sequence[int]) -> Iterator[SetValuedMap]:
    """ Every S-continuous map whose values come from candidates """
    for values in product(candidates, repeat=space.size):
        phi = SetValuedMap(domain=space, ground=sb.ground, values=values)
        if is_s_continuous(phi, sb).holds:
            yield phi


def s_continuous_convex_maps(space: FiniteSpace, sb: Subbase) -> Iterator[SetValuedMap]:
    return s_continuous_maps(space, sb, convex_sets(sb))


def continuous_maps(space: FiniteSpace, codomain: Union[GroundSet, FiniteSpace]) -> Iterator[PointMap]:
    for values in product(range(codomain_size(codomain)), repeat=space.size):
        h = PointMap(domain=space, codomain=codomain, values=values)
        if is_continuous(h).holds:
            yield h


def invertibility_corpus(codomain: Union[GroundSet, FiniteSpace],
                         max_z: int) -> List[Tuple[FiniteSpace, PointMap]]:
    return [(space, g) for space in all_spaces(max_z) for g in continuous_maps(space, codomain)]


def closed_sets(space: FiniteSpace) -> List[int]:
    return sorted(space.full & ~mask for mask in space.opens)


def softness_corpus(f: PointMap, max_z: int) -> List[SoftnessInstance]:
    """ Every (Z, A, k, h) with |Z| <= max_z, A closed and f o h = k on A """
    instances = []
    for space in all_spaces(max_z):
        for k in continuous_maps(space, f.codomain):
            for closed in closed_sets(space):
                kept = points_of(closed)
                fibers = [[x for x in range(f.domain.size) if f.values[x] == k.values[z]] for z in kept]
                for choice in product(*fibers):
                    partial = dict(zip(kept, choice))
                    try:
                        instances.append(SoftnessInstance(f=f, space=space, closed=closed, k=k, partial=partial))
                    except ValueError:
                        continue    # h is not continuous on A
    return instances
