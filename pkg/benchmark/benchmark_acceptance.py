# runcmd: python benchmark/benchmark_acceptance.py selection

from itertools import product
from typing import Iterator, List
import sys
import tempfile
import time

import benchmark

from supercomb import oracle
from supercomb.cli import run
from supercomb.config import Settings
from supercomb.convexity import convexify, hull_mask, xi
from supercomb.errors import HypothesisFailed
from supercomb.finitespace import FiniteSpace, PointMap, is_s_continuous, is_s_convex_map
from supercomb.fixtures import (chain, continuous_maps, invertibility_corpus, s_continuous_convex_maps,
                                s_continuous_maps, softness_corpus, topologies, tri, validated_fixtures)
from supercomb.selection import check_invertible, check_soft, lift_project, select
from supercomb.setfam import GroundSet, Subbase, is_binary, is_normal, is_point_separating, validate_subbase
from supercomb.superext import (count_mls, enumerate_mls, eta, iter_mls_keys, lambda_map, lambda_subbase, retract)


def ground_map(values: tuple, m: int) -> PointMap:
    n = len(values)
    return PointMap(domain=FiniteSpace.discrete(n, [str(i) for i in range(n)]), codomain=GroundSet(n=m),
                    values=values)


def s_convex_surjections(sb: Subbase) -> Iterator[PointMap]:
    for m in range(1, sb.n + 1):
        for values in product(range(m), repeat=sb.n):
            f = ground_map(values, m)
            if len(set(values)) == m and is_s_convex_map(f, sb).holds:
                yield f


class AcceptanceBenchmark(benchmark.Benchmark):

    def test_subbase_axioms(self) -> None:
        """Test 001: Axiom verdicts match the brute-force oracle on every fixture [10 points]"""
        start = time.perf_counter()
        for name, sb in validated_fixtures(6):
            hint = f'{name}: verdict differs from the oracle'
            assert is_binary(sb).holds == oracle.binary(sb), hint
            assert is_normal(sb).holds == oracle.normal(sb), hint
            assert is_point_separating(sb).holds == oracle.separating(sb), hint
        seconds = time.perf_counter() - start
        assert seconds < 60, f'Axiom suite took {seconds:.1f}s, limit is 60s'

    def test_nearest_point(self) -> None:
        """Test 002: Nearest points are single points of the hull on every fixture [10 points]"""
        for name, sb in validated_fixtures(6):
            for target in range(1, sb.full + 1):
                target_hull = hull_mask(sb, target)
                for x in range(sb.n):
                    point = xi(sb, x, target)
                    assert target_hull >> point & 1, f'{name}: xi({x}, {target:b}) = {point} leaves the hull'
                    assert not target_hull >> x & 1 or point == x, f'{name}: xi moves {x} inside the hull'
        for n in range(1, 7):
            for target in range(1, 1 << n):
                low, high = (target & -target).bit_length() - 1, target.bit_length() - 1
                for x in range(n):
                    assert xi(chain(n), x, target) == min(max(x, low), high), f'chain{n}: xi is not a clamp'

    def test_selection_sweep(self) -> None:
        """Test 003: Selections exist exactly where brute force finds them, |Z| <= 4 [20 points]"""
        start = time.perf_counter()
        cnt_instances = 0
        for name, sb in validated_fixtures(4):
            for size in range(1, 5):
                for space in topologies(size):
                    for phi in s_continuous_convex_maps(space, sb):
                        h = select(space, phi, sb)
                        assert h.values in set(oracle.selections(phi)), f'{name}: select disagrees on {phi}'
                        cnt_instances += 1
        seconds = time.perf_counter() - start
        assert seconds < 600, f'{cnt_instances} instances took {seconds:.0f}s, limit is 600s'

    def test_mls_counts(self) -> None:
        """Test 004: MLS counts 1, 2, 4, 12, 81, 2646, 1422564 [20 points]"""
        for n, expected in enumerate((1, 2, 4, 12, 81), start=1):
            assert list(iter_mls_keys(n)) == oracle.mls_bruteforce(n), f'MLS({n}) differs from the antichain filter'
            assert count_mls(n) == expected
        assert count_mls(6) == oracle.count_mls_by_antichains(6) == 2646
        start = time.perf_counter()
        assert count_mls(7) == 1422564
        sequential = time.perf_counter() - start
        start = time.perf_counter()
        assert count_mls(7, par=8) == 1422564
        parallel = time.perf_counter() - start
        assert sequential < 60, f'Sequential n=7 count took {sequential:.1f}s, limit is 60s'
        assert parallel < 15, f'Parallel n=7 count took {parallel:.1f}s, limit is 15s'
        assert oracle.count_mls_by_antichains(7) == 1422564, 'linked antichains on 6 points disagree'

    def test_superextension_structure(self) -> None:
        """Test 005: lambda X subbase axioms, retraction and functoriality for n <= 4 [10 points]"""
        for n in range(1, 5):
            lam = enumerate_mls(n)
            assert validate_subbase(lambda_subbase(lam)).holds, f'lambda X fails the axioms for n={n}'
            for _, sb in validated_fixtures(n):
                if sb.n == n:
                    assert all(retract(sb, eta(x, n)) == x for x in range(n)), 'r o eta must fix points'
            for m in range(1, n + 1):
                for f in product(range(m), repeat=n):
                    for g in product(range(2), repeat=m):
                        composed = tuple(g[f[x]] for x in range(n))
                        for system in lam.elements:
                            assert lambda_map(g, 2, lambda_map(f, m, system)) == lambda_map(composed, 2, system)

    def test_corollaries(self) -> None:
        """Test 006: Convexification, invertibility and softness agree with brute force [15 points]"""
        sb = chain(3)
        for space in topologies(2) + topologies(3):
            for phi in s_continuous_maps(space, sb, range(1, sb.full + 1)):
                assert is_s_continuous(convexify(sb, phi), sb).holds, f'convexify breaks S-continuity of {phi}'
        f = ground_map((0, 1, 1), 2)
        corpus = invertibility_corpus(f.codomain, 4)
        assert check_invertible(f, sb, corpus).holds
        assert all(oracle.lift_exists(f, g) for _, g in corpus)
        for inst in softness_corpus(f, 3):
            verdict = check_soft(f, sb, [inst])
            unresolved = any('does not extend' in note for note in verdict.notes)
            assert verdict.holds and unresolved != oracle.extension_exists(inst)
        for bad_f, bad_sb, kind in ((ground_map((0, 1, 0), 2), sb, 'NotSConvex'), (f, tri(), 'BadSubbase')):
            try:
                check_invertible(bad_f, bad_sb, corpus)
            except HypothesisFailed as exc:
                assert exc.kind == kind, f'Expected {kind}, got {exc.kind}'
            else:
                raise AssertionError(f'{kind} hypothesis violation was not reported')

    def test_lift_projection(self) -> None:
        """Test 007: f o r o g1 = g for every lift through lambda f, n <= 3 [10 points]"""
        for name, sb in validated_fixtures(3):
            systems = enumerate_mls(sb.n).elements
            for f in s_convex_surjections(sb):
                m = max(f.values) + 1
                lifts = {y: [s for s in systems if lambda_map(f.values, m, s) == eta(y, m)] for y in range(m)}
                for space in topologies(1) + topologies(2):
                    for g in continuous_maps(space, f.codomain):
                        for chosen in product(*(lifts[y] for y in g.values)):
                            bar = lift_project(f, sb, g, chosen)
                            assert tuple(f.values[x] for x in bar.values) == g.values, f'{name}: {f.values}'

    def test_determinism(self) -> None:
        """Test 008: Reruns produce byte-identical reports [5 points]"""
        with tempfile.TemporaryDirectory() as tmp:
            path = f'{tmp}/chain3.json'
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write('{"n": 3, "subbase": [[0], [1], [2], [0, 1], [1, 2], [0, 1, 2]]}')
            settings = Settings(cache_dir=tempfile.mkdtemp(dir=tmp))
            runs: List[List[str]] = [['check-subbase', path], ['hull', path, '--set', '0,2'],
                                     ['mls-count', '6'], ['mls-enum', '5']]
            for argv in runs:
                first, second = run(argv, settings)[1].render(), run(argv, settings)[1].render()
                assert first == second, f'{argv} rendered differently on a rerun'
            assert run(['mls-count', '6', '--par', '4'], settings)[1].render() == \
                run(['mls-count', '6'], settings)[1].render(), 'Parallel count report differs'
            out = [f'{tmp}/seq.ndjson', f'{tmp}/par.ndjson']
            run(['mls-enum', '5', '--out', out[0]], settings)
            run(['mls-enum', '5', '--out', out[1], '--par', '4'], settings)
            with open(out[0], 'rb') as seq, open(out[1], 'rb') as par:
                assert seq.read() == par.read(), 'Parallel enumeration stream differs'


if __name__ == '__main__':

    acceptance = AcceptanceBenchmark(sys.argv)
    acceptance.run_tests()
