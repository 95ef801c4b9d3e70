import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError
from pydotplus import graph_from_edges
from pydotplus.graphviz import Edge, Node

from supercomb.cache import cache_mls, read_meta, stream_lines, write_atomic
from supercomb.config import Settings
from supercomb.convexity import hull, is_convex, xi
from supercomb.errors import (GroundTooLarge, HypothesisFailed, InputError, PreconditionFailed,
                              SupercombError, UsageError)
from supercomb.finitespace import codomain_size
from supercomb.fixtures import MAX_Z, invertibility_corpus, softness_corpus
from supercomb.instance import parse_map, parse_selection, parse_softness, parse_subbase, read_mls_stream
from supercomb.selection import RandomPointRule, check_invertible, check_soft, select_extend
from supercomb.setfam import (MAX_ENUM, Strictness, Subbase, Verdict, is_binary, is_normal, is_point_separating,
                              mask_of, points_of, validate_subbase)
from supercomb.superext import count_mls, enumerate_mls, lambda_map, mls_graph, mls_to_points

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_DOT = 5


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = SCHEMA_VERSION
    command: str                                # the verb
    holds: Optional[bool] = None                # None when the input was rejected
    witness: Optional[Dict[str, Any]] = None    # counterexample when holds is False
    payload: Any = None                         # verb-specific result
    notes: Tuple[str, ...] = ()

    @property
    def exit_code(self) -> int:
        if self.holds is None:
            return 2
        return 0 if self.holds else 1

    def render(self) -> str:
        return self.model_dump_json(indent=2) + '\n'


class _Parser(argparse.ArgumentParser):

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _points(text: str) -> List[int]:
    if not text.strip():
        return []
    points = [int(part) for part in text.split(',')]
    if any(point < 0 for point in points):
        raise argparse.ArgumentTypeError(f'points must be nonnegative: {text}')
    return points


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {text}')
    return value


def _verdict_report(command: str, verdict: Verdict, payload: Any = None, notes: Sequence[str] = ()) -> Report:
    return Report(command=command, holds=verdict.holds, witness=verdict.witness, payload=payload,
                  notes=tuple(notes) + verdict.notes)


def _check_subbase(args: argparse.Namespace, _: Settings) -> Report:
    notes: List[str] = []
    sb = parse_subbase(args.file, notes)
    if args.strict_lattice:
        sb = Subbase(family=sb.family, strictness=Strictness.PAPER_STRICT)
    payload = {
        'n': sb.n,
        'members': len(sb.members),
        'strictness': sb.strictness.value,
        'binary': is_binary(sb).holds,
        'normal': is_normal(sb).holds,
        'point_separating': is_point_separating(sb).holds,
    }
    return _verdict_report('check-subbase', validate_subbase(sb), payload, notes)


def _hull(args: argparse.Namespace, _: Settings) -> Report:
    sb = parse_subbase(args.file)
    mask = sb.ground.check(mask_of(args.set))
    result = hull(sb, mask)
    payload = {
        'input': points_of(mask),
        'hull': points_of(result.hull),
        'supporting': [points_of(member) for member in result.supporting],
        'convex': is_convex(sb, mask).holds,
    }
    return Report(command='hull', holds=True, payload=payload)


def _xi(args: argparse.Namespace, _: Settings) -> Report:
    sb = parse_subbase(args.file)
    verdict = validate_subbase(sb)
    if not verdict.holds:
        raise PreconditionFailed('BadSubbase', verdict)
    point = xi(sb, args.x, sb.ground.check(mask_of(args.set)))
    return Report(command='xi', holds=True, payload=point)


def _mls_count(args: argparse.Namespace, settings: Settings) -> Report:
    count = count_mls(args.n, args.par, settings.branches)
    return Report(command='mls-count', holds=True, payload={'n': args.n, 'count': count})


def _mls_enum(args: argparse.Namespace, settings: Settings) -> Report:
    if args.out is None:
        target = cache_mls(args.n, settings, args.par)
        meta = read_meta(args.n, settings)
        assert meta is not None
        count, digest = meta.count, meta.sha256
    else:
        target = Path(args.out)
        if not 1 <= args.n <= MAX_ENUM:
            raise GroundTooLarge(args.n, MAX_ENUM)
        count, digest = write_atomic(target, stream_lines(args.n, args.par))
    payload = {'n': args.n, 'count': count, 'sha256': digest, 'out': str(target)}
    return Report(command='mls-enum', holds=True, payload=payload)


def _lambda_apply(args: argparse.Namespace, _: Settings) -> Report:
    f = parse_map(args.mapfile)
    systems = read_mls_stream(args.mls_file, f.domain.size)
    m = codomain_size(f.codomain)
    images = [mls_to_points(lambda_map(f.values, m, system)) for system in systems]
    return Report(command='lambda-apply', holds=True, payload={'n': f.domain.size, 'm': m, 'images': images})


def _select(args: argparse.Namespace, _: Settings) -> Report:
    inst = parse_selection(args.instance)
    rule = None if args.seed is None else RandomPointRule(args.seed)
    h = select_extend(inst, rule)
    selection = {inst.space.points[z]: value for z, value in enumerate(h.values)}
    return Report(command='select', holds=True, payload={'selection': selection})


def _check_max_z(max_z: int) -> None:
    if not 1 <= max_z <= MAX_Z:
        raise UsageError(f'--max-z must lie in 1..{MAX_Z}, got {max_z}')


def _check_soft(args: argparse.Namespace, _: Settings) -> Report:
    bundle = parse_softness(args.instance)
    instances = bundle.instances
    notes: List[str] = []
    if not instances:
        _check_max_z(args.max_z)
        instances = tuple(softness_corpus(bundle.f, args.max_z))
        notes.append(f'generated {len(instances)} instances on spaces of at most {args.max_z} points')
    verdict = check_soft(bundle.f, bundle.subbase, instances)
    return Report(command='check-soft', holds=verdict.holds, witness=verdict.witness,
                  payload={'instances': len(instances)}, notes=tuple(notes) + verdict.notes)


def _check_invertible(args: argparse.Namespace, _: Settings) -> Report:
    _check_max_z(args.max_z)
    f = parse_map(args.mapfile)
    sb = parse_subbase(args.subbase)
    corpus = invertibility_corpus(f.codomain, args.max_z)
    verdict = check_invertible(f, sb, corpus)
    return _verdict_report('check-invertible', verdict, {'corpus': len(corpus), 'max_z': args.max_z})


def _export_dot(args: argparse.Namespace, _: Settings) -> Report:
    if not 1 <= args.n <= MAX_DOT:
        raise GroundTooLarge(args.n, MAX_DOT)
    lam = enumerate_mls(args.n, args.par)
    graph = graph_from_edges([], directed=False)
    for idx, element in enumerate(lam.elements):
        shape = 'box' if len(element.key) == 1 else 'ellipse'
        graph.add_node(Node(idx, label=f'"{element.label}"', shape=shape))
    edges = mls_graph(lam)
    for i, j in edges:
        graph.add_edge(Edge(i, j))
    graph.write(args.out, format='raw')
    payload = {'n': args.n, 'nodes': len(lam.elements), 'edges': len(edges), 'out': args.out}
    return Report(command='export-dot', holds=True, payload=payload)


def _bench(args: argparse.Namespace, settings: Settings) -> Report:
    cache_mls(args.n, settings)
    meta = read_meta(args.n, settings)
    assert meta is not None
    seconds = []
    count = 0
    for _ in range(args.repeat):
        start = time.perf_counter()
        count = count_mls(args.n, args.par, settings.branches)
        seconds.append(round(time.perf_counter() - start, 6))
    holds = count == meta.count
    payload = {'n': args.n, 'par': args.par, 'repeat': args.repeat, 'count': count,
               'cached_count': meta.count, 'seconds': seconds, 'best': min(seconds)}
    return Report(command='bench', holds=holds, payload=payload,
                  witness=None if holds else {'count': count, 'cached_count': meta.count})


Handler = Callable[[argparse.Namespace, Settings], Report]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='supercomb', description='Finite laboratory for normally supercompact spaces')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='log INFO (-v) or DEBUG (-vv) to stderr')
    verbs = parser.add_subparsers(dest='verb', required=True)

    def verb(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        sub = verbs.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = verb('check-subbase', _check_subbase, 'validate a subbase file')
    sub.add_argument('file')
    sub.add_argument('--strict-lattice', action='store_true', help='also require union and intersection closure')

    sub = verb('hull', _hull, 'convex hull of a set')
    sub.add_argument('file')
    sub.add_argument('--set', type=_points, required=True, help='comma separated points')

    sub = verb('xi', _xi, 'nearest point of a set to a point')
    sub.add_argument('file')
    sub.add_argument('--x', type=int, required=True)
    sub.add_argument('--set', type=_points, required=True, help='comma separated points')

    for name, handler, help_text in (('mls-count', _mls_count, 'count maximal linked systems'),
                                     ('mls-enum', _mls_enum, 'write maximal linked systems as NDJSON')):
        sub = verb(name, handler, help_text)
        sub.add_argument('n', type=int)
        sub.add_argument('--par', type=_positive, default=1, help='worker processes')
        if name == 'mls-enum':
            sub.add_argument('--out', help='target file, the cache when omitted')

    sub = verb('lambda-apply', _lambda_apply, 'push systems forward along a map')
    sub.add_argument('mapfile')
    sub.add_argument('--mls-file', required=True)

    sub = verb('select', _select, 'continuous selection of a set-valued map')
    sub.add_argument('instance')
    sub.add_argument('--seed', type=int, help='pick the base point at random with this seed')

    sub = verb('check-soft', _check_soft, 'check the lifting extension property')
    sub.add_argument('instance')
    sub.add_argument('--max-z', type=int, default=3, help='space size for generated instances')

    sub = verb('check-invertible', _check_invertible, 'check that every map lifts')
    sub.add_argument('mapfile')
    sub.add_argument('--subbase', required=True)
    sub.add_argument('--max-z', type=int, default=MAX_Z)

    sub = verb('export-dot', _export_dot, 'superextension graph in DOT format')
    sub.add_argument('n', type=int)
    sub.add_argument('--out', required=True)
    sub.add_argument('--par', type=_positive, default=1)

    sub = verb('bench', _bench, 'time the enumeration count')
    sub.add_argument('n', type=int)
    sub.add_argument('--par', type=_positive, default=1)
    sub.add_argument('--repeat', type=_positive, default=1)
    return parser


def _failure_witness(exc: SupercombError) -> Dict[str, Any]:
    witness: Dict[str, Any] = {'error': type(exc).__name__, 'message': str(exc)}
    if isinstance(exc, (PreconditionFailed, HypothesisFailed)):
        witness['kind'] = exc.kind
        witness['detail'] = exc.verdict.witness
    return witness


def run(argv: Sequence[str], settings: Optional[Settings] = None) -> Tuple[int, Report]:
    """ Execute one verb; exit 0 when the property holds, 1 when it fails, 2 on bad input """
    settings = settings or Settings.from_env()
    command = argv[0] if argv else ''
    try:
        args = build_parser().parse_args(list(argv))
        command = args.verb
        if args.verbose:
            logging.getLogger('supercomb').setLevel(logging.DEBUG if args.verbose > 1 else logging.INFO)
        report: Report = args.handler(args, settings)
    except (InputError, ValidationError) as exc:
        log.info('rejected input: %s', exc)
        report = Report(command=command, notes=(f'{type(exc).__name__}: {exc}',))
    except SupercombError as exc:
        report = Report(command=command, holds=False, witness=_failure_witness(exc))
    return report.exit_code, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = Settings.from_env()
    logging.basicConfig(stream=sys.stderr, level=settings.log_level,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    code, report = run(sys.argv[1:] if argv is None else argv, settings)
    sys.stdout.write(report.render())
    return code


if __name__ == '__main__':
    sys.exit(main())
