from pathlib import Path
from typing import Iterable, Optional, Tuple
import hashlib
import json
import logging
import os
import tempfile

from pydantic import BaseModel, ConfigDict, ValidationError

from supercomb.config import Settings
from supercomb.errors import CacheCorrupt, GroundTooLarge
from supercomb.setfam import MAX_ENUM, points_of
from supercomb.superext import iter_mls_keys

log = logging.getLogger(__name__)


class CacheMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int          # ground set size
    count: int      # number of lines in the stream
    sha256: str     # hex digest of the stream bytes


def stream_lines(n: int, par: int = 1) -> Iterable[bytes]:
    """ One compact JSON line per MLS, in canonical order """
    for key in iter_mls_keys(n, par):
        yield json.dumps([points_of(mask) for mask in key], separators=(',', ':')).encode() + b'\n'


def write_atomic(target: Path, chunks: Iterable[bytes]) -> Tuple[int, str]:
    """ Write chunks to a temp file next to target, then rename; returns (chunk count, sha256) """
    target.parent.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256()
    count = 0
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f'.{target.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as handle:
            for chunk in chunks:
                handle.write(chunk)
                digest.update(chunk)
                count += 1
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return count, digest.hexdigest()


def cache_paths(n: int, settings: Settings) -> Tuple[Path, Path]:
    base = settings.cache_dir / f'mls-{n}'
    return base.with_suffix('.ndjson'), base.with_suffix('.meta')


def read_meta(n: int, settings: Settings) -> Optional[CacheMeta]:
    _, meta_path = cache_paths(n, settings)
    if not meta_path.exists():
        return None
    try:
        return CacheMeta.model_validate_json(meta_path.read_text(encoding='utf-8'))
    except ValidationError as exc:
        raise CacheCorrupt(str(meta_path), 'unreadable metadata') from exc


def verify_cache(n: int, settings: Settings) -> CacheMeta:
    """ Check the stream against its metadata, raising CacheCorrupt on any mismatch """
    data_path, meta_path = cache_paths(n, settings)
    meta = read_meta(n, settings)
    if meta is None:
        raise CacheCorrupt(str(meta_path), 'metadata missing')
    if meta.n != n:
        raise CacheCorrupt(str(meta_path), f'metadata is for n={meta.n}')
    digest = hashlib.sha256()
    count = 0
    with data_path.open('rb') as handle:
        for line in handle:
            digest.update(line)
            count += 1
    if count != meta.count:
        raise CacheCorrupt(str(data_path), f'{count} lines, expected {meta.count}')
    if digest.hexdigest() != meta.sha256:
        raise CacheCorrupt(str(data_path), 'checksum mismatch')
    return meta


def cache_mls(n: int, settings: Optional[Settings] = None, par: int = 1) -> Path:
    """ Make sure a verified stream of all MLS on n points is cached; returns its path """
    if not 1 <= n <= MAX_ENUM:
        raise GroundTooLarge(n, MAX_ENUM)
    settings = settings or Settings.from_env()
    data_path, meta_path = cache_paths(n, settings)
    if data_path.exists():
        try:
            verify_cache(n, settings)
            log.info('cache hit for n=%d at %s', n, data_path)
            return data_path
        except CacheCorrupt as exc:
            log.warning('%s; regenerating', exc)
            data_path.replace(data_path.with_name(data_path.name + '.bad'))
    log.info('cache miss for n=%d, enumerating', n)
    count, digest = write_atomic(data_path, stream_lines(n, par))
    meta = CacheMeta(n=n, count=count, sha256=digest)
    write_atomic(meta_path, [meta.model_dump_json().encode() + b'\n'])
    return data_path
