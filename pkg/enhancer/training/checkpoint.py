"""Checkpoint file format.

Layout, all integers little-endian:

    offset 0   4 bytes   magic b"TDCG"
    offset 4   u32       format version (1)
    offset 8   32 bytes  raw SHA-256 config digest
    offset 40  u32       header length H
    offset 44  H bytes   UTF-8 JSON header
    offset 44+H          tensor data

The header holds a `tensors` table of {name, dtype, shape, offset, nbytes} with
offsets relative to the start of the tensor data, the step counter, the RNG
state, the optimizer step counters, the config dict and the SHA-256 of the
tensor data. Tensor data is raw little-endian C-order bytes.

Tensor names: `generator/<param>`, `discriminator/<param>`,
`adam_gen/{m,v}/<param>`, `adam_disc/{m,v}/<param>`.
"""
import hashlib
import json
import logging
import os
import struct
import tempfile
from pathlib import Path

import attrs
import numpy as np

from enhancer.exceptions import (
    DataError,
    DigestMismatchError,
    FormatError,
    TruncatedCheckpointError,
    VersionMismatchError,
)
from enhancer.training.config import TrainConfig

logger = logging.getLogger(__name__)

MAGIC = b'TDCG'
FORMAT_VERSION = 1
_PREFIX = struct.Struct('<4sI32sI')

_GROUPS = ('generator', 'discriminator', 'adam_gen/m', 'adam_gen/v', 'adam_disc/m', 'adam_disc/v')


@attrs.define(eq=False)
class TrainingState:
    """Everything needed to continue a run exactly where it stopped."""
    config: TrainConfig
    step: int
    generator: dict
    discriminator: dict
    adam_gen: dict
    adam_disc: dict
    rng_state: dict

    def tensors(self):
        groups = {
            'generator': self.generator,
            'discriminator': self.discriminator,
            'adam_gen/m': self.adam_gen['m'],
            'adam_gen/v': self.adam_gen['v'],
            'adam_disc/m': self.adam_disc['m'],
            'adam_disc/v': self.adam_disc['v'],
        }
        for group in _GROUPS:
            for name in sorted(groups[group]):
                yield f"{group}/{name}", np.asarray(groups[group][name])


def _little_endian(array):
    return np.ascontiguousarray(array, dtype=array.dtype.newbyteorder('<'))


def save_checkpoint(state: TrainingState, path):
    """Write atomically: a temp file in the target folder renamed over `path`."""
    path = Path(path)
    table = []
    chunks = []
    offset = 0
    for name, array in state.tensors():
        raw = _little_endian(array).tobytes()
        table.append({'name': name, 'dtype': array.dtype.str.lstrip('<>|='), 'shape': list(array.shape),
                      'offset': offset, 'nbytes': len(raw)})
        chunks.append(raw)
        offset += len(raw)
    payload = b''.join(chunks)
    header = {
        'tensors': table,
        'step': state.step,
        'rng_state': state.rng_state,
        'adam_gen_t': state.adam_gen['t'],
        'adam_disc_t': state.adam_disc['t'],
        'payload_sha256': hashlib.sha256(payload).hexdigest(),
        'config': state.config.to_dict(),
    }
    header_bytes = json.dumps(header, sort_keys=True).encode('utf-8')
    digest = bytes.fromhex(state.config.digest())
    blob = _PREFIX.pack(MAGIC, FORMAT_VERSION, digest, len(header_bytes)) + header_bytes + payload
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix='.tmp')
        try:
            with os.fdopen(fd, 'wb') as handle:
                handle.write(blob)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise DataError(f"{path}: cannot write checkpoint ({exc.strerror or exc})") from exc
    logger.info('checkpoint step %d written to %s (%d tensors)', state.step, path, len(table))
    return path


def read_header(path):
    """(config digest hex, header dict, tensor data bytes) of a checkpoint file."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise DataError(f"{path}: cannot read checkpoint ({exc.strerror or exc})") from exc
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise FormatError(f"{path}: not a checkpoint (bad magic {blob[:4]!r})")
    if len(blob) < _PREFIX.size:
        raise TruncatedCheckpointError(f"{path}: file ends inside the fixed prefix")
    _, version, digest, header_len = _PREFIX.unpack_from(blob)
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, this build reads {FORMAT_VERSION}")
    header_end = _PREFIX.size + header_len
    if len(blob) < header_end:
        raise TruncatedCheckpointError(f"{path}: file ends inside the header")
    try:
        header = json.loads(blob[_PREFIX.size:header_end].decode('utf-8'))
    except ValueError as exc:
        raise FormatError(f"{path}: header is not valid JSON ({exc})") from exc
    return digest.hex(), header, blob[header_end:]


def load_checkpoint(path, expected_digest=None) -> TrainingState:
    """Read a checkpoint; `expected_digest` (hex) pins the config it must have been written with."""
    path = Path(path)
    digest, header, payload = read_header(path)
    needed = max((entry['offset'] + entry['nbytes'] for entry in header['tensors']), default=0)
    if len(payload) < needed:
        raise TruncatedCheckpointError(f"{path}: tensor data holds {len(payload)} of {needed} bytes")
    if hashlib.sha256(payload[:needed]).hexdigest() != header['payload_sha256']:
        raise FormatError(f"{path}: tensor data checksum mismatch")
    config = TrainConfig.from_dict(header['config'])
    if config.digest() != digest:
        raise DigestMismatchError(f"{path}: embedded config does not match the recorded digest")
    if expected_digest is not None and digest != expected_digest:
        raise DigestMismatchError(f"{path}: written for config {digest[:12]}, expected {expected_digest[:12]}")

    groups = {group: {} for group in _GROUPS}
    for entry in header['tensors']:
        group = next((g for g in _GROUPS if entry['name'].startswith(g + '/')), None)
        if group is None:
            raise FormatError(f"{path}: unknown tensor group in '{entry['name']}'")
        name = entry['name'][len(group) + 1:]
        raw = payload[entry['offset']:entry['offset'] + entry['nbytes']]
        dtype = np.dtype(entry['dtype']).newbyteorder('<')
        groups[group][name] = np.frombuffer(raw, dtype=dtype).reshape(entry['shape']).astype(dtype.newbyteorder('='))
    logger.info('loaded checkpoint step %d from %s', header['step'], path)
    return TrainingState(
        config=config,
        step=int(header['step']),
        generator=groups['generator'],
        discriminator=groups['discriminator'],
        adam_gen={'t': int(header['adam_gen_t']), 'm': groups['adam_gen/m'], 'v': groups['adam_gen/v']},
        adam_disc={'t': int(header['adam_disc_t']), 'm': groups['adam_disc/m'], 'v': groups['adam_disc/v']},
        rng_state=header['rng_state'],
    )
