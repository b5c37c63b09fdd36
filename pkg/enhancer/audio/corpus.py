"""Paired corpus on disk: clean/<id>.wav, noisy/<id>.wav and manifest.json."""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from enhancer.audio.clip import PairedClip
from enhancer.audio.wav import read_wav, write_wav
from enhancer.exceptions import CorpusError, DataError

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def save_corpus(pairs, directory):
    """Write every pair plus the manifest mapping id -> {snr_db, noise_kind, seed}."""
    directory = Path(directory)
    manifest = {}
    for pair in sorted(pairs, key=lambda p: p.id):
        write_wav(pair.clean, directory / 'clean' / f"{pair.id}.wav")
        write_wav(pair.noisy, directory / 'noisy' / f"{pair.id}.wav")
        manifest[pair.id] = pair.metadata()
    try:
        (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True))
    except OSError as exc:
        raise DataError(f"{directory / MANIFEST_NAME}: {exc.strerror or exc}") from exc
    logger.info('wrote %d pairs to %s', len(manifest), directory)
    return directory


def load_corpus(directory, workers=1):
    """Pairs sorted by id. Without a manifest, ids are the file stems present in both folders."""
    directory = Path(directory)
    clean_dir, noisy_dir = directory / 'clean', directory / 'noisy'
    for folder in (directory, clean_dir, noisy_dir):
        if not folder.is_dir():
            raise CorpusError(f"corpus folder not found: {folder}")
    manifest_path = directory / MANIFEST_NAME
    if manifest_path.exists():
        try:
            manifest = json.loads(manifest_path.read_text())
        except ValueError as exc:
            raise CorpusError(f"{manifest_path}: invalid JSON ({exc})") from exc
    else:
        stems = {p.stem for p in clean_dir.glob('*.wav')} & {p.stem for p in noisy_dir.glob('*.wav')}
        manifest = {stem: {} for stem in stems}
    if not manifest:
        raise CorpusError(f"no paired clips under {directory}")

    def load(clip_id):
        meta = manifest[clip_id]
        return PairedClip(
            id=clip_id,
            clean=read_wav(clean_dir / f"{clip_id}.wav"),
            noisy=read_wav(noisy_dir / f"{clip_id}.wav"),
            snr_db=float(meta.get('snr_db', float('nan'))),
            noise_kind=meta.get('noise_kind', 'unknown'),
            seed=int(meta.get('seed', -1)),
        )

    ids = sorted(manifest)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        pairs = list(pool.map(load, ids))
    logger.info('loaded %d pairs from %s', len(pairs), directory)
    return pairs
