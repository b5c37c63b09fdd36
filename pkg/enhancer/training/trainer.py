"""Alternating critic / generator optimization with two learning rates."""
import csv
import logging
import math
import time
from pathlib import Path

import attrs
import numpy as np

from enhancer.audio.dsp import frame_signal, pre_emphasis
from enhancer.autodiff import Tensor, backward, frozen, no_grad
from enhancer.exceptions import CorpusError, DataError, DomainError, NonFiniteError, TrainingAbort
from enhancer.losses import discriminator_loss, generator_loss
from enhancer.networks import build_discriminator, build_generator
from enhancer.training.checkpoint import TrainingState, load_checkpoint, save_checkpoint
from enhancer.training.config import TrainConfig
from enhancer.training.optim import Adam

logger = logging.getLogger(__name__)

LOG_COLUMNS = ('step', 'loss_d', 'loss_g', 'penalty', 'r1', 'r2', 'wall_ms')
LOG_NAME = 'loss_log.csv'
FINAL_NAME = 'final.tdcg'


@attrs.frozen
class StepLog:
    step: int
    epoch: int
    loss_d: float
    loss_g: float
    penalty: float
    r1: float
    r2: float
    gp: float
    wall_ms: int

    def row(self):
        return [self.step, repr(self.loss_d), repr(self.loss_g), repr(self.penalty),
                repr(self.r1), repr(self.r2), self.wall_ms]


@attrs.frozen(eq=False)
class TrainResult:
    generator: object
    discriminator: object
    logs: list
    step: int
    config_digest: str
    checkpoints: list = attrs.Factory(list)
    final_checkpoint: Path | None = None


def prepare_training_frames(corpus, frame_len, shift, coefficient=0.95):
    """Pre-emphasized (clean, noisy) frame matrices, one row per frame, pairs aligned."""
    if not corpus:
        raise CorpusError('training corpus is empty')
    clean_frames, noisy_frames = [], []
    for pair in corpus:
        if len(pair.clean) != len(pair.noisy):
            raise DataError(f"pair '{pair.id}': clean has {len(pair.clean)} samples, noisy {len(pair.noisy)}")
        clean = pair.clean.with_samples(pre_emphasis(pair.clean.samples, coefficient))
        noisy = pair.noisy.with_samples(pre_emphasis(pair.noisy.samples, coefficient))
        clean_frames.append(frame_signal(clean, frame_len, shift).frames)
        noisy_frames.append(frame_signal(noisy, frame_len, shift).frames)
    return np.concatenate(clean_frames), np.concatenate(noisy_frames)


class Trainer:
    """Owns both networks, both optimizers and the step counter of one run.

    Step s (0-based) consumes batch s mod batches_per_epoch of epoch
    s // batches_per_epoch; every epoch is a fresh permutation seeded by
    (seed, epoch), so any step can be replayed from the counter alone. The
    critic takes `disc_steps_per_gen_step` updates against the detached
    generator output of the batch, then the generator takes one.
    """

    def __init__(self, cfg: TrainConfig, clean_frames, noisy_frames, strict=False):
        self.cfg = cfg.validate()
        self.digest = cfg.digest()
        self.clean_frames = clean_frames
        self.noisy_frames = noisy_frames
        self.strict = strict
        self.generator = build_generator(cfg.model, cfg.seed)
        self.discriminator = build_discriminator(cfg.discriminator, cfg.model.frame_len, cfg.seed + 1)
        # two-timescale update rule: separate learning rates per network
        self.opt_disc = Adam(self.discriminator.named_parameters(), cfg.lr_disc,
                             cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        self.opt_gen = Adam(self.generator.named_parameters(), cfg.lr_gen,
                            cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        self.rng = np.random.default_rng([cfg.seed, 2])
        self.step = 0
        self._permutations = {}

    @property
    def batches_per_epoch(self):
        return math.ceil(len(self.clean_frames) / self.cfg.batch_size)

    @property
    def total_steps(self):
        total = self.cfg.epochs * self.batches_per_epoch
        if self.cfg.max_gen_steps is not None:
            total = min(total, self.cfg.max_gen_steps)
        return total

    def batch_indices(self, step):
        epoch, index = divmod(step, self.batches_per_epoch)
        if epoch not in self._permutations:
            rng = np.random.default_rng([self.cfg.seed, epoch])
            self._permutations = {epoch: rng.permutation(len(self.clean_frames))}
        order = self._permutations[epoch]
        # the last batch of an epoch may be short
        return epoch, order[index * self.cfg.batch_size:(index + 1) * self.cfg.batch_size]

    def state(self):
        return TrainingState(
            config=self.cfg,
            step=self.step,
            generator=self.generator.state_dict(),
            discriminator=self.discriminator.state_dict(),
            adam_gen=self.opt_gen.state_dict(),
            adam_disc=self.opt_disc.state_dict(),
            rng_state=self.rng.bit_generator.state,
        )

    def restore(self, state: TrainingState):
        self.generator.load_state_dict(state.generator)
        self.discriminator.load_state_dict(state.discriminator)
        self.opt_gen.load_state_dict(state.adam_gen)
        self.opt_disc.load_state_dict(state.adam_disc)
        self.rng.bit_generator.state = state.rng_state
        self.step = state.step

    def _guarded(self, phase, compute):
        try:
            breakdown = compute()
        except (NonFiniteError, DomainError) as exc:
            raise TrainingAbort(self.step + 1, phase, str(exc)) from exc
        for term, value in breakdown.terms.items():
            if not math.isfinite(value):
                raise TrainingAbort(self.step + 1, f"{phase}.{term}")
        return breakdown

    def _backward(self, phase, loss, params):
        try:
            backward(loss, inputs=params)
        except NonFiniteError as exc:
            raise TrainingAbort(self.step + 1, phase, str(exc)) from exc

    def train_step(self):
        started = time.perf_counter()
        epoch, indices = self.batch_indices(self.step)
        clean = Tensor(self.clean_frames[indices])
        noisy = Tensor(self.noisy_frames[indices])
        gen_params = self.generator.parameters()
        disc_params = self.discriminator.parameters()
        weights = self.cfg.weights

        try:
            with no_grad():
                enhanced = self.generator(noisy)
        except (NonFiniteError, DomainError) as exc:
            raise TrainingAbort(self.step + 1, 'generator', str(exc)) from exc
        for _ in range(self.cfg.disc_steps_per_gen_step):
            self.opt_disc.zero_grad()
            with frozen(gen_params):
                loss_d = self._guarded('loss_d', lambda: discriminator_loss(
                    self.discriminator, clean, enhanced, noisy, weights, self.rng))
                self._backward('loss_d', loss_d.total, disc_params)
            self.opt_disc.step()

        self.opt_gen.zero_grad()
        with frozen(disc_params):
            loss_g = self._guarded('loss_g', lambda: generator_loss(
                self.discriminator, self.generator, clean, noisy, weights))
            self._backward('loss_g', loss_g.total, gen_params)
        self.opt_gen.step()

        self.step += 1
        wall_ms = 0 if self.strict else int(round((time.perf_counter() - started) * 1000))
        return StepLog(
            step=self.step, epoch=epoch,
            loss_d=loss_d.terms['total'], loss_g=loss_g.terms['total'], penalty=loss_g.terms['penalty'],
            r1=loss_d.terms['r1'], r2=loss_d.terms['r2'], gp=loss_d.terms['gp'], wall_ms=wall_ms,
        )

    def fit(self, out_dir=None):
        out_dir = Path(out_dir) if out_dir is not None else None
        logs, checkpoints = [], []
        writer = handle = None
        if out_dir is not None:
            log_path = out_dir / LOG_NAME
            try:
                out_dir.mkdir(parents=True, exist_ok=True)
                fresh = not log_path.exists() or self.step == 0
                handle = log_path.open('w' if fresh else 'a', newline='')
            except OSError as exc:
                raise DataError(f"{log_path}: {exc.strerror or exc}") from exc
            writer = csv.writer(handle)
            if fresh:
                writer.writerow(LOG_COLUMNS)
        logger.info('training %d steps from step %d (%d frames, %d batches/epoch, config %s)',
                    self.total_steps, self.step, len(self.clean_frames), self.batches_per_epoch, self.digest[:12])
        try:
            while self.step < self.total_steps:
                entry = self.train_step()
                logs.append(entry)
                if writer is not None:
                    writer.writerow(entry.row())
                    handle.flush()
                if entry.step % self.cfg.log_every == 0 or entry.step == self.total_steps:
                    logger.info('step %d epoch %d loss_d %.4f loss_g %.4f penalty %.4f r1 %.4f r2 %.4f',
                                entry.step, entry.epoch, entry.loss_d, entry.loss_g, entry.penalty,
                                entry.r1, entry.r2)
                if out_dir is not None and entry.step % self.cfg.checkpoint_every == 0:
                    path = out_dir / 'checkpoints' / f"step_{entry.step:06d}.tdcg"
                    checkpoints.append(save_checkpoint(self.state(), path))
        finally:
            if handle is not None:
                handle.close()
        final = save_checkpoint(self.state(), out_dir / FINAL_NAME) if out_dir is not None else None
        return TrainResult(generator=self.generator, discriminator=self.discriminator, logs=logs,
                           step=self.step, config_digest=self.digest, checkpoints=checkpoints,
                           final_checkpoint=final)


def train(cfg: TrainConfig, corpus, out_dir=None, resume=None, strict=False) -> TrainResult:
    """Train both networks on a paired corpus.

    `resume` names a checkpoint written with the same config; training continues
    from its step with identical batches, optimizer moments and RNG state.
    """
    cfg.validate()
    clean, noisy = prepare_training_frames(corpus, cfg.model.frame_len, cfg.effective_frame_shift, cfg.pre_emphasis)
    trainer = Trainer(cfg, clean, noisy, strict=strict)
    if resume is not None:
        trainer.restore(load_checkpoint(resume, expected_digest=trainer.digest))
        logger.info('resuming from %s at step %d', resume, trainer.step)
    return trainer.fit(out_dir)
