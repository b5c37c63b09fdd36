"""Paired training runs that differ only in the generator penalty (SNR vs L1)."""
import logging

import attrs

from enhancer.metrics.evaluation import CSV_COLUMNS, Enhancer, EvalReport, evaluate_corpus
from enhancer.training.trainer import train

logger = logging.getLogger(__name__)

METRICS = CSV_COLUMNS[1:]


@attrs.frozen
class SeedComparison:
    seed: int
    snr: EvalReport
    l1: EvalReport

    @property
    def deltas(self):
        """SNR-mode mean minus L1-mode mean, per metric."""
        return {metric: self.snr.mean(metric) - self.l1.mean(metric) for metric in METRICS}

    @property
    def snr_at_least_l1(self):
        return self.deltas['segsnr_out'] >= 0


@attrs.frozen
class PenaltyComparison:
    runs: tuple = attrs.field(converter=tuple)

    @property
    def mean_deltas(self):
        return {metric: sum(run.deltas[metric] for run in self.runs) / len(self.runs) for metric in METRICS}

    @property
    def direction_holds(self):
        """Whether the SNR penalty reached at least the L1 segSNR on every seed. Recorded, not enforced."""
        return all(run.snr_at_least_l1 for run in self.runs)

    def to_dict(self):
        return {
            'seeds': [run.seed for run in self.runs],
            'runs': [
                {
                    'seed': run.seed,
                    'snr': run.snr.to_dict(),
                    'l1': run.l1.to_dict(),
                    'deltas': run.deltas,
                    'snr_at_least_l1': run.snr_at_least_l1,
                }
                for run in self.runs
            ],
            'mean_deltas': self.mean_deltas,
            'direction_holds': self.direction_holds,
        }


def compare_penalties(cfg, corpus, seeds, eval_corpus=None, strict=True, workers=1) -> PenaltyComparison:
    """Train one model per (seed, penalty mode) and score both on `eval_corpus` (default: `corpus`)."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError('compare_penalties needs at least one seed')
    eval_corpus = eval_corpus if eval_corpus is not None else corpus
    runs = []
    for seed in seeds:
        reports = {}
        for mode in ('snr', 'l1'):
            run_cfg = cfg.with_seed(seed).with_penalty(mode)
            result = train(run_cfg, corpus, strict=strict)
            reports[mode] = evaluate_corpus(Enhancer(result.generator, run_cfg.batch_size), eval_corpus,
                                            run_cfg, workers=workers)
        run = SeedComparison(seed=seed, snr=reports['snr'], l1=reports['l1'])
        logger.info('seed %d: segSNR snr-mode %.3f dB, l1-mode %.3f dB (delta %.3f)', seed,
                    run.snr.mean('segsnr_out'), run.l1.mean('segsnr_out'), run.deltas['segsnr_out'])
        runs.append(run)
    return PenaltyComparison(runs=runs)
