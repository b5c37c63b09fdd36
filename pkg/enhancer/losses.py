"""Adversarial objectives, generator regularizers and critic gradient penalties.

A critic is any callable `critic(candidate, noisy) -> Tensor[B]`; a generator is any
callable `generator(noisy) -> Tensor[B, L]`.
"""
import logging

import attrs
import numpy as np

from enhancer.autodiff import Tensor, enable_grad, functions as F, grad
from enhancer.exceptions import ShapeError

logger = logging.getLogger(__name__)

PENALTY_MODES = ('snr', 'l1')
DISC_PENALTIES = ('r1r2', 'interp_gp')
SNR_EPS = 1e-8


@attrs.frozen
class LossWeights:
    lambda_snr: float = 10.0
    lambda_l1: float = 100.0
    gamma: float = 10.0
    lambda_gp: float = 10.0
    penalty_mode: str = 'snr'
    disc_penalty: str = 'r1r2'

    @property
    def penalty_weight(self):
        return self.lambda_snr if self.penalty_mode == 'snr' else self.lambda_l1

    def violations(self):
        problems = {}
        for field in ('lambda_snr', 'lambda_l1', 'gamma', 'lambda_gp'):
            if getattr(self, field) < 0:
                problems.setdefault(field, []).append('must be >= 0')
        if self.penalty_mode not in PENALTY_MODES:
            problems.setdefault('penalty_mode', []).append(f'must be one of {PENALTY_MODES}')
        if self.disc_penalty not in DISC_PENALTIES:
            problems.setdefault('disc_penalty', []).append(f'must be one of {DISC_PENALTIES}')
        return problems


@attrs.frozen
class LossBreakdown:
    """Scalar objective plus the float value of every term that went into it."""
    total: Tensor
    terms: dict


def _constant(x):
    return Tensor(x.data if isinstance(x, Tensor) else np.asarray(x))


def _check_pair(clean, enhanced):
    if tuple(clean.shape) != tuple(enhanced.shape):
        raise ShapeError(f"clean {clean.shape} and enhanced {enhanced.shape} differ in shape")
    if len(clean.shape) != 2:
        raise ShapeError(f"expected (B, L) waveforms, got {clean.shape}")


def snr_penalty(clean, enhanced, eps=SNR_EPS):
    """Batch mean of -10 log10((|x|^2 + eps) / (|x - x_hat|^2 + eps))."""
    _check_pair(clean, enhanced)
    clean = _constant(clean)
    signal = F.add(F.sum(F.square(clean), axis=1), eps)
    residual = F.add(F.sum(F.square(F.sub(clean, enhanced)), axis=1), eps)
    return F.mean(F.mul(F.log10(F.div(signal, residual)), -10.0))


def l1_penalty(clean, enhanced):
    """Sum of |x_hat - x| over samples, averaged over the batch."""
    _check_pair(clean, enhanced)
    clean = _constant(clean)
    return F.mul(F.sum(F.abs(F.sub(enhanced, clean))), 1.0 / clean.shape[0])


def zero_centered_penalty(critic, candidate, noisy, gamma, kind='r1'):
    """(gamma / 2) E[|grad_candidate critic(candidate, noisy)|^2].

    R1 evaluates it on clean data, R2 on generated data. The gradient is taken
    w.r.t. the candidate waveform only; the result stays differentiable w.r.t. the
    critic parameters.
    """
    if kind not in ('r1', 'r2'):
        raise ValueError(f"kind must be 'r1' or 'r2', got {kind!r}")
    if gamma == 0:
        return Tensor(0.0)
    point = Tensor(candidate.data if isinstance(candidate, Tensor) else candidate, requires_grad=True)
    # the inner gradient is needed even when the caller disabled recording
    with enable_grad():
        scores = critic(point, _constant(noisy))
        (gradient,) = grad(F.sum(scores), [point], create_graph=True)
        squared_norm = F.sum(F.square(gradient), axis=1)
        return F.mul(F.mean(squared_norm), gamma / 2.0)


def interp_gradient_penalty(critic, real, fake, noisy, lambda_gp, rng=None):
    """lambda_gp E[(|grad critic(eps x + (1 - eps) x_hat, y)| - 1)^2], one eps per batch item."""
    real = _constant(real)
    fake = _constant(fake)
    if real.shape != fake.shape:
        raise ShapeError(f"real {real.shape} and fake {fake.shape} differ in shape")
    rng = rng if rng is not None else np.random.default_rng()
    mix = rng.uniform(size=(real.shape[0], 1))
    point = Tensor(mix * real.data + (1.0 - mix) * fake.data, requires_grad=True)
    with enable_grad():
        (gradient,) = grad(F.sum(critic(point, _constant(noisy))), [point], create_graph=True)
        # small floor keeps the norm differentiable at a zero gradient
        norm = F.sqrt(F.add(F.sum(F.square(gradient), axis=1), 1e-12))
        return F.mul(F.mean(F.square(F.sub(norm, 1.0))), lambda_gp)


def discriminator_loss(critic, clean, enhanced, noisy, weights: LossWeights, rng=None) -> LossBreakdown:
    """-E[C(x, y)] + E[C(x_hat, y)] plus R1 + R2 (default) or the interpolated penalty."""
    enhanced = _constant(enhanced)
    clean = _constant(clean)
    noisy = _constant(noisy)
    real_scores = critic(clean, noisy)
    fake_scores = critic(enhanced, noisy)
    adversarial = F.sub(F.mean(fake_scores), F.mean(real_scores))
    terms = {'adversarial': adversarial.item()}
    if weights.disc_penalty == 'r1r2':
        r1 = zero_centered_penalty(critic, clean, noisy, weights.gamma, 'r1')
        r2 = zero_centered_penalty(critic, enhanced, noisy, weights.gamma, 'r2')
        total = F.add(F.add(adversarial, r1), r2)
        terms.update(r1=r1.item(), r2=r2.item(), gp=0.0)
    else:
        gp = interp_gradient_penalty(critic, clean, enhanced, noisy, weights.lambda_gp, rng)
        total = F.add(adversarial, gp)
        terms.update(r1=0.0, r2=0.0, gp=gp.item())
    terms['total'] = total.item()
    return LossBreakdown(total=total, terms=terms)


def generator_penalty(clean, enhanced, weights: LossWeights):
    if weights.penalty_mode == 'snr':
        return snr_penalty(clean, enhanced)
    return l1_penalty(clean, enhanced)


def generator_loss(critic, generator, clean, noisy, weights: LossWeights) -> LossBreakdown:
    """-E[C(G(y), y)] + lambda * penalty, the penalty chosen by `weights.penalty_mode`."""
    noisy = _constant(noisy)
    enhanced = generator(noisy)
    adversarial = F.neg(F.mean(critic(enhanced, noisy)))
    penalty = generator_penalty(clean, enhanced, weights)
    total = F.add(adversarial, F.mul(penalty, weights.penalty_weight))
    terms = {
        'adversarial': adversarial.item(),
        'penalty': penalty.item(),
        'total': total.item(),
    }
    return LossBreakdown(total=total, terms=terms)
