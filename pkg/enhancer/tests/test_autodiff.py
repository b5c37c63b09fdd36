from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.test import SimpleTestCase

from enhancer.autodiff import (
    Tensor,
    backward,
    functions as F,
    grad,
    grad_check,
    no_grad,
    precision,
    set_check_nonfinite,
)
from enhancer.exceptions import DomainError, NonFiniteError, ShapeError

TOLERANCE = 1e-4


def _reference_conv1d(x, w, b, stride, dilation, padding, groups):
    batch, c_in, length = x.shape
    c_out, c_group, kernel = w.shape
    x = np.pad(x, ((0, 0), (0, 0), (padding, padding)))
    l_out = (length + 2 * padding - dilation * (kernel - 1) - 1) // stride + 1
    out = np.zeros((batch, c_out, l_out))
    per_group = c_out // groups
    for o in range(c_out):
        g = o // per_group
        for t in range(l_out):
            for c in range(c_group):
                for k in range(kernel):
                    out[:, o, t] += w[o, c, k] * x[:, g * c_group + c, t * stride + k * dilation]
        out[:, o, :] += b[o]
    return out


class ForwardTests(SimpleTestCase):

    def test_broadcast_arithmetic(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]])
        b = Tensor([10.0, 20.0])
        np.testing.assert_allclose((a + b).data, [[11, 22], [13, 24]])
        np.testing.assert_allclose((a * b - 1.0).data, [[9, 39], [29, 79]])
        np.testing.assert_allclose((a / 2.0).data, [[0.5, 1.0], [1.5, 2.0]])

    def test_sum_accumulates_in_float64(self):
        x = Tensor(np.full(10 ** 6, 0.1, dtype=np.float32))
        self.assertAlmostEqual(F.sum(x).item(), 10 ** 6 * np.float32(0.1), delta=1e-2)

    def test_conv1d_matches_direct_loop(self):
        rng = np.random.default_rng(3)
        cases = [
            dict(c_in=3, c_out=4, kernel=3, stride=1, dilation=1, padding=1, groups=1),
            dict(c_in=2, c_out=5, kernel=4, stride=2, dilation=1, padding=0, groups=1),
            dict(c_in=4, c_out=4, kernel=3, stride=1, dilation=4, padding=4, groups=4),
            dict(c_in=4, c_out=6, kernel=1, stride=1, dilation=1, padding=0, groups=1),
            dict(c_in=4, c_out=2, kernel=1, stride=3, dilation=1, padding=0, groups=1),
        ]
        with precision('float64'):
            for case in cases:
                with self.subTest(**case):
                    x = rng.standard_normal((2, case['c_in'], 19))
                    w = rng.standard_normal((case['c_out'], case['c_in'] // case['groups'], case['kernel']))
                    b = rng.standard_normal(case['c_out'])
                    got = F.conv1d(Tensor(x), Tensor(w), Tensor(b), stride=case['stride'],
                                   dilation=case['dilation'], padding=case['padding'], groups=case['groups'])
                    expected = _reference_conv1d(x, w, b, case['stride'], case['dilation'],
                                                 case['padding'], case['groups'])
                    np.testing.assert_allclose(got.data, expected, rtol=1e-10, atol=1e-10)

    def test_small_worked_examples(self):
        out = F.conv1d(Tensor([[1.0, 2.0, 3.0, 4.0, 5.0]]), Tensor(np.ones((1, 1, 3))), dilation=2, padding=2)
        np.testing.assert_allclose(out.data, [[4, 6, 9, 6, 8]])
        out = F.linear(Tensor([1.0, 2.0]), Tensor([[1.0, 1.0], [1.0, -1.0]]), Tensor([0.0, 1.0]))
        np.testing.assert_allclose(out.data, [3, 0])
        # a single sample has zero variance: only the shift survives
        out = F.instance_norm(Tensor(np.full((1, 2, 1), 7.0)), Tensor([2.0, 3.0]), Tensor([0.5, -1.0]))
        np.testing.assert_allclose(out.data[0, :, 0], [0.5, -1.0])

    def test_conv1d_unbatched_input(self):
        x = Tensor(np.ones((2, 8)))
        w = Tensor(np.ones((3, 2, 3)))
        self.assertEqual(F.conv1d(x, w).shape, (3, 6))

    def test_conv1d_rejects_bad_shapes(self):
        with self.assertRaises(ShapeError):
            F.conv1d(Tensor(np.ones((1, 3, 8))), Tensor(np.ones((2, 2, 3))))
        with self.assertRaises(ShapeError):
            F.conv1d(Tensor(np.ones((1, 2, 2))), Tensor(np.ones((2, 2, 5))))

    def test_fold_is_adjoint_of_unfold(self):
        rng = np.random.default_rng(0)
        index = F.frame_index(7, 4, 2)
        x = rng.standard_normal((2, 16))
        y = rng.standard_normal((2, 7, 4))
        with precision('float64'):
            left = np.sum(F.unfold(Tensor(x), index).data * y)
            right = np.sum(x * F.fold(Tensor(y), index, 16).data)
        self.assertAlmostEqual(left, right, places=10)

    def test_instance_norm_statistics(self):
        rng = np.random.default_rng(1)
        with precision('float64'):
            x = Tensor(rng.standard_normal((2, 3, 50)) * 5 + 2)
            out = F.instance_norm(x, Tensor(np.ones(3)), Tensor(np.zeros(3)), eps=1e-8).data
        np.testing.assert_allclose(out.mean(axis=-1), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.var(axis=-1), 1.0, atol=1e-6)

    def test_prelu(self):
        out = F.prelu(Tensor([-2.0, 0.0, 3.0]), Tensor([0.25]))
        np.testing.assert_allclose(out.data, [-0.5, 0.0, 3.0])

    def test_mean_over_empty_axis(self):
        with self.assertRaises(ShapeError):
            F.mean(Tensor(np.ones((2, 0))), axis=1)

    def test_log10_domain(self):
        with self.assertRaises(DomainError):
            F.log10(Tensor([1.0, 0.0]))
        with self.assertRaises(DomainError):
            F.sqrt(Tensor([-1.0]))

    def test_einsum_spec_errors(self):
        with self.assertRaises(ShapeError):
            F.einsum('ij,jk->ik', Tensor(np.ones((2, 3))), Tensor(np.ones((4, 2))))
        with self.assertRaises(ShapeError):
            F.einsum('ii,ij->j', Tensor(np.ones((2, 2))), Tensor(np.ones((2, 2))))


class GradientCheckTests(SimpleTestCase):
    """Analytic gradients against central differences in 64-bit mode."""

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def check(self, fn, *shapes, positive=False):
        inputs = [self.rng.standard_normal(shape) for shape in shapes]
        if positive:
            inputs = [np.abs(x) + 0.5 for x in inputs]
        self.assertLess(grad_check(fn, inputs), TOLERANCE)

    def test_elementwise_ops(self):
        self.check(lambda a, b: F.add(a, b), (3, 4), (4,))
        self.check(lambda a, b: F.sub(a, b), (3, 1), (3, 4))
        self.check(lambda a, b: F.mul(a, b), (2, 3), (2, 3))
        self.check(lambda a, b: F.div(a, b), (2, 3), (3,), positive=True)
        self.check(lambda a: F.neg(a), (5,))
        self.check(lambda a: F.square(a), (5,))
        self.check(lambda a: F.sqrt(a), (5,), positive=True)
        self.check(lambda a: F.log10(a), (5,), positive=True)

    def test_piecewise_ops_away_from_kinks(self):
        x = self.rng.standard_normal(10)
        x = np.where(np.abs(x) < 0.1, 0.5, x)
        self.assertLess(grad_check(F.abs, [x]), TOLERANCE)
        self.assertLess(grad_check(F.relu, [x]), TOLERANCE)
        self.assertLess(grad_check(lambda a, s: F.prelu(a, s), [x, np.array([0.3])]), TOLERANCE)

    def test_shape_ops(self):
        self.check(lambda a: F.sum(a, axis=1), (3, 4))
        self.check(lambda a: F.mean(a, axis=(0, 2), keepdims=True), (2, 3, 4))
        self.check(lambda a: F.reshape(a, (6, 2)), (3, 4))
        self.check(lambda a: F.permute(a, (2, 0, 1)), (2, 3, 4))
        self.check(lambda a: F.pad_axis(a, -1, 2, 1), (2, 5))
        self.check(lambda a: F.slice_axis(a, 1, 1, 4), (2, 5))
        self.check(lambda a, b: F.concat([a, b], axis=1), (2, 3), (2, 2))
        index = F.frame_index(4, 3, 2)
        self.check(lambda a: F.unfold(a, index), (2, 9))
        self.check(lambda a: F.fold(a, index, 9), (2, 4, 3))
        self.check(lambda a, b: F.einsum('bct,oc->bot', a, b), (2, 3, 5), (4, 3))

    def test_layer_ops(self):
        self.check(lambda x, w, b: F.conv1d(x, w, b, stride=2, padding=1), (2, 3, 11), (4, 3, 3), (4,))
        self.check(lambda x, w, b: F.conv1d(x, w, b, dilation=2, padding=2, groups=3), (1, 3, 9), (3, 1, 3), (3,))
        self.check(lambda x, w, b: F.linear(x, w, b), (2, 5, 3), (4, 3), (4,))
        self.check(lambda x, g, s: F.instance_norm(x, g, s), (2, 3, 8), (3,), (3,))

    def test_eps_outside_range(self):
        with self.assertRaises(ValueError):
            grad_check(F.square, [np.ones(2)], eps=1e-2)


class DifferentiationTests(SimpleTestCase):

    def test_second_derivative(self):
        with precision('float64'):
            x = Tensor([2.0], requires_grad=True)
            y = F.sum(F.mul(F.square(x), x))
            (dx,) = grad(y, [x], create_graph=True)
            (ddx,) = grad(F.sum(dx), [x])
        self.assertAlmostEqual(dx.data[0], 12.0)
        self.assertAlmostEqual(ddx.data[0], 12.0)

    def test_gradient_of_gradient_norm(self):
        # d/dw of |d(w.x)/dx|^2 = 2w
        with precision('float64'):
            w = Tensor([3.0, 4.0], requires_grad=True)
            x = Tensor([1.0, -1.0], requires_grad=True)
            (gx,) = grad(F.sum(F.mul(w, x)), [x], create_graph=True)
            penalty = F.sum(F.square(gx))
            backward(penalty, inputs=[w])
        np.testing.assert_allclose(w.grad, [6.0, 8.0])

    def test_backward_accumulates_until_zeroed(self):
        w = Tensor([1.0, 2.0], requires_grad=True)
        backward(F.sum(F.mul(w, 3.0)))
        backward(F.sum(F.mul(w, 3.0)))
        np.testing.assert_allclose(w.grad, [6.0, 6.0])
        w.zero_grad()
        backward(F.sum(w))
        np.testing.assert_allclose(w.grad, [1.0, 1.0])

    def test_grad_of_unused_input_is_zero(self):
        a = Tensor([1.0], requires_grad=True)
        b = Tensor([5.0, 6.0], requires_grad=True)
        ga, gb = grad(F.sum(F.square(a)), [a, b])
        np.testing.assert_allclose(gb.data, [0.0, 0.0])
        np.testing.assert_allclose(ga.data, [2.0])

    def test_grad_needs_scalar(self):
        a = Tensor([1.0, 2.0], requires_grad=True)
        with self.assertRaises(ShapeError):
            grad(F.square(a), [a])

    def test_no_grad_records_nothing(self):
        a = Tensor([1.0], requires_grad=True)
        with no_grad():
            b = F.mul(a, 2.0)
        self.assertFalse(b.requires_grad)
        self.assertIsNone(b.node)

    def test_nonfinite_policy(self):
        a = Tensor([1e30], dtype=np.float32)
        with self.assertRaises(NonFiniteError):
            F.mul(a, a)
        previous = set_check_nonfinite(False)
        try:
            self.assertTrue(np.isinf(F.mul(a, a).data[0]))
        finally:
            set_check_nonfinite(previous)

    def test_nonfinite_policy_is_shared_with_worker_threads(self):
        previous = set_check_nonfinite(False)
        self.addCleanup(set_check_nonfinite, previous)
        a = Tensor([1e30], dtype=np.float32)
        with ThreadPoolExecutor(max_workers=1) as pool:
            product = pool.submit(F.mul, a, a).result()
        self.assertTrue(np.isinf(product.data[0]))

    def test_grad_sweep_skips_branches_off_the_requested_inputs(self):
        with precision('float64'):
            w = Tensor([3.0, 4.0], requires_grad=True)
            x = Tensor([1.0, -1.0], requires_grad=True)
            product = F.mul(w, x)
            (gx,) = grad(F.sum(product), [x], create_graph=True)
            self.assertEqual(product.node.needs_input_grad, (False, True))
            np.testing.assert_allclose(gx.data, [3.0, 4.0])
            self.assertTrue(gx.requires_grad)
            # a later full sweep over the same node still reaches every leaf
            backward(F.sum(product))
        self.assertEqual(product.node.needs_input_grad, (True, True))
        np.testing.assert_allclose(w.grad, [1.0, -1.0])
        np.testing.assert_allclose(x.grad, [3.0, 4.0])

    def test_grad_wrt_interior_tensor(self):
        with precision('float64'):
            x = Tensor([2.0, 3.0], requires_grad=True)
            hidden = F.mul(x, x)
            (g_hidden, g_x) = grad(F.sum(F.mul(hidden, 5.0)), [hidden, x])
        np.testing.assert_allclose(g_hidden.data, [5.0, 5.0])
        np.testing.assert_allclose(g_x.data, [20.0, 30.0])

    def test_precision_context(self):
        with precision('float64'):
            self.assertEqual(Tensor([1.0]).dtype, np.float64)
        self.assertEqual(Tensor([1.0]).dtype, np.float32)
        with self.assertRaises(ValueError):
            with precision('float16'):
                pass
