import numpy as np
import pytest

from freepoisson import (
    GridFunction,
    ShapeError,
    UniformGrid,
    fast_linear_convolution,
    fast_linear_convolution_2d,
    forward_dst,
    inverse_dst,
)
from freepoisson.transforms import InteriorModeArray, next_smooth_length


def dst_forward_oracle(f: GridFunction) -> np.ndarray:
    """Direct double/triple sum of the sine-series coefficient definition."""
    grid = f.grid
    out = np.zeros(grid.interior_shape)
    lengths = [grid.upper[s] - grid.lower[s] for s in range(grid.dim)]
    for k in np.ndindex(out.shape):
        total = 0.0
        for i in np.ndindex(out.shape):
            term = f.values[tuple(ii + 1 for ii in i)]
            for s in range(grid.dim):
                term *= np.sin((k[s] + 1) * np.pi * (i[s] + 1) / grid.panels[s])
            total += term
        scale = 1.0
        for s in range(grid.dim):
            scale *= (2.0 / lengths[s]) * grid.mesh[s]
        out[k] = total * scale
    return out


def dst_inverse_oracle(c: InteriorModeArray) -> np.ndarray:
    """Direct series summation at the interior nodes."""
    grid = c.grid
    out = np.zeros(grid.interior_shape)
    for i in np.ndindex(out.shape):
        total = 0.0
        for k in np.ndindex(out.shape):
            term = c.coefficients[k]
            for s in range(grid.dim):
                term *= np.sin((k[s] + 1) * np.pi * (i[s] + 1) / grid.panels[s])
            total += term
        out[i] = total
    return out


def conv1_oracle(kernel, data, start, stop):
    full = np.zeros(len(kernel) + len(data) - 1)
    for n in range(full.size):
        for q in range(len(data)):
            if 0 <= n - q < len(kernel):
                full[n] += kernel[n - q] * data[q]
    return full[start:stop]


def conv2_oracle(kernel, data, windows):
    full = np.zeros((kernel.shape[0] + data.shape[0] - 1,
                     kernel.shape[1] + data.shape[1] - 1))
    for n0 in range(full.shape[0]):
        for n1 in range(full.shape[1]):
            acc = 0.0
            for q0 in range(data.shape[0]):
                for q1 in range(data.shape[1]):
                    if 0 <= n0 - q0 < kernel.shape[0] and 0 <= n1 - q1 < kernel.shape[1]:
                        acc += kernel[n0 - q0, n1 - q1] * data[q0, q1]
            full[n0, n1] = acc
    (s0, e0), (s1, e1) = windows
    return full[s0:e0, s1:e1]


def test_single_mode_has_unit_coefficient():
    g = UniformGrid([-1.0, 0.5], [2.0, 3.5], [8, 10])
    f = GridFunction.from_callable(
        g,
        lambda x, y: np.sin(np.pi * (x - g.lower[0]) / 3.0)
        * np.sin(np.pi * (y - g.lower[1]) / 3.0),
    )
    beta = forward_dst(f).coefficients
    assert beta[0, 0] == pytest.approx(1.0, abs=1e-13)
    rest = beta.copy()
    rest[0, 0] = 0.0
    assert np.max(np.abs(rest)) < 1e-13


def test_forward_of_zero_is_zero():
    g = UniformGrid([0, 0], [1, 1], [5, 5])
    assert np.all(forward_dst(GridFunction.zeros(g)).coefficients == 0.0)


@pytest.mark.parametrize(
    "bounds,panels",
    [(((-1.0,), (2.0,)), (9,)),
     (((-1.0, 0.5), (2.0, 3.5)), (8, 10)),
     (((0.0, 0.0, -1.0), (1.0, 2.0, 1.0)), (4, 5, 6))],
)
def test_forward_matches_brute_force(bounds, panels):
    rng = np.random.default_rng(42)
    g = UniformGrid(bounds[0], bounds[1], panels)
    vals = np.zeros(g.shape)
    vals[(slice(1, -1),) * g.dim] = rng.standard_normal(g.interior_shape)
    f = GridFunction(g, vals)
    fast = forward_dst(f).coefficients
    direct = dst_forward_oracle(f)
    assert np.max(np.abs(fast - direct)) <= 1e-13 * np.max(np.abs(direct))


def test_inverse_matches_direct_series():
    rng = np.random.default_rng(3)
    g = UniformGrid([0.0, -1.0], [2.0, 1.0], [6, 7])
    c = InteriorModeArray(g, rng.standard_normal(g.interior_shape))
    fast = inverse_dst(c)
    assert np.all(fast.values[0, :] == 0.0) and np.all(fast.values[:, -1] == 0.0)
    direct = dst_inverse_oracle(c)
    assert np.max(np.abs(fast.interior() - direct)) <= 1e-13 * np.max(np.abs(direct))


def test_single_unit_coefficient_gives_sampled_mode():
    g = UniformGrid([0.0, 0.0], [1.0, 1.0], [6, 5])
    c = np.zeros(g.interior_shape)
    c[0, 0] = 1.0
    got = inverse_dst(InteriorModeArray(g, c))
    want = GridFunction.from_callable(
        g, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)
    )
    assert np.max(np.abs(got.interior() - want.interior())) < 1e-14


@pytest.mark.parametrize("panels", [(7,), (8, 9), (4, 6, 5), (11, 13)])
def test_round_trip(panels):
    rng = np.random.default_rng(len(panels))
    g = UniformGrid([0.0] * len(panels), [1.0] * len(panels), panels)
    vals = rng.standard_normal(g.shape)
    f = GridFunction(g, vals)
    back = inverse_dst(forward_dst(f))
    err = np.max(np.abs(back.interior() - f.interior()))
    assert err <= 1e-13 * np.max(np.abs(f.values))


def test_linearity():
    rng = np.random.default_rng(9)
    g = UniformGrid([0, 0], [1, 2], [9, 6])
    a = GridFunction(g, rng.standard_normal(g.shape))
    b = GridFunction(g, rng.standard_normal(g.shape))
    combo = GridFunction(g, 2.5 * a.values - 1.25 * b.values)
    lhs = forward_dst(combo).coefficients
    rhs = 2.5 * forward_dst(a).coefficients - 1.25 * forward_dst(b).coefficients
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(rhs))


def test_identity_kernel_convolution():
    rng = np.random.default_rng(1)
    data = rng.standard_normal(9)
    kernel = np.zeros(17)
    kernel[8] = 1.0
    out = fast_linear_convolution(kernel, data, (8, 17))
    assert np.allclose(out, data, rtol=0, atol=1e-14)


def test_zero_data_convolution():
    out = fast_linear_convolution(np.ones(12), np.zeros(5), (0, 16))
    assert np.all(out == 0.0)


@pytest.mark.parametrize("k,l", [(17, 9), (16, 16), (23, 11), (10, 3)])
def test_convolution_matches_loop_oracle(k, l):
    rng = np.random.default_rng(k * l)
    kernel = rng.standard_normal(k)
    data = rng.standard_normal(l)
    direct = conv1_oracle(kernel, data, 0, k + l - 1)
    fast = fast_linear_convolution(kernel, data, (0, k + l - 1))
    assert np.max(np.abs(fast - direct)) <= 1e-12 * np.max(np.abs(direct))
    window = fast_linear_convolution(kernel, data, (3, k))
    assert np.max(np.abs(window - direct[3:k])) <= 1e-12 * np.max(np.abs(direct))


def test_convolution_rejects_bad_shapes():
    with pytest.raises(ShapeError):
        fast_linear_convolution(np.ones(3), np.ones(5), (0, 1))
    with pytest.raises(ShapeError):
        fast_linear_convolution(np.ones(5), np.ones(3), (0, 8))


def test_identity_kernel_2d():
    rng = np.random.default_rng(2)
    data = rng.standard_normal((4, 5))
    kernel = np.zeros((9, 11))
    kernel[4, 5] = 1.0
    out = fast_linear_convolution_2d(kernel, data, ((4, 8), (5, 10)))
    assert np.allclose(out, data, rtol=0, atol=1e-14)


def test_separable_kernel_2d():
    rng = np.random.default_rng(4)
    k1, k2 = rng.standard_normal(7), rng.standard_normal(9)
    d1, d2 = rng.standard_normal(5), rng.standard_normal(6)
    full0, full1 = 7 + 5 - 1, 9 + 6 - 1
    out = fast_linear_convolution_2d(
        np.outer(k1, k2), np.outer(d1, d2), ((0, full0), (0, full1))
    )
    c1 = fast_linear_convolution(k1, d1, (0, full0))
    c2 = fast_linear_convolution(k2, d2, (0, full1))
    want = np.outer(c1, c2)
    assert np.max(np.abs(out - want)) <= 1e-12 * np.max(np.abs(want))


def test_convolution_2d_matches_loop_oracle():
    rng = np.random.default_rng(8)
    kernel = rng.standard_normal((9, 11))
    data = rng.standard_normal((5, 6))
    windows = ((2, 10), (4, 13))
    direct = conv2_oracle(kernel, data, windows)
    fast = fast_linear_convolution_2d(kernel, data, windows)
    assert np.max(np.abs(fast - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_next_smooth_length():
    assert next_smooth_length(1) == 1
    assert next_smooth_length(7) == 7
    assert next_smooth_length(11) == 12
    assert next_smooth_length(97) == 98  # 2 * 7 * 7
    assert next_smooth_length(211) == 216
    for n in (13, 37, 101, 499):
        m = next_smooth_length(n)
        assert m >= n
        k = m
        for p in (2, 3, 5, 7):
            while k % p == 0:
                k //= p
        assert k == 1


def test_forward_rejects_degenerate_grid():
    with pytest.raises(ShapeError):
        UniformGrid([0], [1], [1])
