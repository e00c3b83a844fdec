import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from findistress.kernel import (
    KernelError,
    KernelSpec,
    gram_matrix,
    kernel_eval,
    parse_kernel,
)

SPECS = [KernelSpec.linear(), KernelSpec.polynomial(2), KernelSpec.sigmoid(), KernelSpec.rbf(0.25)]
coord = st.floats(min_value=-10, max_value=10, allow_nan=False)
vec3 = st.lists(coord, min_size=3, max_size=3)


class TestKernelEval:
    def test_rbf_identical_points(self):
        assert kernel_eval(KernelSpec.rbf(3.7), [1.0, -2.0], [1.0, -2.0]) == 1.0

    def test_rbf_value(self):
        # |x - z|^2 = 2
        assert kernel_eval(KernelSpec.rbf(0.25), [1, 0], [0, 1]) == pytest.approx(math.exp(-0.5))
        assert kernel_eval(KernelSpec.rbf(0.25), [1, 0], [0, 1]) == pytest.approx(0.60653, abs=1e-5)

    def test_linear(self):
        assert kernel_eval(KernelSpec.linear(), [1, 2], [3, 4]) == 11.0

    def test_polynomial(self):
        assert kernel_eval(KernelSpec.polynomial(2), [1, 0], [1, 0]) == 4.0

    def test_sigmoid(self):
        assert kernel_eval(KernelSpec.sigmoid(), [1, 0], [0, 1]) == pytest.approx(math.tanh(1.0))

    def test_dimension_mismatch(self):
        with pytest.raises(KernelError, match="dimension"):
            kernel_eval(KernelSpec.linear(), [1, 2], [1])

    @pytest.mark.parametrize("spec", SPECS, ids=str)
    @given(x=vec3, z=vec3)
    def test_symmetric_exactly(self, spec, x, z):
        assert kernel_eval(spec, x, z) == kernel_eval(spec, z, x)

    @given(x=vec3, z=vec3, gamma=st.floats(min_value=1e-3, max_value=10))
    def test_rbf_range(self, x, z, gamma):
        k = kernel_eval(KernelSpec.rbf(gamma), x, z)
        assert 0 <= k <= 1
        if x == z:
            assert k == 1.0

    def test_rbf_distinct_points_below_one(self):
        assert kernel_eval(KernelSpec.rbf(0.5), [0.0], [0.1]) < 1.0

    @given(x=vec3, z=vec3, a=st.floats(min_value=-5, max_value=5))
    def test_linear_homogeneous(self, x, z, a):
        lhs = kernel_eval(KernelSpec.linear(), [a * v for v in x], z)
        assert lhs == pytest.approx(a * kernel_eval(KernelSpec.linear(), x, z), rel=1e-9, abs=1e-9)


class TestSpec:
    @pytest.mark.parametrize(
        "text,spec",
        [
            ("linear", KernelSpec.linear()),
            ("poly:d=2", KernelSpec.polynomial(2)),
            ("poly", KernelSpec.polynomial(3)),
            ("sigmoid", KernelSpec.sigmoid()),
            ("rbf:gamma=0.25", KernelSpec.rbf(0.25)),
        ],
    )
    def test_parse_round_trip(self, text, spec):
        assert parse_kernel(text) == spec
        assert parse_kernel(str(spec)) == spec

    @pytest.mark.parametrize("text", ["rbf", "rbf:gamma=-1", "poly:d=0", "poly:d=1.5", "cubic", "linear:d=2"])
    def test_parse_rejects(self, text):
        with pytest.raises(KernelError):
            parse_kernel(text)

    def test_invalid_parameters(self):
        with pytest.raises(KernelError):
            KernelSpec("rbf", gamma=0.0)
        with pytest.raises(KernelError):
            KernelSpec("linear", gamma=1.0)


class TestGram:
    @pytest.mark.parametrize("spec", SPECS, ids=str)
    def test_matches_pointwise(self, spec):
        X = np.random.default_rng(0).normal(size=(6, 3))
        G = gram_matrix(spec, X)
        for i in range(6):
            for j in range(6):
                assert G[i, j] == pytest.approx(kernel_eval(spec, X[i], X[j]), rel=1e-12)
        assert (G == G.T).all()

    def test_rbf_diagonal(self, train_ds):
        assert (np.diag(gram_matrix(KernelSpec.rbf(0.25), train_ds.X)) == 1.0).all()

    def test_rbf_table_two_psd(self, train_ds):
        G = gram_matrix(KernelSpec.rbf(0.25), train_ds.X)
        assert np.linalg.eigvalsh(G).min() >= -1e-10

    def test_empty(self):
        with pytest.raises(KernelError):
            gram_matrix(KernelSpec.linear(), np.zeros((0, 2)))
