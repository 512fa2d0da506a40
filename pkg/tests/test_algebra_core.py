import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from service.algebra_core import (
    AlgebraPresentation,
    adjoint,
    commutative_algebra,
    direct_sum,
    gram_matrix,
    is_positive_element,
    matrix_algebra,
    multiply,
    operator_norm,
    tensor,
    trace_state,
    verify_algebra,
    wedderburn,
)
from service.errors import DecompositionError, DomainError, StructureError

MIXED = direct_sum(matrix_algebra(2), commutative_algebra(1))
MIXED_BLOCKS = wedderburn(MIXED)


def dual_numbers() -> AlgebraPresentation:
    """C[x]/(x²): 半単純でない2次元代数"""
    mul = np.zeros((2, 2, 2), dtype=complex)
    mul[0, 0, 0] = 1.0
    mul[0, 1, 1] = 1.0
    mul[1, 0, 1] = 1.0
    return AlgebraPresentation(2, mul, np.array([1.0, 0.0]), np.eye(2))


class TestAlgebraPresentation:
    """構造定数表示の検証テスト"""

    def test_rejects_wrong_mul_shape(self):
        """mul の形状が不正なら StructureError"""
        with pytest.raises(StructureError, match="mul の形状"):
            AlgebraPresentation(2, np.zeros((2, 2)), np.ones(2), np.eye(2))

    def test_rejects_zero_dimension(self):
        """次元0は受け付けない"""
        with pytest.raises(StructureError):
            AlgebraPresentation(0, np.zeros((0, 0, 0)), np.zeros(0), np.zeros((0, 0)))

    def test_matrix_algebra_satisfies_laws(self):
        """M_3 の結合律・単位律・対合の法則"""
        report = verify_algebra(matrix_algebra(3))

        assert report.passed
        assert report.max_residual < 1e-12

    def test_matrix_unit_products(self):
        """E_01 E_10 = E_00"""
        m2 = matrix_algebra(2)
        product = multiply(m2, m2.basis(1), m2.basis(2))

        np.testing.assert_allclose(product, m2.basis(0))

    def test_adjoint_swaps_matrix_units(self):
        m2 = matrix_algebra(2)

        np.testing.assert_allclose(adjoint(m2, 2j * m2.basis(1)), -2j * m2.basis(2))

    def test_tensor_dimension_and_unit(self):
        t = tensor(matrix_algebra(2), commutative_algebra(2))

        assert t.dim == 8
        assert verify_algebra(t).passed

    def test_trace_state_is_normalized(self):
        tau = trace_state(MIXED)

        assert tau @ MIXED.unit == pytest.approx(1.0)

    def test_gram_matrix_of_trace_is_positive(self):
        G = gram_matrix(MIXED, trace_state(MIXED))

        assert np.linalg.eigvalsh((G + G.conj().T) / 2)[0] > 0


class TestWedderburn:
    """Wedderburn 分解のテスト"""

    def test_commutative_blocks(self):
        assert wedderburn(commutative_algebra(3)).sizes == (1, 1, 1)

    def test_matrix_algebra_single_block(self):
        assert wedderburn(matrix_algebra(2)).sizes == (2,)

    def test_blocks_sorted_by_size(self):
        """ブロックは大きさの昇順に並ぶ"""
        assert MIXED_BLOCKS.sizes == (1, 2)

    def test_one_dimensional_algebra(self):
        assert wedderburn(commutative_algebra(1)).sizes == (1,)

    def test_non_semisimple_algebra_raises(self):
        """冪零元を含む代数は分解できない"""
        with pytest.raises(DecompositionError, match="正定値ではありません"):
            wedderburn(dual_numbers())

    def test_density_round_trip(self):
        w = np.arange(MIXED.dim) + 1j
        mats = MIXED_BLOCKS.density_blocks(w)

        np.testing.assert_allclose(MIXED_BLOCKS.covector_from_density(mats), w, atol=1e-12)

    def test_density_reproduces_functional(self):
        """w(x) = Σ Tr(D_k x_k)"""
        w = np.array([0.3, -1.0, 2.0j, 0.5, 1.5])
        x = np.array([1.0, 2.0, -1.0j, 0.25, 3.0])
        value = sum(np.trace(D @ X) for D, X in zip(MIXED_BLOCKS.density_blocks(w), MIXED_BLOCKS.blocks_of(x)))

        assert value == pytest.approx(w @ x)

    @settings(max_examples=25, deadline=None)
    @given(
        x=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
        y=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
    )
    def test_blocks_are_multiplicative(self, x, y):
        """ブロック写像は積を行列積に移す"""
        xy = MIXED_BLOCKS.blocks_of(multiply(MIXED, x, y))
        expected = [bx @ by for bx, by in zip(MIXED_BLOCKS.blocks_of(x), MIXED_BLOCKS.blocks_of(y))]

        for got, want in zip(xy, expected):
            np.testing.assert_allclose(got, want, atol=1e-8)


class TestPositivity:
    """正値性と作用素ノルムのテスト"""

    def test_unit_is_positive(self):
        assert is_positive_element(MIXED, MIXED_BLOCKS, MIXED.unit)

    def test_negative_unit_is_not_positive(self):
        assert not is_positive_element(MIXED, MIXED_BLOCKS, -MIXED.unit)

    def test_non_self_adjoint_raises(self):
        m2 = matrix_algebra(2)
        blocks = wedderburn(m2)

        with pytest.raises(DomainError):
            is_positive_element(m2, blocks, m2.basis(1))

    def test_operator_norm_of_unit(self):
        assert operator_norm(MIXED, MIXED_BLOCKS, 3 * MIXED.unit) == pytest.approx(3.0)

    @settings(max_examples=25, deadline=None)
    @given(
        re=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
        im=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
    )
    def test_operator_norm_is_c_star_norm(self, re, im):
        """‖x*x‖ = ‖x‖²"""
        x = re + 1j * im

        norm = operator_norm(MIXED, MIXED_BLOCKS, x)

        assert operator_norm(MIXED, MIXED_BLOCKS, multiply(MIXED, adjoint(MIXED, x), x)) == pytest.approx(
            norm ** 2, rel=1e-9, abs=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(
        x=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
        y=arrays(np.float64, (5,), elements=st.floats(min_value=-3.0, max_value=3.0)),
    )
    def test_operator_norm_is_submultiplicative(self, x, y):
        product = operator_norm(MIXED, MIXED_BLOCKS, multiply(MIXED, x, y))

        assert product <= operator_norm(MIXED, MIXED_BLOCKS, x) * operator_norm(MIXED, MIXED_BLOCKS, y) + 1e-9


class TestTensorBlocks:
    """テンソル積のブロック構造のテスト"""

    def test_matrix_and_commutative(self):
        """M_2 ⊗ C² ≅ M_2 ⊕ M_2"""
        assert wedderburn(tensor(matrix_algebra(2), commutative_algebra(2))).sizes == (2, 2)

    def test_two_matrix_algebras(self):
        """M_2 ⊗ M_2 ≅ M_4"""
        assert wedderburn(tensor(matrix_algebra(2), matrix_algebra(2))).sizes == (4,)
