import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from service.dual_functionals import (
    Functional,
    convolution_power,
    convolve,
    counit_functional,
    dual_haar,
    dual_quantum_group,
    fourier,
    functional_norm,
    functional_sup_norm,
    haar_functional,
    hermitian_part,
    inverse_fourier,
    is_hermitian,
    is_positive_functional,
    is_state,
    jordan_split,
    star,
    structure_residuals,
)
from service.errors import StructureError
from service.finite_groups import cyclic_group, symmetric_group
from service.quantum_group import function_algebra, group_algebra, irreps, verify_cqg
from tests.conftest import point_mass

C_Z3 = function_algebra(cyclic_group(3))
C_S3 = function_algebra(symmetric_group(3))
C_S3_IRREPS = irreps(C_S3)
G_S3 = group_algebra(symmetric_group(3))

weights = arrays(np.float64, (3,), elements=st.floats(min_value=0.01, max_value=1.0))


class TestFunctional:
    """汎関数の線形演算テスト"""

    def test_rejects_matrix(self):
        with pytest.raises(StructureError):
            Functional(np.eye(2))

    def test_arithmetic(self):
        a = Functional(np.array([1.0, 2.0]))
        b = Functional(np.array([0.5, -1.0]))

        np.testing.assert_allclose((a + b).covec, [1.5, 1.0])
        np.testing.assert_allclose((a - b).covec, [0.5, 3.0])
        np.testing.assert_allclose((2 * a).covec, [2.0, 4.0])
        np.testing.assert_allclose((a / 2).covec, [0.5, 1.0])
        np.testing.assert_allclose((-a).covec, [-1.0, -2.0])

    def test_evaluation(self):
        assert Functional(np.array([1.0, 2.0]))(np.array([3.0, 4.0])) == pytest.approx(11.0)

    def test_dimension_mismatch(self, c_z3):
        with pytest.raises(StructureError, match="一致しません"):
            convolve(c_z3, Functional.zeros(2), counit_functional(c_z3))


class TestConvolution:
    """畳み込みと冪のテスト"""

    def test_point_masses_convolve_like_group(self, c_z3):
        """δ_1 ⋆ δ_1 = δ_2"""
        result = convolve(c_z3, point_mass(3, 1), point_mass(3, 1))

        np.testing.assert_allclose(result.covec, point_mass(3, 2).covec, atol=1e-12)

    def test_counit_is_identity(self, c_s3):
        phi = point_mass(6, 1, 4)

        np.testing.assert_allclose(convolve(c_s3, counit_functional(c_s3), phi).covec, phi.covec, atol=1e-12)
        np.testing.assert_allclose(convolve(c_s3, phi, counit_functional(c_s3)).covec, phi.covec, atol=1e-12)

    def test_haar_absorbs(self, g_s3):
        h = haar_functional(g_s3)
        phi = Functional(np.linspace(0.1, 0.6, 6))

        np.testing.assert_allclose(convolve(g_s3, h, phi).covec, phi(g_s3.algebra.unit) * h.covec, atol=1e-12)

    def test_power(self, c_z3):
        np.testing.assert_allclose(convolution_power(c_z3, point_mass(3, 1), 3).covec,
                                   counit_functional(c_z3).covec, atol=1e-12)

    def test_power_requires_positive_exponent(self, c_z3):
        with pytest.raises(ValueError):
            convolution_power(c_z3, point_mass(3, 1), 0)

    @settings(max_examples=30, deadline=None)
    @given(a=weights, b=weights)
    def test_states_are_closed(self, a, b):
        """状態の畳み込みは状態"""
        phi = Functional(a / a.sum())
        psi = Functional(b / b.sum())

        assert is_state(C_Z3, convolve(C_Z3, phi, psi))


class TestNormsAndPositivity:
    """ノルム・正値性・Jordan 分解のテスト"""

    def test_state_has_unit_norm(self, c_s3):
        assert functional_norm(c_s3, point_mass(6, 0, 3, 5)) == pytest.approx(1.0)

    def test_total_variation(self, c_z2):
        assert functional_norm(c_z2, point_mass(2, 1) - point_mass(2, 0)) == pytest.approx(2.0)

    def test_sup_norm_agrees(self, c_z2):
        phi = Functional(np.array([1.0, -1.0]))

        assert functional_sup_norm(c_z2, phi) == pytest.approx(functional_norm(c_z2, phi), abs=1e-6)

    def test_non_commutative_norm(self, g_s3):
        """ε は群環上の状態なのでノルム1"""
        assert functional_norm(g_s3, counit_functional(g_s3)) == pytest.approx(1.0)

    def test_negative_functional(self, c_z2):
        assert not is_positive_functional(c_z2, -point_mass(2, 0))
        assert not is_state(c_z2, point_mass(2, 0) * 2)

    def test_hermitian(self, c_z2):
        assert is_hermitian(c_z2, point_mass(2, 0))
        assert not is_hermitian(c_z2, point_mass(2, 0) * 1j)
        assert is_hermitian(c_z2, hermitian_part(c_z2, Functional(np.array([1.0 + 2j, 0.5]))))

    def test_jordan_split(self, c_z2):
        plus, minus = jordan_split(c_z2, point_mass(2, 1) - point_mass(2, 0))

        np.testing.assert_allclose(plus.covec, point_mass(2, 1).covec, atol=1e-12)
        np.testing.assert_allclose(minus.covec, point_mass(2, 0).covec, atol=1e-12)

    def test_jordan_split_rejects_indefinite_block(self, g_s3):
        """2次元ブロックの密度が不定符号なら None"""
        blocks = g_s3.blocks
        density = [np.zeros((1, 1)), np.zeros((1, 1)), np.diag([1.0, -1.0])]
        phi = Functional(blocks.covector_from_density(density))

        assert jordan_split(g_s3, phi) is None

    def test_star_of_point_mass(self, c_z3):
        """δ_g* = δ_{g⁻¹}"""
        np.testing.assert_allclose(star(c_z3, point_mass(3, 1)).covec, point_mass(3, 2).covec, atol=1e-12)


class TestFourier:
    """Fourier 変換と双対量子群のテスト"""

    def test_convolution_becomes_product(self, c_s3):
        tbl = irreps(c_s3)
        phi = point_mass(6, 1, 2)
        psi = point_mass(6, 3, 4, 5)

        lhs = fourier(c_s3, tbl, convolve(c_s3, phi, psi)).blocks_img
        rhs = [a @ b for a, b in zip(fourier(c_s3, tbl, phi).blocks_img, fourier(c_s3, tbl, psi).blocks_img)]

        for got, want in zip(lhs, rhs):
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_inverse(self, c_s3):
        tbl = irreps(c_s3)
        phi = Functional(np.array([0.1, 0.2j, -0.3, 0.4, 0.5, 0.6]))

        np.testing.assert_allclose(inverse_fourier(c_s3, tbl, fourier(c_s3, tbl, phi)).covec, phi.covec, atol=1e-10)

    def test_counit_transform_is_identity(self, c_s3):
        img = fourier(c_s3, irreps(c_s3), counit_functional(c_s3))

        for block in img.blocks_img:
            np.testing.assert_allclose(block, np.eye(block.shape[0]), atol=1e-10)
        assert img.max_block_norm() == pytest.approx(1.0)

    def test_dual_haar_evaluates_on_counit(self, c_s3):
        """ĥ(ε) = Σ n_α² / Σ n_α² = 1"""
        tbl = irreps(c_s3)

        assert dual_haar(tbl) @ c_s3.counit == pytest.approx(1.0)

    @pytest.mark.parametrize('fixture_name', ['c_z3', 'c_s3'])
    def test_dual_quantum_group_axioms(self, fixture_name, request):
        qg = request.getfixturevalue(fixture_name)

        assert verify_cqg(dual_quantum_group(qg)).passed

    def test_structure_residuals_identity(self, c_z4):
        assert structure_residuals(c_z4, c_z4).passed

    def test_structure_residuals_dimension_mismatch(self, c_z2, c_z3):
        report = structure_residuals(c_z2, c_z3)

        assert not report.passed
        assert report.get('dimension').residual == float('inf')

    @pytest.mark.parametrize('fixture_name', ['c_z3', 'c_s3', 'g_s3'])
    def test_biduality(self, fixture_name, request):
        """(A*)* は A と同じ構造テンソルを持つ"""
        qg = request.getfixturevalue(fixture_name)

        report = structure_residuals(dual_quantum_group(dual_quantum_group(qg)), qg)

        assert report.passed, [c.name for c in report.failed()]

    @pytest.mark.parametrize('group', [cyclic_group(4), symmetric_group(3)], ids=['Z4', 'S3'])
    def test_dual_of_function_algebra_is_group_algebra(self, group):
        """C(G)* ≅ ℂ[G]（δ_g ↦ λ_g）"""
        report = structure_residuals(dual_quantum_group(function_algebra(group)), group_algebra(group))

        assert report.passed, [c.name for c in report.failed()]


class TestBanachAlgebra:
    """畳み込みのノルム評価のテスト"""

    @settings(max_examples=30, deadline=None)
    @given(
        a=arrays(np.float64, (2, 6), elements=st.floats(min_value=-1.0, max_value=1.0)),
        b=arrays(np.float64, (2, 6), elements=st.floats(min_value=-1.0, max_value=1.0)),
    )
    def test_convolution_is_submultiplicative(self, a, b):
        """‖φ⋆ψ‖ ≤ ‖φ‖‖ψ‖"""
        phi = Functional(a[0] + 1j * a[1])
        psi = Functional(b[0] + 1j * b[1])

        lhs = functional_norm(G_S3, convolve(G_S3, phi, psi))

        assert lhs <= functional_norm(G_S3, phi) * functional_norm(G_S3, psi) + 1e-9

    @settings(max_examples=30, deadline=None)
    @given(a=arrays(np.float64, (2, 6), elements=st.floats(min_value=-1.0, max_value=1.0)))
    def test_fourier_is_contractive(self, a):
        """‖φ̂(α)‖ ≤ ‖φ‖"""
        phi = Functional(a[0] + 1j * a[1])

        norm = functional_norm(C_S3, phi)

        for block in fourier(C_S3, C_S3_IRREPS, phi).blocks_img:
            assert np.linalg.norm(block, 2) <= norm + 1e-9
