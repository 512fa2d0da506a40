import numpy as np
import pytest

from app.cli import builtin
from service.dual_functionals import Functional, counit_functional, haar_functional
from service.errors import DomainError
from service.hypergroup import (
    build_hypergroup_from_idempotent,
    build_hypergroup_from_projection,
    check_bi_invariant_restriction,
    check_expectation_lemmas,
    check_hhat_epsilon_inequality,
    conditional_expectation,
    counit_support,
    extend_functional,
    hypergroup_dual,
    hypergroup_from_quantum_group,
    hypergroup_irreps,
    is_group_like_projection,
    restrict_functional,
    verify_duality_theorem,
    verify_hypergroup,
    verify_hypergroup_irreps,
    verify_peter_weyl,
)
from service.idempotent import enumerate_idempotents_bruteforce
from tests.conftest import BUILTIN_NAMES, point_mass


@pytest.fixture(scope='module')
def coset_hypergroup(c_z4):
    """C(Z4) と部分群 {0, 2} から作る A_φ"""
    return build_hypergroup_from_idempotent(c_z4, point_mass(4, 0, 2))


@pytest.fixture(scope='module')
def double_coset_hypergroup(c_s3):
    """C(S3) と位数2の部分群から作る A_φ（両側剰余類の超群）"""
    return build_hypergroup_from_idempotent(c_s3, point_mass(6, 0, 1))


class TestConditionalExpectation:
    """条件付き期待値のテスト"""

    def test_ranks(self, c_z4):
        left, right, full = conditional_expectation(c_z4, point_mass(4, 0, 2))

        assert (left.rank, right.rank, full.rank) == (2, 2, 2)

    def test_counit_gives_identity(self, c_z4):
        _, _, full = conditional_expectation(c_z4, counit_functional(c_z4))

        np.testing.assert_allclose(full.map, np.eye(4), atol=1e-12)

    def test_haar_gives_scalars(self, c_z4):
        _, _, full = conditional_expectation(c_z4, haar_functional(c_z4))

        assert full.rank == 1

    @pytest.mark.parametrize('support', [(0, 1), (0, 3, 4), (0,)])
    def test_lemmas_on_s3(self, c_s3, support):
        phi = point_mass(6, *support)
        maps = conditional_expectation(c_s3, phi)

        report = check_expectation_lemmas(c_s3, phi, maps)

        assert report.passed, [c.name for c in report.failed()]

    def test_rejects_non_idempotent(self, c_z4):
        with pytest.raises(DomainError, match="冪等状態"):
            conditional_expectation(c_z4, point_mass(4, 1))


class TestHypergroupConstruction:
    """冪等状態・群的射影からの超群の構成テスト"""

    def test_coset_hypergroup_dimension(self, coset_hypergroup):
        assert coset_hypergroup.dim == 2
        assert coset_hypergroup.kind == 'hypergroup'

    def test_coset_hypergroup_axioms(self, coset_hypergroup):
        report = verify_hypergroup(coset_hypergroup)

        assert report.passed, [c.name for c in report.failed()]

    def test_double_coset_hypergroup(self, double_coset_hypergroup):
        """非可換群の両側剰余類から真の超群（量子群ではない）が得られる"""
        assert double_coset_hypergroup.dim == 2

        report = verify_hypergroup(double_coset_hypergroup)

        assert report.passed, [c.name for c in report.failed()]

    def test_haar_idempotent_gives_trivial_hypergroup(self, c_s3):
        H = build_hypergroup_from_idempotent(c_s3, haar_functional(c_s3))

        assert H.dim == 1
        assert verify_hypergroup(H).passed

    def test_quantum_group_as_hypergroup(self, g_s3):
        H = hypergroup_from_quantum_group(g_s3)

        assert H.kind == 'quantum_group'
        np.testing.assert_allclose(H.antipode, g_s3.antipode)
        assert verify_hypergroup(H).passed

    def test_group_like_projection(self, c_z4):
        assert is_group_like_projection(c_z4, np.array([1.0, 0.0, 1.0, 0.0]))
        assert not is_group_like_projection(c_z4, np.array([1.0, 1.0, 0.0, 0.0]))
        assert not is_group_like_projection(c_z4, np.zeros(4))

    def test_projection_hypergroup(self, c_z4):
        H = build_hypergroup_from_projection(c_z4, np.array([1.0, 0.0, 1.0, 0.0]))

        assert H.dim == 2
        assert verify_hypergroup(H).passed

    def test_projection_hypergroup_rejects_non_projection(self, c_z4):
        with pytest.raises(DomainError, match="群的射影"):
            build_hypergroup_from_projection(c_z4, np.array([1.0, 1.0, 0.0, 0.0]))


class TestDuality:
    """双対超群と双対性定理のテスト"""

    def test_dual_hypergroup_axioms(self, double_coset_hypergroup):
        dual = hypergroup_dual(double_coset_hypergroup)

        assert dual.dim == double_coset_hypergroup.dim
        assert verify_hypergroup(dual).passed

    @pytest.mark.parametrize('support', [(0, 2), (0,), (0, 1, 2, 3)])
    def test_duality_theorem_on_z4(self, c_z4, support):
        report = verify_duality_theorem(c_z4, point_mass(4, *support))

        assert report.passed, [c.name for c in report.failed()]

    def test_duality_theorem_on_s3(self, c_s3):
        report = verify_duality_theorem(c_s3, point_mass(6, 0, 1))

        assert report.passed, [c.name for c in report.failed()]


class TestHypergroupRepresentations:
    """超群の既約表現と Peter–Weyl 直交性のテスト"""

    def test_irreps(self, double_coset_hypergroup):
        H = double_coset_hypergroup
        tbl = hypergroup_irreps(H)

        assert tbl.dagger
        assert sum(n * n for n in tbl.sizes) == H.dim
        assert verify_hypergroup_irreps(H, tbl).passed

    def test_peter_weyl(self, double_coset_hypergroup):
        tbl = hypergroup_irreps(double_coset_hypergroup)

        assert verify_peter_weyl(double_coset_hypergroup, tbl).passed

    def test_hhat_epsilon_inequality(self, double_coset_hypergroup):
        """係数ブロックが単位行列の正定値元で ĥ(v) ≤ ε̂(v)"""
        H = double_coset_hypergroup
        dual = hypergroup_dual(H)
        tbl = hypergroup_irreps(dual)
        coeffs = np.concatenate([np.eye(n).reshape(-1) for n in tbl.sizes])
        v = tbl.coefficient_matrix.T @ coeffs

        report = check_hhat_epsilon_inequality(dual, v, H=H)

        assert report.passed, [c.name for c in report.failed()]
        assert report.get('inequality').detail['slack'] >= -1e-9

    def test_hhat_epsilon_rejects_negative_element(self, double_coset_hypergroup):
        dual = hypergroup_dual(double_coset_hypergroup)
        tbl = hypergroup_irreps(dual)
        coeffs = -np.concatenate([np.eye(n).reshape(-1) for n in tbl.sizes])

        with pytest.raises(DomainError, match="正定値元"):
            check_hhat_epsilon_inequality(dual, tbl.coefficient_matrix.T @ coeffs)


class TestRestriction:
    """双不変汎関数の A_φ への制限のテスト"""

    def test_round_trip(self, c_z4, coset_hypergroup):
        u = point_mass(4, 1, 3)

        restored = extend_functional(coset_hypergroup, restrict_functional(coset_hypergroup, u))

        np.testing.assert_allclose(restored.covec, u.covec, atol=1e-10)

    def test_bi_invariant_restriction(self, c_z4, coset_hypergroup):
        phi = point_mass(4, 0, 2)
        u = point_mass(4, 1, 3) - phi
        w = point_mass(4, 1, 3)

        report = check_bi_invariant_restriction(c_z4, coset_hypergroup, phi, u, w)

        assert report.passed, [c.name for c in report.failed()]

    def test_counit_support(self, coset_hypergroup):
        k0, projection = counit_support(coset_hypergroup)

        assert coset_hypergroup.blocks.sizes[k0] == 1
        assert Functional(coset_hypergroup.counit)(projection) == pytest.approx(1.0)


class TestEveryIdempotent:
    """組み込み量子群の全冪等状態に対する超群と双対性のテスト"""

    @pytest.mark.parametrize('name', BUILTIN_NAMES)
    def test_hypergroup_axioms(self, name):
        qg = builtin(name)

        for k, phi in enumerate(enumerate_idempotents_bruteforce(qg).states):
            report = verify_hypergroup(build_hypergroup_from_idempotent(qg, phi))
            assert report.passed, (k, [c.name for c in report.failed()])

    @pytest.mark.parametrize('name', BUILTIN_NAMES)
    def test_duality_theorem(self, name):
        qg = builtin(name)

        for k, phi in enumerate(enumerate_idempotents_bruteforce(qg).states):
            report = verify_duality_theorem(qg, phi)
            assert report.passed, (k, [c.name for c in report.failed()])
