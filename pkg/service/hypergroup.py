"""量子超群: 条件付き期待値、冪等状態・群的射影からの構成、双対、双対性定理、Peter–Weyl"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

from service.algebra_core import (
    AlgebraPresentation,
    BlockStructure,
    adjoint,
    gram_matrix,
    left_matrix,
    multiply,
    right_matrix,
    verify_algebra,
    wedderburn,
)
from service.dual_functionals import (
    Functional,
    convolve,
    dual_quantum_group,
    functional_norm,
    is_positive_functional,
    star,
    structure_residuals,
)
from service.errors import DomainError, StructureError
from service.idempotent import is_idempotent_state
from service.quantum_group import (
    IrrepTable,
    QuantumGroup,
    coassociativity_residual,
    comul_tensor,
    counit_residuals,
    dual_presentation,
    haar_invariance_residuals,
    irrep_table_from_dual,
    star_preserving_residual,
)
from service.report import VerificationReport
from utils.config_manager import get_law_tolerance, get_psd_threshold

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConditionalExpectation:
    """座標に作用する射影写像と像の基底（列）"""

    map: np.ndarray
    range_basis: np.ndarray

    @property
    def rank(self) -> int:
        return self.range_basis.shape[1]


@dataclass(frozen=True, eq=False)
class Hypergroup:
    """有限量子超群。embedding は親代数への埋め込み、compression は親から自身への射影"""

    algebra: AlgebraPresentation
    blocks: BlockStructure
    comul: np.ndarray
    counit: np.ndarray
    kappa: np.ndarray
    haar: np.ndarray
    name: str = ''
    embedding: np.ndarray | None = None
    compression: np.ndarray | None = None
    kind: str = 'hypergroup'

    def __post_init__(self):
        d = self.algebra.dim
        if np.shape(self.comul) != (d * d, d) or np.shape(self.kappa) != (d, d):
            raise StructureError(f"超群の構造テンソルの形状が不正です: dim={d}")
        for field_name in ('comul', 'counit', 'kappa', 'haar'):
            object.__setattr__(self, field_name, np.asarray(getattr(self, field_name), dtype=complex))

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def antipode(self) -> np.ndarray:
        return self.kappa

    @property
    def comul_tensor(self) -> np.ndarray:
        return comul_tensor(self.comul, self.dim)


def hypergroup_from_quantum_group(qg: QuantumGroup) -> Hypergroup:
    eye = np.eye(qg.dim, dtype=complex)
    return Hypergroup(qg.algebra, qg.blocks, qg.comul, qg.counit, qg.antipode, qg.haar,
                      qg.name, eye, eye, 'quantum_group')


def _expectation_from_map(M: np.ndarray, tol: float) -> ConditionalExpectation:
    q, r, piv = qr(M, pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0] if diag.size else 1.0)))
    return ConditionalExpectation(M, M[:, np.sort(piv[:rank])])


def conditional_expectation(qg: QuantumGroup, phi: Functional, tol: float | None = None
                            ) -> tuple[ConditionalExpectation, ConditionalExpectation, ConditionalExpectation]:
    """E_left = (φ⊗ι)Δ、E_right = (ι⊗φ)Δ、E = E_left∘E_right"""
    if tol is None:
        tol = get_law_tolerance()
    if not is_idempotent_state(qg, phi, tol):
        raise DomainError("条件付き期待値には冪等状態が必要です")
    D = qg.comul_tensor
    left = np.einsum('a,iab->bi', phi.covec, D)
    right = np.einsum('iab,b->ai', D, phi.covec)
    full = left @ right
    return (_expectation_from_map(left, tol), _expectation_from_map(right, tol),
            _expectation_from_map(full, tol))


def _bimodule_residual(pres: AlgebraPresentation, M: np.ndarray) -> float:
    c = pres.mul
    lhs = np.einsum('lk,ia,ibk->abl', M, M, c)
    rhs = np.einsum('ia,jb,ijk->abk', M, M, c)
    lhs_r = np.einsum('lk,ia,bik->abl', M, M, c)
    rhs_r = np.einsum('ia,jb,jik->abk', M, M, c)
    return float(max(np.max(np.abs(lhs - rhs)), np.max(np.abs(lhs_r - rhs_r))))


def check_expectation_lemmas(qg: QuantumGroup, phi: Functional,
                             maps: tuple[ConditionalExpectation, ConditionalExpectation, ConditionalExpectation],
                             tol: float | None = None) -> VerificationReport:
    """E_left, E_right, E の射影性・単位性・*保存・Haar不変・加群性・余イデアル性・可換性・S可換性"""
    if tol is None:
        tol = get_law_tolerance()
    pres = qg.algebra
    J = pres.invol
    d = qg.dim
    report = VerificationReport('conditional_expectation')
    for label, E in zip(('left', 'right', 'full'), maps):
        M = E.map
        report.add(f'{label}.idempotent', np.max(np.abs(M @ M - M)), tol)
        report.add(f'{label}.unital', np.max(np.abs(M @ pres.unit - pres.unit)), tol)
        report.add(f'{label}.star', np.max(np.abs(M @ J - J @ np.conj(M))), tol)
        report.add(f'{label}.haar', np.max(np.abs(qg.haar @ M - qg.haar)), tol)
        report.add(f'{label}.bimodule', _bimodule_residual(pres, M), tol)

    El, Er, E = (m.map for m in maps)
    eye = np.eye(d)
    # Δ∘E_left = (E_left⊗ι)Δ、Δ∘E_right = (ι⊗E_right)Δ
    report.add('left.coideal', np.max(np.abs(qg.comul @ El - np.kron(El, eye) @ qg.comul)), tol)
    report.add('right.coideal', np.max(np.abs(qg.comul @ Er - np.kron(eye, Er) @ qg.comul)), tol)
    report.add('commute', np.max(np.abs(El @ Er - Er @ El)), tol)
    report.add('antipode_commute', np.max(np.abs(qg.antipode @ E - E @ qg.antipode)), tol)
    closed = np.einsum('lk,ia,jb,ijk->abl', E, E, E, pres.mul) - np.einsum('ia,jb,ijk->abk', E, E, pres.mul)
    report.add('range_subalgebra', np.max(np.abs(closed)), tol)
    report.add('phi_equals_counit_of_E', np.max(np.abs(qg.counit @ E - phi.covec)), tol)
    logger.debug(f"条件付き期待値の検証: rank={maps[2].rank}, 最大残差={report.max_residual:.3e}")
    return report


def _gns_basis(pres: AlgebraPresentation, haar: np.ndarray, M: np.ndarray, tol: float):
    """Haar の GNS 内積で正規直交化した像の基底 B と座標射影 Π = B^H G"""
    G = gram_matrix(pres, haar)
    G = (G + G.conj().T) / 2
    w, V = np.linalg.eigh(G)
    if w[0] <= tol:
        raise DomainError("Haar 汎関数が忠実ではありません")
    root = (V * np.sqrt(w)) @ V.conj().T
    root_inv = (V / np.sqrt(w)) @ V.conj().T
    q, r, _ = qr(root @ M, pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0])))
    B = root_inv @ q[:, :rank]
    return B, B.conj().T @ G


def _induced_hypergroup(parent, M: np.ndarray, unit: np.ndarray, name: str, tol: float) -> Hypergroup:
    pres = parent.algebra
    B, Pi = _gns_basis(pres, parent.haar, M, tol)
    C = Pi @ M
    mul = np.einsum('ai,bj,abk,lk->ijl', B, B, pres.mul, Pi)
    algebra = AlgebraPresentation(B.shape[1], mul, Pi @ unit, Pi @ pres.invol @ np.conj(B))
    comul = np.kron(C, C) @ parent.comul @ B
    counit = parent.counit @ B
    kappa = Pi @ parent.antipode @ B
    haar = parent.haar @ B
    haar = haar / (haar @ algebra.unit)
    blocks = wedderburn(algebra, tol)
    H = Hypergroup(algebra, blocks, comul, counit, kappa, haar, name, B, C)
    logger.info(f"超群 {name} を構築しました: dim={H.dim}, blocks={list(blocks.sizes)}")
    return H


def build_hypergroup_from_idempotent(qg: QuantumGroup, phi: Functional, tol: float | None = None) -> Hypergroup:
    """(A_φ, Δ_φ): E_φ の像に (E_φ⊗E_φ)Δ を誘導"""
    if tol is None:
        tol = get_law_tolerance()
    _, _, E = conditional_expectation(qg, phi, tol)
    return _induced_hypergroup(qg, E.map, qg.algebra.unit, f'A_phi({qg.name})', tol)


def is_group_like_projection(qg, p: np.ndarray, tol: float | None = None) -> bool:
    """p = p* = p²、Δ(p)(1⊗p) = p⊗p = Δ(p)(p⊗1)、S(p) = p、p ≠ 0"""
    if tol is None:
        tol = get_law_tolerance()
    pres = qg.algebra
    p = np.asarray(p, dtype=complex)
    d = qg.dim
    if np.max(np.abs(p)) < tol:
        return False
    if np.max(np.abs(adjoint(pres, p) - p)) > tol or np.max(np.abs(multiply(pres, p, p) - p)) > tol:
        return False
    if np.max(np.abs(qg.antipode @ p - p)) > tol:
        return False
    Dp = (qg.comul @ p).reshape(d, d)
    Rp = np.einsum('bjk,j->bk', pres.mul, p)
    target = np.outer(p, p)
    return bool(np.max(np.abs(Dp @ Rp - target)) <= tol and np.max(np.abs(Rp.T @ Dp - target)) <= tol)


def build_hypergroup_from_projection(qg, p: np.ndarray, tol: float | None = None) -> Hypergroup:
    """(pAp, Δ_p): P(a) = pap の像に (P⊗P)Δ を誘導"""
    if tol is None:
        tol = get_law_tolerance()
    p = np.asarray(p, dtype=complex)
    if not is_group_like_projection(qg, p, tol):
        raise DomainError("群的射影ではない元が与えられました")
    if abs(qg.counit @ p - 1.0) > tol:
        raise DomainError(f"ε(p) = 1 を満たしません: {qg.counit @ p}")
    pres = qg.algebra
    M = left_matrix(pres, p) @ right_matrix(pres, p)
    return _induced_hypergroup(qg, M, p, f'pAp({qg.name})', tol)


def choi_min_eigenvalue(blocks: BlockStructure, comul: np.ndarray) -> float:
    """δ の Choi 行列（行列単位基底）の最小固有値"""
    sizes = blocks.sizes
    offs = blocks.offsets
    to_units = np.kron(blocks.iso, blocks.iso)
    d = blocks.iso.shape[0]
    worst = np.inf
    for k, nk in enumerate(sizes):
        images = {}
        for i in range(nk):
            for j in range(nk):
                y = (to_units @ (comul @ blocks.matrix_unit(k, i, j))).reshape(d, d)
                images[(i, j)] = y
        for l, nl in enumerate(sizes):
            for m, nm in enumerate(sizes):
                size = nk * nl * nm
                choi = np.zeros((size, size), dtype=complex)
                for (i, j), y in images.items():
                    sub = y[offs[l]:offs[l + 1], offs[m]:offs[m + 1]].reshape(nl, nl, nm, nm)
                    # (E^l_ab ⊗ E^m_ce) を行 (a, c)、列 (b, e) に並べる
                    block = sub.transpose(0, 2, 1, 3).reshape(nl * nm, nl * nm)
                    r0, c0 = i * nl * nm, j * nl * nm
                    choi[r0:r0 + nl * nm, c0:c0 + nl * nm] = block
                choi = (choi + choi.conj().T) / 2
                worst = min(worst, float(np.linalg.eigvalsh(choi)[0]))
    return worst


def strong_invariance_residual(H) -> float:
    """(ι⊗h)[(κ⊗ι)δ(a)(1⊗b)] = (ι⊗h)[(1⊗a)δ(b)]"""
    D = H.comul_tensor
    hm = np.einsum('qbk,k->qb', H.algebra.mul, H.haar)
    lhs = np.einsum('apq,qb,rp->abr', D, hm, H.antipode)
    rhs = np.einsum('bpq,aq->abp', D, hm)
    return float(np.max(np.abs(lhs - rhs)))


def verify_hypergroup(H, tol: float | None = None) -> VerificationReport:
    if tol is None:
        tol = get_law_tolerance()
    pres = H.algebra
    D = H.comul_tensor
    report = VerificationReport(f'hypergroup {H.name}'.strip())
    report.extend(verify_algebra(pres, tol), prefix='algebra.')
    report.add('coassociativity', coassociativity_residual(D), tol)
    report.add('comul_unital', np.max(np.abs(H.comul @ pres.unit - np.kron(pres.unit, pres.unit))), tol)
    report.add('comul_star', star_preserving_residual(D, pres.invol), tol)
    choi = choi_min_eigenvalue(H.blocks, H.comul)
    report.add('complete_positivity', max(0.0, -choi - get_psd_threshold()), tol, min_eigenvalue=choi)

    left_eps, right_eps = counit_residuals(D, H.counit)
    report.add('counit_left', left_eps, tol)
    report.add('counit_right', right_eps, tol)
    eps_mult = np.einsum('ijk,k->ij', pres.mul, H.counit) - np.outer(H.counit, H.counit)
    report.add('counit_multiplicative', np.max(np.abs(eps_mult)), tol)

    left_h, right_h = haar_invariance_residuals(D, H.haar, pres.unit)
    report.add('haar_left_invariance', left_h, tol)
    report.add('haar_right_invariance', right_h, tol)
    report.add('haar_normalized', abs(H.haar @ pres.unit - 1.0), tol)
    G = gram_matrix(pres, H.haar)
    min_eig = float(np.linalg.eigvalsh((G + G.conj().T) / 2)[0])
    report.add('haar_faithful', 0.0 if min_eig > tol else 1.0, tol, min_eigenvalue=min_eig)
    report.add('strong_invariance', strong_invariance_residual(H), tol)

    logger.info(f"超群 {H.name} の検証: {'合格' if report.passed else '不合格'} (最大残差 {report.max_residual:.3e})")
    return report


def hypergroup_dual(H, tol: float | None = None) -> Hypergroup:
    """H 上の汎関数のなす双対超群（左積分は ψ = h∘κ から ĥ(ψ(a·)) = ε(a) で定める）"""
    if tol is None:
        tol = get_law_tolerance()
    d = H.dim
    pres = H.algebra
    algebra = dual_presentation(pres, H.comul, H.counit, H.antipode)
    psi = H.antipode.T @ H.haar
    Psi = np.einsum('ajk,k->aj', pres.mul, psi)
    hhat = np.linalg.solve(Psi, H.counit)
    hhat = hhat / (hhat @ H.counit)
    blocks = wedderburn(algebra, tol)
    dual = Hypergroup(algebra, blocks, pres.mul.reshape(d * d, d), pres.unit.copy(), H.antipode.T.copy(),
                      hhat, f'dual({H.name})')
    logger.info(f"双対超群 {dual.name} を構築しました: blocks={list(blocks.sizes)}")
    return dual


def verify_duality_theorem(qg: QuantumGroup, phi: Functional, tol: float | None = None) -> VerificationReport:
    """(A_φ, Δ_φ) の双対と (Â_p, Δ̂_p) が π(ω) = ω∘E_φ で同型であることを検証"""
    if tol is None:
        tol = get_law_tolerance()
    H = build_hypergroup_from_idempotent(qg, phi, tol)
    left = hypergroup_dual(H, tol)
    right = build_hypergroup_from_projection(dual_quantum_group(qg), phi.covec, tol)
    assert H.compression is not None and right.compression is not None and right.embedding is not None
    pi = H.compression.T
    transport = right.compression @ pi
    report = VerificationReport('duality_theorem')
    in_corner = right.embedding @ transport - pi
    report.add('image_in_corner', np.max(np.abs(in_corner)), tol)
    report.extend(structure_residuals(left, right, transport, tol))
    logger.info(f"双対性定理の検証 ({qg.name}): {'合格' if report.passed else '不合格'}")
    return report


def hypergroup_irreps(H, tol: float | None = None) -> IrrepTable:
    dual = dual_presentation(H.algebra, H.comul, H.counit, H.antipode)
    return irrep_table_from_dual(dual, H.algebra.unit, dagger=True, tol=tol)


def verify_hypergroup_irreps(H, tbl: IrrepTable, tol: float | None = None) -> VerificationReport:
    """δ(u_ij) = Σ u_ik⊗u_kj、ε(u_ij) = δ_ij、(u_ij)† = u_ji（a† = κ(a)*）"""
    if tol is None:
        tol = get_law_tolerance()
    pres = H.algebra
    comul_res = counit_res = dagger_res = 0.0
    for n, u in zip(tbl.sizes, tbl.coeffs):
        for i in range(n):
            for j in range(n):
                expected = sum(np.kron(u[i, k], u[k, j]) for k in range(n))
                comul_res = max(comul_res, float(np.max(np.abs(H.comul @ u[i, j] - expected))))
                counit_res = max(counit_res, abs(H.counit @ u[i, j] - (1.0 if i == j else 0.0)))
                dagger = adjoint(pres, H.antipode @ u[i, j])
                dagger_res = max(dagger_res, float(np.max(np.abs(dagger - u[j, i]))))
    report = VerificationReport('hypergroup_irreps')
    report.add('coefficient_comul', comul_res, tol)
    report.add('coefficient_counit', counit_res, tol)
    report.add('dagger_symmetry', dagger_res, tol)
    return report


def verify_peter_weyl(H, tbl: IrrepTable, tol: float | None = None) -> VerificationReport:
    """α ≠ β または i ≠ l のとき h(u^α_ij (u^β_lk)*) = 0"""
    if tol is None:
        tol = get_law_tolerance()
    pres = H.algebra
    hm = np.einsum('abk,k->ab', pres.mul, H.haar)
    labels = [(a, i, j) for a, n in enumerate(tbl.sizes) for i in range(n) for j in range(n)]
    U = tbl.coefficient_matrix
    Ustar = np.array([adjoint(pres, u) for u in U])
    values = U @ hm @ Ustar.T
    worst = 0.0
    for r, (alpha, i, _) in enumerate(labels):
        for s, (beta, l, _) in enumerate(labels):
            if alpha != beta or i != l:
                worst = max(worst, abs(values[r, s]))
    report = VerificationReport('peter_weyl')
    report.add('vanishing', worst, tol)
    return report


def check_hhat_epsilon_inequality(H_dual, v: np.ndarray, tol: float | None = None, H=None) -> VerificationReport:
    """正定値元 v について ĥ(v) ≤ ε̂(v) と係数ブロックの半正定値性を検証"""
    if tol is None:
        tol = get_law_tolerance()
    v = np.asarray(v, dtype=complex)
    tbl = hypergroup_irreps(H_dual)
    coeffs = np.linalg.solve(tbl.coefficient_matrix.T, v)
    blocks = []
    pos = 0
    for n in tbl.sizes:
        blocks.append(coeffs[pos:pos + n * n].reshape(n, n))
        pos += n * n
    min_eig = min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in blocks)
    hermitian = max(float(np.max(np.abs(b - b.conj().T))) for b in blocks)
    if min_eig < -tol or hermitian > tol:
        raise DomainError(f"正定値元ではありません（係数ブロックの最小固有値 {min_eig:.3e}）")

    hhat = complex(H_dual.haar @ v)
    ehat = complex(H_dual.counit @ v)
    report = VerificationReport('hhat_epsilon_inequality')
    report.add('inequality', max(0.0, hhat.real - ehat.real), tol, slack=ehat.real - hhat.real)
    report.add('haar_is_trivial_coefficient', abs(hhat - blocks[tbl.trivial_index][0, 0]), tol)
    report.add('counit_is_trace_sum', abs(ehat - sum(np.trace(b) for b in blocks)), tol)
    if H is not None:
        agrees = is_positive_functional(H, Functional(v), tol)
        report.add('positivity_equivalence', 0.0 if agrees else 1.0, tol)
    return report


def restrict_functional(H: Hypergroup, u: Functional) -> Functional:
    """u|_{A_φ}（H の基底での座標）"""
    assert H.embedding is not None
    return Functional(H.embedding.T @ u.covec)


def extend_functional(H: Hypergroup, w: Functional) -> Functional:
    """w∘E（親代数上の汎関数）"""
    assert H.compression is not None
    return Functional(H.compression.T @ w.covec)


def counit_support(H) -> tuple[int, np.ndarray]:
    """ε が生きる1次元ブロック k0 とその中心射影"""
    for k, D in enumerate(H.blocks.density_blocks(H.counit)):
        if D.shape == (1, 1) and abs(D[0, 0] - 1.0) < 1e-8:
            return k, H.blocks.matrix_unit(k, 0, 0)
    raise DomainError("余単位が1次元ブロックに集中していません")


def check_bi_invariant_restriction(qg: QuantumGroup, H: Hypergroup, phi: Functional, u: Functional,
                                   w: Functional | None = None, tol: float | None = None) -> VerificationReport:
    """双不変汎関数の制限: u = u|∘E、ノルム保存、正値性、*・畳み込みとの両立、φ = ε∘E"""
    if tol is None:
        tol = get_law_tolerance()
    report = VerificationReport('bi_invariant_restriction')
    ur = restrict_functional(H, u)
    report.add('factorization', extend_functional(H, ur).distance(u), tol)
    report.add('norm', abs(functional_norm(qg, u) - functional_norm(H, ur)), 1e3 * tol)
    same = is_positive_functional(qg, u, tol) == is_positive_functional(H, ur, tol)
    report.add('positivity', 0.0 if same else 1.0, tol)
    report.add('star', restrict_functional(H, star(qg, u)).distance(star(H, ur)), tol)
    if w is not None:
        lhs = restrict_functional(H, convolve(qg, u, w))
        rhs = convolve(H, ur, restrict_functional(H, w))
        report.add('convolution', lhs.distance(rhs), tol)
    report.add('phi_is_counit', extend_functional(H, Functional(H.counit)).distance(phi), tol)
    return report
