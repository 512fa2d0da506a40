"""有限量子群 (A, Δ, ε, S, h) の構造・公理検証・既約表現"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from service.algebra_core import (
    AlgebraPresentation,
    BlockStructure,
    adjoint,
    gram_matrix,
    verify_algebra,
    wedderburn,
)
from service.errors import AxiomViolationError, StructureError
from service.finite_groups import FiniteGroup
from service.report import VerificationReport
from utils.config_manager import get_law_tolerance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantumGroup:
    """有限量子群（余積の列 i は Δ(e_i) の e_j⊗e_k 座標、添字 j*d + k）"""

    algebra: AlgebraPresentation
    blocks: BlockStructure
    comul: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    haar: np.ndarray
    name: str = ''

    def __post_init__(self):
        d = self.algebra.dim
        _check_shapes(d, self.comul, self.counit, self.antipode, self.haar)
        for field_name in ('comul', 'counit', 'antipode', 'haar'):
            object.__setattr__(self, field_name, np.asarray(getattr(self, field_name), dtype=complex))
        if sum(n * n for n in self.blocks.sizes) != d:
            raise StructureError(f"ブロックサイズの二乗和が次元と一致しません: {self.blocks.sizes}")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def comul_tensor(self) -> np.ndarray:
        """D[i, a, b] = Δ(e_i) の e_a⊗e_b 係数"""
        d = self.dim
        return self.comul.T.reshape(d, d, d)


@dataclass(frozen=True, eq=False)
class IrrepTable:
    """既約表現の行列係数 u^α_ij（coeffs[α][i, j] が A の座標）"""

    sizes: tuple[int, ...]
    coeffs: tuple[np.ndarray, ...]
    trivial_index: int
    dual_blocks: BlockStructure
    dagger: bool = False

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """全係数を行に並べた d×d 行列（行 (α, i, j)）"""
        return np.vstack([c.reshape(-1, c.shape[-1]) for c in self.coeffs])

    @property
    def row_weights(self) -> np.ndarray:
        return np.concatenate([np.full(n * n, 1.0 / n) for n in self.sizes])

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.coefficient_matrix))


def _check_shapes(d: int, comul, counit, antipode, haar) -> None:
    expected = {'comul': (d * d, d), 'counit': (d,), 'antipode': (d, d), 'haar': (d,)}
    for label, value in (('comul', comul), ('counit', counit), ('antipode', antipode), ('haar', haar)):
        shape = np.shape(value)
        if shape != expected[label]:
            raise StructureError(f"{label} の形状が不正です: {shape} (期待値 {expected[label]})")


def comul_tensor(comul: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(comul, dtype=complex).T.reshape(d, d, d)


def coassociativity_residual(D: np.ndarray) -> float:
    left = np.einsum('iab,apq->ipqb', D, D)
    right = np.einsum('iab,bqr->iaqr', D, D)
    return float(np.max(np.abs(left - right)))


def counit_residuals(D: np.ndarray, counit: np.ndarray) -> tuple[float, float]:
    eye = np.eye(D.shape[0])
    left = np.einsum('a,iab->ib', counit, D)
    right = np.einsum('iab,b->ia', D, counit)
    return float(np.max(np.abs(left - eye))), float(np.max(np.abs(right - eye)))


def haar_invariance_residuals(D: np.ndarray, haar: np.ndarray, unit: np.ndarray) -> tuple[float, float]:
    left = np.einsum('a,iab->ib', haar, D)
    right = np.einsum('iab,b->ia', D, haar)
    target = np.outer(haar, unit)
    return float(np.max(np.abs(left - target))), float(np.max(np.abs(right - target)))


def star_preserving_residual(D: np.ndarray, invol: np.ndarray) -> float:
    """Δ(x*) = Δ(x)* の残差"""
    lhs = np.einsum('pi,pab->iab', invol, D)
    rhs = np.einsum('iab,pa,qb->ipq', np.conj(D), invol, invol)
    return float(np.max(np.abs(lhs - rhs)))


def _trace_residual(pres: AlgebraPresentation, h: np.ndarray) -> float:
    ch = np.einsum('ijk,k->ij', pres.mul, h)
    return float(np.max(np.abs(ch - ch.T)))


def _min_gram_eigenvalue(pres: AlgebraPresentation, h: np.ndarray) -> float:
    G = gram_matrix(pres, h)
    return float(np.linalg.eigvalsh((G + G.conj().T) / 2)[0])


def haar_state(algebra: AlgebraPresentation, comul: np.ndarray, counit: np.ndarray,
               antipode: np.ndarray, tol: float | None = None) -> np.ndarray:
    """不変性の線形方程式と h(1)=1 から Haar 状態を求める"""
    if tol is None:
        tol = get_law_tolerance()
    d = algebra.dim
    D = comul_tensor(comul, d)
    unit = algebra.unit
    eye = np.eye(d)
    # (h⊗ι)Δ(e_i) = h(e_i)1, (ι⊗h)Δ(e_i) = h(e_i)1
    left = np.transpose(D, (0, 2, 1)) - np.einsum('ai,b->iba', eye, unit)
    right = D - np.einsum('bi,a->iab', eye, unit)
    system = np.vstack([left.reshape(d * d, d), right.reshape(d * d, d)])
    kernel = null_space(system, rcond=1e-10)
    if kernel.shape[1] != 1:
        raise AxiomViolationError(f"Haar状態の方程式系の解空間が1次元ではありません（次元 {kernel.shape[1]}）")
    v = kernel[:, 0]
    norm = unit @ v
    if abs(norm) < tol:
        raise AxiomViolationError("不変汎関数が単位元で消えるため正規化できません")
    h = v / norm
    if _min_gram_eigenvalue(algebra, h) < -1e3 * tol:
        raise AxiomViolationError("不変汎関数が正値ではありません")
    return h


def verify_cqg(qg: QuantumGroup, tol: float | None = None) -> VerificationReport:
    """量子群の全公理を残差として検証（Haar 状態は再計算して比較）"""
    if tol is None:
        tol = get_law_tolerance()
    pres = qg.algebra
    d = qg.dim
    c = pres.mul
    J = pres.invol
    D = qg.comul_tensor
    S = qg.antipode
    eps = qg.counit
    h = qg.haar
    eye = np.eye(d)

    report = VerificationReport(f'cqg {qg.name}'.strip())
    report.extend(verify_algebra(pres, tol), prefix='algebra.')

    lhs = np.einsum('ijk,kpq->ijpq', c, D)
    rhs = np.einsum('iab,jce,acp,beq->ijpq', D, D, c, c, optimize=True)
    report.add('comul_multiplicative', np.max(np.abs(lhs - rhs)), tol)
    report.add('comul_unital', np.max(np.abs(qg.comul @ pres.unit - np.kron(pres.unit, pres.unit))), tol)
    report.add('comul_star', star_preserving_residual(D, J), tol)
    report.add('coassociativity', coassociativity_residual(D), tol)

    left_eps, right_eps = counit_residuals(D, eps)
    report.add('counit_left', left_eps, tol)
    report.add('counit_right', right_eps, tol)

    target = np.outer(eps, pres.unit)
    s_left = np.einsum('iab,pa,pbk->ik', D, S, c)
    s_right = np.einsum('iab,pb,apk->ik', D, S, c)
    report.add('antipode_left', np.max(np.abs(s_left - target)), tol)
    report.add('antipode_right', np.max(np.abs(s_right - target)), tol)
    report.add('antipode_involutive', np.max(np.abs(S @ S - eye)), tol)
    report.add('antipode_star', np.max(np.abs(S @ J - J @ np.conj(S))), tol)
    report.add('star_antipode_cycle', check_antipode_involution(qg), tol)

    left_h, right_h = haar_invariance_residuals(D, h, pres.unit)
    report.add('haar_left_invariance', left_h, tol)
    report.add('haar_right_invariance', right_h, tol)
    report.add('haar_normalized', abs(h @ pres.unit - 1.0), tol)
    report.add('haar_positive', max(0.0, -_min_gram_eigenvalue(pres, h)), tol)
    report.add('haar_trace', _trace_residual(pres, h), tol)
    try:
        recomputed = haar_state(pres, qg.comul, eps, S, tol)
        report.add('haar_recomputed', np.max(np.abs(recomputed - h)), tol)
    except AxiomViolationError as e:
        logger.warning(f"Haar状態の再計算に失敗しました: {e}")
        report.add('haar_recomputed', float('inf'), tol, error=str(e))

    logger.info(f"量子群 {qg.name} の検証: {'合格' if report.passed else '不合格'} (最大残差 {report.max_residual:.3e})")
    return report


def check_antipode_involution(qg: QuantumGroup) -> float:
    """*∘S∘*∘S = ι の残差"""
    J = qg.algebra.invol
    S = qg.antipode
    cycle = J @ np.conj(S) @ np.conj(J) @ S
    return float(np.max(np.abs(cycle - np.eye(qg.dim))))


def quantum_group_from_parts(algebra: AlgebraPresentation, comul, counit, antipode, haar=None,
                             name: str = '', tol: float | None = None) -> QuantumGroup:
    comul = np.asarray(comul, dtype=complex)
    counit = np.asarray(counit, dtype=complex)
    antipode = np.asarray(antipode, dtype=complex)
    d = algebra.dim
    _check_shapes(d, comul, counit, antipode, np.zeros(d) if haar is None else haar)
    if haar is None:
        haar = haar_state(algebra, comul, counit, antipode, tol)
    blocks = wedderburn(algebra, tol)
    return QuantumGroup(algebra, blocks, comul, counit, antipode, np.asarray(haar, dtype=complex), name)


def function_algebra(group: FiniteGroup) -> QuantumGroup:
    """可換量子群 C(G)（基底は指示関数 e_g）"""
    n = group.order
    mul = np.zeros((n, n, n), dtype=complex)
    comul = np.zeros((n * n, n), dtype=complex)
    antipode = np.zeros((n, n), dtype=complex)
    for g in range(n):
        mul[g, g, g] = 1.0
        antipode[group.inverses[g], g] = 1.0
        for k in range(n):
            comul[g * n + k, group.multiply(g, k)] = 1.0
    counit = np.zeros(n, dtype=complex)
    counit[group.identity] = 1.0
    algebra = AlgebraPresentation(n, mul, np.ones(n, dtype=complex), np.eye(n, dtype=complex))
    haar = np.full(n, 1.0 / n, dtype=complex)
    qg = QuantumGroup(algebra, wedderburn(algebra), comul, counit, antipode, haar, f'c:{group.name}')
    logger.debug(f"関数環 {qg.name} を構築しました: dim={n}")
    return qg


def group_algebra(group: FiniteGroup) -> QuantumGroup:
    """余可換量子群 C[G]（基底は λ_g）"""
    n = group.order
    mul = np.zeros((n, n, n), dtype=complex)
    comul = np.zeros((n * n, n), dtype=complex)
    antipode = np.zeros((n, n), dtype=complex)
    for g in range(n):
        antipode[group.inverses[g], g] = 1.0
        comul[g * n + g, g] = 1.0
        for k in range(n):
            mul[g, k, group.multiply(g, k)] = 1.0
    unit = np.zeros(n, dtype=complex)
    unit[group.identity] = 1.0
    algebra = AlgebraPresentation(n, mul, unit, antipode.copy())
    haar = unit.copy()
    qg = QuantumGroup(algebra, wedderburn(algebra), comul, np.ones(n, dtype=complex), antipode, haar,
                      f'g:{group.name}')
    logger.debug(f"群環 {qg.name} を構築しました: dim={n}, blocks={list(qg.blocks.sizes)}")
    return qg


def dual_presentation(algebra: AlgebraPresentation, comul: np.ndarray, counit: np.ndarray,
                      antipode: np.ndarray) -> AlgebraPresentation:
    """畳み込み代数 A* を双対基底で表示（積は畳み込み、対合は φ ↦ conj(φ(S(·)*))）"""
    d = algebra.dim
    mul = comul_tensor(comul, d).transpose(1, 2, 0)
    invol = (np.conj(algebra.invol) @ antipode).T
    return AlgebraPresentation(d, mul, counit, invol)


def irrep_table_from_dual(dual: AlgebraPresentation, unit: np.ndarray, dagger: bool = False,
                          tol: float | None = None) -> IrrepTable:
    """双対代数の行列単位の双対基底を A の元として引き戻す"""
    dual_blocks = wedderburn(dual, tol)
    rows = dual_blocks.iso
    coeffs = []
    offs = dual_blocks.offsets
    trivial = -1
    for k, n in enumerate(dual_blocks.sizes):
        block = rows[offs[k]:offs[k + 1]].reshape(n, n, -1)
        coeffs.append(block.copy())
        if trivial < 0 and n == 1 and np.max(np.abs(block[0, 0] - unit)) < 1e-6:
            trivial = k
    if trivial < 0:
        raise AxiomViolationError("自明表現 u = 1 が見つかりません")
    return IrrepTable(dual_blocks.sizes, tuple(coeffs), trivial, dual_blocks, dagger)


def irreps(qg: QuantumGroup, tol: float | None = None) -> IrrepTable:
    dual = dual_presentation(qg.algebra, qg.comul, qg.counit, qg.antipode)
    table = irrep_table_from_dual(dual, qg.algebra.unit, tol=tol)
    logger.info(f"{qg.name} の既約表現: sizes={list(table.sizes)}, 自明表現={table.trivial_index}")
    return table


def _orthogonality_matrices(pres: AlgebraPresentation, haar: np.ndarray, U: np.ndarray):
    ch = np.einsum('abk,k->ab', pres.mul, haar)
    Ustar = np.array([adjoint(pres, u) for u in U])
    return U @ ch @ Ustar.T, Ustar @ ch @ U.T


def check_orthogonality(qg: QuantumGroup, tbl: IrrepTable, tol: float | None = None) -> VerificationReport:
    """h(u^α_ij (u^β_kl)*) = h((u^α_ij)* u^β_kl) = δδδ / n_α"""
    if tol is None:
        tol = get_law_tolerance()
    U = tbl.coefficient_matrix
    expected = np.diag(tbl.row_weights)
    m1, m2 = _orthogonality_matrices(qg.algebra, qg.haar, U)
    report = VerificationReport('orthogonality')
    report.add('h(u u*)', np.max(np.abs(m1 - expected)), tol)
    report.add('h(u* u)', np.max(np.abs(m2 - expected)), tol)

    nontrivial = [row for k, c in enumerate(tbl.coeffs) if k != tbl.trivial_index for row in c.reshape(-1, qg.dim)]
    annihilation = max((abs(qg.haar @ row) for row in nontrivial), default=0.0)
    report.add('haar_annihilates_nontrivial', annihilation, tol)
    return report


def verify_irrep_table(qg: QuantumGroup, tbl: IrrepTable, tol: float | None = None) -> VerificationReport:
    """Δ(u_ij) = Σ u_ik⊗u_kj、ε(u_ij) = δ_ij、S(u_ij) = u_ji*、ユニタリ性、基底性"""
    if tol is None:
        tol = get_law_tolerance()
    pres = qg.algebra
    report = VerificationReport('irreps')
    comul_res = counit_res = antipode_res = unitary_res = 0.0
    for n, u in zip(tbl.sizes, tbl.coeffs):
        for i in range(n):
            for j in range(n):
                expected = sum(np.kron(u[i, k], u[k, j]) for k in range(n))
                comul_res = max(comul_res, float(np.max(np.abs(qg.comul @ u[i, j] - expected))))
                counit_res = max(counit_res, abs(qg.counit @ u[i, j] - (1.0 if i == j else 0.0)))
                antipode_res = max(antipode_res,
                                   float(np.max(np.abs(qg.antipode @ u[i, j] - adjoint(pres, u[j, i])))))
                target = pres.unit if i == j else 0.0
                uu = sum(np.einsum('i,j,ijk->k', adjoint(pres, u[k, i]), u[k, j], pres.mul) for k in range(n))
                unitary_res = max(unitary_res, float(np.max(np.abs(uu - target))))
    report.add('coefficient_comul', comul_res, tol)
    report.add('coefficient_counit', counit_res, tol)
    report.add('coefficient_antipode', antipode_res, tol)
    report.add('unitarity', unitary_res, tol)
    cond = tbl.condition_number()
    report.add('basis', 0.0 if np.isfinite(cond) else float('inf'), tol, condition_number=cond)
    return report
