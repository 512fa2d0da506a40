"""冪等状態: 判定、性質、Cesàro 捕捉、小次元での全探索"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svd
from scipy.optimize import least_squares, minimize

from service.dual_functionals import (
    FourierImage,
    Functional,
    convolve,
    counit_functional,
    fourier,
    functional_norm,
    inverse_fourier,
    is_state,
    min_density_eigenvalue,
)
from service.errors import ConvergenceError, DomainError
from service.quantum_group import IrrepTable, QuantumGroup, irreps
from service.report import VerificationReport
from utils.config_manager import (
    get_cesaro_max_iter,
    get_dedup_tolerance,
    get_enumeration_max_dim,
    get_law_tolerance,
    get_optimizer_starts,
    get_spectral_tolerance,
)

logger = logging.getLogger(__name__)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class IdempotentEnumeration:
    """全探索の結果"""

    states: list[Functional] = field(default_factory=list)
    partial: bool = False
    patterns_tried: int = 0


def is_idempotent_state(qg, phi: Functional, tol: float | None = None) -> bool:
    if tol is None:
        tol = get_law_tolerance()
    if not is_state(qg, phi, tol):
        return False
    return functional_norm(qg, convolve(qg, phi, phi) - phi) < tol


def check_idempotent_properties(qg, tbl: IrrepTable, phi: Functional,
                                tol: float | None = None) -> VerificationReport:
    """φ = φ∘S と φ̂(α) が自己共役射影であることを検証"""
    if tol is None:
        tol = get_law_tolerance()
    if not is_idempotent_state(qg, phi, tol):
        raise DomainError("冪等状態ではない汎関数が与えられました")
    report = VerificationReport('idempotent_properties')
    report.add('antipode_invariance', phi.distance(Functional(qg.antipode.T @ phi.covec)), tol)
    img = fourier(qg, tbl, phi)
    report.add('projection_square', max(float(np.max(np.abs(P @ P - P))) for P in img.blocks_img), tol)
    report.add('projection_self_adjoint', max(float(np.max(np.abs(P - P.conj().T))) for P in img.blocks_img), tol)
    return report


def check_phi_b_identity(qg, phi: Functional, tol: float | None = None) -> VerificationReport:
    """φ⋆φ_b = φ(b)φ（φ_b(a) = φ(ab)）を全基底 b で検証"""
    if tol is None:
        tol = get_law_tolerance()
    worst = 0.0
    for b in range(qg.dim):
        phi_b = Functional(qg.algebra.mul[:, b, :] @ phi.covec)
        lhs = convolve(qg, phi, phi_b)
        worst = max(worst, lhs.distance(phi * phi.covec[b]))
    report = VerificationReport('phi_b_identity')
    report.add('phi_star_phi_b', worst, tol)
    return report


def cesaro_mean(qg, omega: Functional, n: int) -> Functional:
    """(1/n) Σ_{k=1..n} ω^{⋆k}"""
    total = Functional.zeros(qg.dim)
    power = omega
    for k in range(n):
        total = total + power
        if k + 1 < n:
            power = convolve(qg, power, omega)
    return total / n


def cesaro_idempotent(qg, omega: Functional, max_iter: int | None = None,
                      tol: float | None = None) -> Functional:
    """Cesàro 平均 (1/n)Σω^{⋆k} の極限

    (ε+ω)/2 を二乗し続けて求める。φ̂ の各ブロックで (1+λ)/2 は |λ| ≤ 1 の固有値 λ = 1 以外で
    絶対値 1 未満になるため、極限は ω の Cesàro 極限と同じ冪等状態（λ = 1 の固有空間への射影）になる。
    cesaro_mean は有限 n での比較用。
    """
    if max_iter is None:
        max_iter = get_cesaro_max_iter()
    if tol is None:
        tol = get_law_tolerance()
    if not is_state(qg, omega, get_spectral_tolerance()):
        raise DomainError("Cesàro 捕捉には状態が必要です")

    x = (counit_functional(qg) + omega) / 2
    for iteration in range(max_iter):
        squared = convolve(qg, x, x)
        change = squared.distance(x)
        x = squared
        if change < tol:
            logger.debug(f"Cesàro 捕捉が収束しました: 二乗 {iteration + 1} 回")
            if not is_idempotent_state(qg, x, get_spectral_tolerance()):
                raise ConvergenceError("収束値が冪等状態になりませんでした")
            return x
    raise ConvergenceError(f"Cesàro 捕捉が {max_iter} 回の二乗で収束しませんでした")


def support_idempotent(qg, tbl: IrrepTable, omega: Functional, tol: float | None = None) -> Functional:
    """Fourier 像を非零スペクトル部分へ射影した冪等元（根の極限として捕捉される冪等状態）"""
    if tol is None:
        tol = get_spectral_tolerance()
    projections = []
    for B in fourier(qg, tbl, omega).blocks_img:
        n = B.shape[0]
        K = np.linalg.matrix_power(B, n)
        # 階数は絶対しきい値で決める
        U, s, Vh = svd(K)
        rank = int(np.sum(s > tol))
        rng_basis = U[:, :rank]
        ker_basis = Vh[rank:].conj().T
        if rank == 0:
            projections.append(np.zeros_like(B))
            continue
        frame = np.hstack([rng_basis, ker_basis])
        selector = np.hstack([rng_basis, np.zeros_like(ker_basis)])
        projections.append(selector @ np.linalg.inv(frame))
    return inverse_fourier(qg, tbl, FourierImage(tuple(projections)))


def _bloch_projection(theta: float, phi: float) -> np.ndarray:
    v = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    return (np.eye(2) + sum(c * s for c, s in zip(v, _PAULI))) / 2


def _pattern_choices(tbl: IrrepTable) -> list[list[int]]:
    choices = []
    for k, n in enumerate(tbl.sizes):
        if k == tbl.trivial_index:
            choices.append([1])
        elif n > 2:
            raise DomainError(f"{n} 次元ブロックの射影パターンは全探索の対象外です")
        else:
            choices.append(list(range(n + 1)))
    return choices


def _assemble(qg, tbl, ranks, angles) -> Functional:
    mats = []
    pos = 0
    for n, r in zip(tbl.sizes, ranks):
        if r == 0:
            mats.append(np.zeros((n, n), dtype=complex))
        elif r == n:
            mats.append(np.eye(n, dtype=complex))
        else:
            mats.append(_bloch_projection(angles[pos], angles[pos + 1]))
            pos += 2
    return inverse_fourier(qg, tbl, FourierImage(tuple(mats)))


def _state_residual(qg, phi: Functional) -> np.ndarray:
    """冪等状態で 0 になる残差: 密度の反エルミート部分、負の固有値、φ⋆φ − φ"""
    parts = []
    for b in qg.blocks.density_blocks(phi.covec):
        skew = (b - b.conj().T) / 2
        parts.extend([skew.real.reshape(-1), skew.imag.reshape(-1)])
        parts.append(np.minimum(np.linalg.eigvalsh((b + b.conj().T) / 2), 0.0))
    defect = (convolve(qg, phi, phi) - phi).covec
    parts.extend([defect.real, defect.imag])
    return np.concatenate(parts)


def _solve_pattern(qg, tbl, ranks, starts, rng) -> list[Functional]:
    free = sum(1 for n, r in zip(tbl.sizes, ranks) if 0 < r < n)
    if free == 0:
        candidate = _assemble(qg, tbl, ranks, [])
        return [candidate] if min_density_eigenvalue(qg, candidate) >= -1e-9 else []

    def residual(angles):
        return _state_residual(qg, _assemble(qg, tbl, ranks, angles))

    def objective(angles):
        r = residual(angles)
        return float(r @ r)

    found = []
    for _ in range(starts):
        start = np.column_stack([np.arccos(rng.uniform(-1, 1, free)), rng.uniform(0, 2 * np.pi, free)]).reshape(-1)
        result = minimize(objective, start, method='BFGS', options={'gtol': 1e-14, 'maxiter': 2000})
        if result.fun > 1e-10:
            continue
        polished = least_squares(residual, result.x, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        candidate = _assemble(qg, tbl, ranks, polished.x)
        if min_density_eigenvalue(qg, candidate) >= -1e-9:
            found.append(candidate)
    return found


def _sort_key(qg, phi: Functional) -> tuple:
    coords = tuple(v for z in phi.covec for v in (round(float(z.real), 6), round(float(z.imag), 6)))
    return (round(functional_norm(qg, phi), 6), coords)


def enumerate_idempotents_bruteforce(qg: QuantumGroup, budget: int | None = None, tbl: IrrepTable | None = None,
                                     dedup: float | None = None) -> IdempotentEnumeration:
    """Fourier 像の射影パターン全探索と正値性の実現可能性調整で冪等状態を列挙"""
    max_dim = get_enumeration_max_dim()
    if qg.dim > max_dim:
        raise DomainError(f"全探索は dim ≤ {max_dim} に限られます: dim={qg.dim}")
    if tbl is None:
        tbl = irreps(qg)
    if dedup is None:
        dedup = get_dedup_tolerance()
    starts = get_optimizer_starts()

    patterns = list(itertools.product(*_pattern_choices(tbl)))
    result = IdempotentEnumeration()
    if budget is not None and len(patterns) > budget:
        logger.warning(f"射影パターン数 {len(patterns)} が予算 {budget} を超えたため部分結果を返します")
        patterns = patterns[:budget]
        result.partial = True

    spectral = get_spectral_tolerance()
    for index, ranks in enumerate(patterns):
        rng = np.random.default_rng([index, qg.dim])
        for candidate in _solve_pattern(qg, tbl, ranks, starts, rng):
            if not is_idempotent_state(qg, candidate, spectral):
                continue
            if all(functional_norm(qg, candidate - s) >= dedup for s in result.states):
                result.states.append(candidate)
        result.patterns_tried += 1

    result.states.sort(key=lambda s: _sort_key(qg, s))
    logger.info(f"{qg.name} の冪等状態: {len(result.states)} 個（パターン {result.patterns_tried} 件）")
    return result
