"""無限分解可能性: 根の連鎖、位数補題、冪等状態の捕捉と生成元の抽出、主定理の検証スイート"""
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import barycentric_interpolate
from scipy.linalg import fractional_matrix_power

from service.algebra_core import adjoint, left_matrix
from service.dual_functionals import (
    FourierImage,
    Functional,
    convolution_power,
    convolve,
    counit_functional,
    fourier,
    functional_norm,
    haar_functional,
    hermitian_part,
    inverse_fourier,
    is_hermitian,
    is_state,
    min_density_eigenvalue,
    star,
)
from service.errors import ChainRejectedError, DomainError, FqgError, InternalAssertionError
from service.hypergroup import build_hypergroup_from_idempotent, counit_support, restrict_functional
from service.idempotent import enumerate_idempotents_bruteforce, is_idempotent_state, support_idempotent
from service.poisson import (
    PoissonDecomposition,
    exp_phi,
    is_bi_invariant,
    is_conditionally_positive,
    levy_decompose,
    log_phi,
)
from service.quantum_group import IrrepTable, QuantumGroup, irreps
from service.report import VerificationReport
from utils.config_manager import (
    get_branch_budget,
    get_chain_depth,
    get_law_tolerance,
    get_min_root_index,
    get_psd_threshold,
    get_richardson_threshold,
    get_spectral_tolerance,
    get_suite_poisson_cases,
    get_suite_seed,
)

logger = logging.getLogger(__name__)

_NEGATIVE_AXIS = 1e-12


@dataclass
class RootChain:
    """roots[k] = (n_k, ω_{n_k})、ω_{n_k}^{⋆n_k} = ω"""

    omega: Functional
    roots: list[tuple[int, Functional]] = field(default_factory=list)
    bi_invariant: bool = False
    monotone: bool = True
    clip_magnitudes: list[float] = field(default_factory=list)

    @property
    def indices(self) -> list[int]:
        return [n for n, _ in self.roots]


@dataclass(frozen=True)
class RootSearchFailure:
    level: int
    reason: str
    min_eigenvalue: float


def poisson_root(qg, dec: PoissonDecomposition, n: int) -> Functional:
    """exp_φ(u/n)"""
    if n < 1:
        raise DomainError(f"根の次数は1以上が必要です: {n}")
    return exp_phi(qg, dec.phi, dec.generator / n)


def _spectral_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def verify_matrix_lemma(A, B, P, tol: float | None = None) -> VerificationReport:
    """A = AP = PA、AB = P、‖A‖, ‖B‖ ≤ 1 のもとで A*A = AA* = P"""
    if tol is None:
        tol = get_law_tolerance()
    A, B, P = (np.atleast_2d(np.asarray(m, dtype=complex)) for m in (A, B, P))
    if np.max(np.abs(P - P.conj().T)) > tol or np.max(np.abs(P @ P - P)) > tol:
        raise DomainError("P が自己共役射影ではありません")
    if np.max(np.abs(A @ P - A)) > tol or np.max(np.abs(P @ A - A)) > tol:
        raise DomainError("A = AP = PA を満たしません")
    if np.max(np.abs(A @ B - P)) > tol:
        raise DomainError("AB = P を満たしません")
    if _spectral_norm(A) > 1.0 + tol or _spectral_norm(B) > 1.0 + tol:
        raise DomainError("‖A‖ ≤ 1, ‖B‖ ≤ 1 を満たしません")
    report = VerificationReport('matrix_lemma')
    report.add('A*A=P', np.max(np.abs(A.conj().T @ A - P)), tol)
    report.add('AA*=P', np.max(np.abs(A @ A.conj().T - P)), tol)
    return report


def verify_state_corollary(qg, u: Functional, v: Functional, phi: Functional,
                           tol: float | None = None, tbl: IrrepTable | None = None) -> VerificationReport:
    """u⋆φ = φ⋆u = u、u⋆v = φ のとき u*⋆u = u⋆u* = φ（Fourier 像のブロックごとに行列補題を適用）"""
    if tol is None:
        tol = get_law_tolerance()
    spectral = get_spectral_tolerance()
    if not (is_state(qg, u, spectral) and is_state(qg, v, spectral)):
        raise DomainError("u, v は状態である必要があります")
    if not is_bi_invariant(qg, phi, u, tol):
        raise DomainError("u が φ-双不変ではありません")
    if functional_norm(qg, convolve(qg, u, v) - phi) > tol:
        raise DomainError("u⋆v = φ を満たしません")
    if tbl is None:
        tbl = irreps(qg)
    report = VerificationReport('state_corollary')
    images = zip(fourier(qg, tbl, u).blocks_img, fourier(qg, tbl, v).blocks_img, fourier(qg, tbl, phi).blocks_img)
    for k, (A, B, P) in enumerate(images):
        report.extend(verify_matrix_lemma(A, B, P, tol), prefix=f'block[{k}].')
    us = star(qg, u)
    report.add('u*u=phi', functional_norm(qg, convolve(qg, us, u) - phi), tol)
    report.add('uu*=phi', functional_norm(qg, convolve(qg, u, us) - phi), tol)
    return report


def _is_character(H, u: Functional, tol: float) -> bool:
    values = np.einsum('ijk,k->ij', H.algebra.mul, u.covec)
    return bool(np.max(np.abs(values - np.outer(u.covec, u.covec))) < tol)


def unitary_state_order(H, u: Functional, tol: float | None = None) -> tuple[int, bool]:
    """u⋆u* = u*⋆u = ε なる状態の位数（u^{⋆n} = ε となる最小の n）と指標かどうか"""
    if tol is None:
        tol = get_spectral_tolerance()
    eps = counit_functional(H)
    us = star(H, u)
    if functional_norm(H, convolve(H, u, us) - eps) > tol or functional_norm(H, convolve(H, us, u) - eps) > tol:
        raise DomainError("u⋆u* = u*⋆u = ε を満たしません")
    power = u
    order = 0
    for n in range(1, H.dim + 1):
        if functional_norm(H, power - eps) < tol:
            order = n
            break
        power = convolve(H, power, u)
    if order == 0:
        raise InternalAssertionError(f"dim = {H.dim} 以下の位数が見つかりませんでした")
    character = _is_character(H, u, tol)
    if (isinstance(H, QuantumGroup) or getattr(H, 'kind', '') == 'quantum_group') and not character:
        raise InternalAssertionError("量子群上のユニタリな状態が指標になりませんでした")
    logger.debug(f"ユニタリ状態の位数: {order}, 指標: {character}")
    return order, character


def order_mod_idempotent(qg, u: Functional, phi: Functional, tol: float | None = None,
                         v: Functional | None = None) -> int:
    """u^{⋆m} = φ となる最小の m（A_φ に制限して超群上の位数に帰着）"""
    if tol is None:
        tol = get_spectral_tolerance()
    if not is_idempotent_state(qg, phi, tol):
        raise DomainError("φ が冪等状態ではありません")
    if not is_bi_invariant(qg, phi, u, tol):
        raise DomainError("u = u⋆φ = φ⋆u を満たしません")
    if v is not None and functional_norm(qg, convolve(qg, u, v) - phi) > tol:
        raise DomainError("u⋆v = φ を満たしません")
    us = star(qg, u)
    if functional_norm(qg, convolve(qg, u, us) - phi) > tol or functional_norm(qg, convolve(qg, us, u) - phi) > tol:
        raise DomainError("u⋆u* = u*⋆u = φ を満たしません（右逆元を持つ状態ではありません）")
    H = build_hypergroup_from_idempotent(qg, phi)
    order, _ = unitary_state_order(H, restrict_functional(H, u), tol)
    return order


def _tail_start(distances: list[float]) -> int | None:
    for j in range(len(distances)):
        if all(d < 0.5 for d in distances[j:]):
            return j
    return None


def _check_chain(qg, chain: RootChain, phi: Functional, tol: float) -> list[float]:
    indices = chain.indices
    if not chain.roots:
        raise ChainRejectedError(1, "根の連鎖が空です")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ChainRejectedError(1, f"添字が狭義単調増加ではありません: {indices}")
    for n, root in chain.roots:
        if not is_bi_invariant(qg, phi, root, tol):
            raise ChainRejectedError(2, f"n = {n} の根が φ-双不変ではありません")
    for (m, lower), (m_next, upper) in zip(chain.roots, chain.roots[1:]):
        if m_next % m:
            raise ChainRejectedError(3, f"{m} が {m_next} を割り切りません")
        gap = functional_norm(qg, convolution_power(qg, upper, m_next // m) - lower)
        if gap > tol:
            raise ChainRejectedError(3, f"ω_{m} = ω_{m_next}^{m_next // m} を満たしません（残差 {gap:.3e}）")
    for n, root in chain.roots:
        gap = functional_norm(qg, convolution_power(qg, root, n) - chain.omega)
        if gap > tol:
            raise ChainRejectedError(3, f"n = {n} の元が ω の根ではありません（残差 {gap:.3e}）")
    distances = [functional_norm(qg, root - phi) for _, root in chain.roots]
    if _tail_start(distances) is None:
        raise ChainRejectedError(4, f"根が φ に近づいていません: 最後の距離 {distances[-1]:.6f}")
    return distances


def capture_and_extract(qg, chain: RootChain, tol: float | None = None,
                        phi: Functional | None = None) -> PoissonDecomposition:
    """根の連鎖から冪等状態 φ を捕捉し v = m·log_φ(ω_m) を Lévy 型に分解"""
    if tol is None:
        tol = get_spectral_tolerance()
    tbl = irreps(qg)
    if phi is None:
        phi = support_idempotent(qg, tbl, chain.omega)
    if not is_idempotent_state(qg, phi, tol):
        raise DomainError("捕捉した汎関数が冪等状態になりませんでした")
    distances = _check_chain(qg, chain, phi, tol)
    j0 = _tail_start(distances)
    assert j0 is not None
    m, root = chain.roots[j0]
    generator = hermitian_part(qg, log_phi(qg, phi, root) * m)
    residual = functional_norm(qg, exp_phi(qg, phi, generator) - chain.omega)
    if residual > tol:
        raise InternalAssertionError(f"exp_φ(v) が ω に一致しません（残差 {residual:.3e}）")
    if not is_conditionally_positive(qg, phi, generator, tol):
        raise DomainError("抽出した生成元が条件付き正定値になりません")
    logger.info(f"冪等状態を捕捉しました: j0={j0}, m={m}, ‖v‖={functional_norm(qg, generator):.6f}")
    return levy_decompose(qg, phi, generator, tol)


def _corner_singular_values(blocks_img, projections, tol: float) -> tuple[list[np.ndarray], list[int]]:
    """各ブロックで P̂ の像へ圧縮した行列の特異値と次元"""
    values, weights = [], []
    for B, P in zip(blocks_img, projections):
        w, V = np.linalg.eigh((P + P.conj().T) / 2)
        Q = V[:, w > 0.5]
        if Q.shape[1] == 0:
            continue
        values.append(np.linalg.svd(Q.conj().T @ B @ Q, compute_uv=False))
        weights.append(B.shape[0])
    return values, weights


def _normalized_trace_power(values: list[np.ndarray], weights: list[int], power: float) -> float:
    """正規化した双対 Haar 状態で測る τ(|x|^power)"""
    total = sum(n * v.size for n, v in zip(weights, values))
    return float(sum(n * np.sum(v ** power) for n, v in zip(weights, values)) / total)


def second_proof_diagnostics(qg, chain: RootChain, tol: float | None = None,
                             phi: Functional | None = None) -> tuple[VerificationReport, Functional]:
    """根の減衰条件と主要不等式を根ごとに検証し、n_k(ω_{n_k} − φ) の極限を外挿で求める"""
    if tol is None:
        tol = get_spectral_tolerance()
    tbl = irreps(qg)
    if phi is None:
        phi = support_idempotent(qg, tbl, chain.omega)
    H = build_hypergroup_from_idempotent(qg, phi)
    k0, _ = counit_support(H)
    projections = fourier(qg, tbl, phi).blocks_img
    target_values, weights = _corner_singular_values(fourier(qg, tbl, chain.omega).blocks_img, projections, tol)
    singular = bool(target_values) and min(float(np.min(v)) for v in target_values) < tol

    report = VerificationReport('second_proof')
    report.note('omega_singular', singular)
    report.note('omega_singular_values', [float(x) for v in target_values for x in v])
    decay = 0.0
    bound = 0.0
    bound_applies = True
    for n, root in chain.roots:
        restricted = restrict_functional(H, root)
        mass = float(H.blocks.density_blocks(restricted.covec)[k0][0, 0].real)
        distance = functional_norm(qg, root - phi)
        report.add(f'root[{n}].distance_identity', abs(distance - 2.0 * (1.0 - mass)), tol, p=mass)

        root_values, _ = _corner_singular_values(fourier(qg, tbl, root).blocks_img, projections, tol)
        two_norm_sq = _normalized_trace_power(root_values, weights, 2.0)
        if singular:
            schatten = 0.0
        else:
            schatten = _normalized_trace_power(target_values, weights, 2.0 / n)
        holder = schatten ** (n / 2.0) - two_norm_sq ** (n / 2.0)
        report.add(f'root[{n}].holder', max(0.0, holder), tol)
        report.add(f'root[{n}].haar_bound', max(0.0, two_norm_sq - mass ** 2 - (1.0 - mass) ** 2), tol)
        if mass >= 0.5:
            report.add(f'root[{n}].key_inequality', max(0.0, schatten - mass), tol)
            bound = max(bound, 2.0 * n * (1.0 - schatten))
            report.add(f'root[{n}].decay_bound', max(0.0, n * distance - 2.0 * n * (1.0 - schatten)), tol)
        else:
            bound_applies = False
        decay = max(decay, n * distance)

    report.note('decay_constant', decay)
    if bound_applies:
        # 一様評価 n_k‖ω_{n_k} − φ‖ ≤ M
        report.add('decay_constant', max(0.0, decay - bound), tol, M=decay, bound=bound)
    else:
        logger.debug(f"質量 1/2 未満の根があるため一様評価を省略します: M={decay:.6f}")

    hs = np.array([1.0 / n for n, _ in chain.roots])
    samples = np.array([((root - phi) * n).covec for n, root in chain.roots])
    if len(chain.roots) == 1:
        extracted = samples[0]
        change = float('inf')
    else:
        extracted = barycentric_interpolate(hs, samples, 0.0, axis=0)
        coarse = barycentric_interpolate(hs[1:], samples[1:], 0.0, axis=0)
        change = float(np.max(np.abs(extracted - coarse)))
    # 外挿で増幅された丸め誤差を φ⋆g⋆φ とエルミート部分で除く
    raw = Functional(np.asarray(extracted))
    generator = hermitian_part(qg, convolve(qg, convolve(qg, phi, raw), phi))
    report.note('projection_change', functional_norm(qg, generator - raw))
    report.add('extrapolation_converged', 0.0 if change < get_richardson_threshold() else change, tol, change=change)
    report.add('exp_of_limit', functional_norm(qg, exp_phi(qg, phi, generator) - chain.omega), 1e2 * tol)
    logger.info(f"第二証明の診断: M={decay:.6f}, 外挿の変化={change:.3e}")
    return report, generator


def _branch_options(eigenvalues: np.ndarray, n: int, tol: float) -> list[list[complex]]:
    options = []
    for lam in eigenvalues:
        if abs(lam) < tol:
            options.append([0.0])
            continue
        principal = complex(lam) ** (1.0 / n)
        # 主値から偏角の小さい順
        shifts = sorted(range(n), key=lambda k: min(k, n - k))
        options.append([principal * np.exp(2j * np.pi * k / n) for k in shifts])
    return options


def _block_root_candidates(B: np.ndarray, n: int, tol: float) -> tuple[list[list[np.ndarray]], bool]:
    """ブロックの n 乗根の候補（先頭が主値）。負の実軸上の固有値があれば主値は無効"""
    lam, V = np.linalg.eig(B)
    on_cut = any(abs(z.imag) < _NEGATIVE_AXIS and z.real < -tol for z in lam)
    if np.linalg.cond(V) > 1e8:
        if on_cut or np.min(np.abs(lam)) < tol:
            return [], on_cut
        return [[fractional_matrix_power(B, 1.0 / n)]], on_cut
    Vinv = np.linalg.inv(V)
    roots = [V @ np.diag(choice) @ Vinv for choice in itertools.product(*_branch_options(lam, n, tol))]
    return [roots], on_cut


def _clip_to_state(qg, candidate: Functional) -> tuple[Functional, float]:
    """密度ブロックの負の固有値を 0 に切り詰めて正規化。切り詰めた量も返す"""
    herm = hermitian_part(qg, candidate)
    clipped, magnitude = [], 0.0
    for b in qg.blocks.density_blocks(herm.covec):
        w, V = np.linalg.eigh((b + b.conj().T) / 2)
        magnitude = max(magnitude, float(-np.min(w, initial=0.0)))
        clipped.append((V * np.maximum(w, 0.0)) @ V.conj().T)
    state = Functional(qg.blocks.covector_from_density(clipped))
    return state / state(qg.algebra.unit), magnitude


def _find_root(qg, tbl: IrrepTable, target: Functional, n: int, budget: int, spectral: float):
    blocks = fourier(qg, tbl, target).blocks_img
    per_block, cut_hit = [], False
    for B in blocks:
        candidates, on_cut = _block_root_candidates(B, n, spectral)
        cut_hit = cut_hit or on_cut
        if not candidates:
            return None, 0.0, 'Fourier ブロックが対角化できず主値の根も定まりません', -np.inf
        per_block.append(candidates[0])

    best_eig = -np.inf
    threshold = -get_psd_threshold()
    for index, choice in enumerate(itertools.product(*per_block)):
        if index >= budget:
            return None, 0.0, f'分岐の予算 {budget} を使い切りました', best_eig
        if index == 0 and cut_hit:
            continue
        candidate = inverse_fourier(qg, tbl, FourierImage(tuple(choice)))
        if not is_hermitian(qg, candidate, spectral):
            continue
        eig = min_density_eigenvalue(qg, hermitian_part(qg, candidate))
        best_eig = max(best_eig, eig)
        if eig < threshold:
            continue
        state, clip = _clip_to_state(qg, candidate)
        if functional_norm(qg, convolution_power(qg, state, n) - target) > spectral:
            continue
        return state, clip, '', eig
    return None, 0.0, '状態となる根が見つかりません', best_eig


def chain_depth_for(n: int) -> int:
    """N^k が min_root_index に届く深さ（chain_depth 未満にはしない）"""
    if n < 2:
        raise DomainError(f"N は2以上が必要です: {n}")
    return max(get_chain_depth(), math.ceil(math.log(get_min_root_index()) / math.log(n)))


def root_chain_search(qg, omega: Functional, n: int, depth: int | None = None,
                      tbl: IrrepTable | None = None) -> RootChain | RootSearchFailure:
    """b_{k−1} = b_k^{⋆N} を満たす根 b_1, ..., b_depth を Fourier ブロックの行列根で探す"""
    if n < 2:
        raise DomainError(f"N は2以上が必要です: {n}")
    if depth is None:
        depth = chain_depth_for(n)
    if tbl is None:
        tbl = irreps(qg)
    spectral = get_spectral_tolerance()
    if not is_state(qg, omega, spectral):
        raise DomainError("根の探索には状態が必要です")
    budget = get_branch_budget()

    chain = RootChain(omega)
    current = omega
    for level in range(1, depth + 1):
        root, clip, reason, eig = _find_root(qg, tbl, current, n, budget, spectral)
        if root is None:
            logger.info(f"根の探索に失敗しました: level={level}, 理由={reason}")
            return RootSearchFailure(level, reason, float(eig))
        chain.roots.append((n ** level, root))
        chain.clip_magnitudes.append(clip)
        current = root

    phi = support_idempotent(qg, tbl, omega)
    chain.bi_invariant = all(is_bi_invariant(qg, phi, r, spectral) for _, r in chain.roots)
    logger.info(f"根の連鎖を構築しました: indices={chain.indices}, 最大切り詰め={max(chain.clip_magnitudes):.2e}")
    return chain


def non_divisible_witness(qg, p: float, tbl: IrrepTable | None = None) -> Functional:
    """自己共役な非自明1次元既約表現 u で p·h(q₊·)/h(q₊) + (1−p)·h(q₋·)/h(q₋)、q± = (1 ± u)/2。p < 1/2 で分解不能"""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p は [0, 1] にある必要があります: {p}")
    if tbl is None:
        tbl = irreps(qg)
    pres = qg.algebra
    for k, (size, coeff) in enumerate(zip(tbl.sizes, tbl.coeffs)):
        u = coeff[0, 0]
        if k == tbl.trivial_index or size != 1 or np.max(np.abs(adjoint(pres, u) - u)) > get_law_tolerance():
            continue
        parts = []
        for sign in (1.0, -1.0):
            q = (pres.unit + sign * u) / 2
            covec = left_matrix(pres, q).T @ qg.haar
            parts.append(Functional(covec / (covec @ pres.unit)))
        return parts[0] * p + parts[1] * (1.0 - p)
    raise DomainError(f"{qg.name} には自己共役な非自明1次元既約表現がありません")


def _random_state(qg, rng: np.random.Generator) -> Functional:
    mats = []
    for n in qg.blocks.sizes:
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        mats.append(g @ g.conj().T)
    state = Functional(qg.blocks.covector_from_density(mats))
    return state / state(qg.algebra.unit)


def _poisson_case(qg, tbl, phi: Functional, generator: Functional, n: int, depth: int,
                  tol: float) -> VerificationReport:
    report = VerificationReport('case')
    omega = exp_phi(qg, phi, generator)
    chain = root_chain_search(qg, omega, n, depth, tbl)
    if isinstance(chain, RootSearchFailure):
        report.add('root_search', float('inf'), tol, level=chain.level, reason=chain.reason)
        return report
    report.add('root_search', 0.0, tol, indices=chain.indices)
    dec = capture_and_extract(qg, chain, tol)
    report.add('first_proof.generator', functional_norm(qg, dec.generator - generator), tol)
    report.add('first_proof.round_trip', functional_norm(qg, exp_phi(qg, dec.phi, dec.generator) - omega), tol)
    diagnostics, extracted = second_proof_diagnostics(qg, chain, tol)
    report.extend(diagnostics, prefix='second_proof.')
    report.add('second_proof.generator', functional_norm(qg, extracted - dec.generator), 1e2 * tol)
    return report


def main_theorem_suite(qg: QuantumGroup, seed: int | None = None, count: int | None = None,
                       tol: float | None = None) -> VerificationReport:
    """Poisson 状態の根の連鎖から生成元を2通りに取り戻し、分解不能な状態で根の探索が失敗することを確認"""
    if seed is None:
        seed = get_suite_seed()
    if count is None:
        count = get_suite_poisson_cases()
    if tol is None:
        tol = get_spectral_tolerance()
    tbl = irreps(qg)
    idempotents = enumerate_idempotents_bruteforce(qg, tbl=tbl).states
    n = math.lcm(*range(1, qg.dim + 1))
    n = max(n, 2)
    depth = chain_depth_for(n)
    report = VerificationReport(f'main_theorem {qg.name}')

    zero = Functional.zeros(qg.dim)
    cases: list[tuple[str, Functional, Functional]] = [
        ('haar', haar_functional(qg), zero),
        ('counit', counit_functional(qg), zero),
    ]
    for index in range(count):
        rng = np.random.default_rng([seed, index])
        phi = idempotents[index % len(idempotents)]
        jump = convolve(qg, convolve(qg, phi, _random_state(qg, rng)), phi)
        rate = float(rng.uniform(0.1, 2.0))
        cases.append((f'poisson[{index}]', phi, hermitian_part(qg, (jump - phi) * rate)))

    for label, phi, generator in cases:
        try:
            case = _poisson_case(qg, tbl, phi, generator, n, depth, tol)
        except FqgError as e:
            logger.error(f"ケース {label} でエラーが発生しました: {e}")
            case = VerificationReport('case')
            case.add('error', float('inf'), tol, error=str(e))
        report.extend(case, prefix=f'{label}.')

    try:
        witness = non_divisible_witness(qg, 0.25, tbl)
    except DomainError:
        logger.debug(f"{qg.name} には分解不能性の証人がありません")
    else:
        outcome = root_chain_search(qg, witness, 2, 1, tbl)
        report.add('non_divisible.root_search_fails', 0.0 if isinstance(outcome, RootSearchFailure) else 1.0, tol)

    logger.info(f"主定理スイート {qg.name}: {'合格' if report.passed else '不合格'} ({len(report.checks)} 件)")
    return report
