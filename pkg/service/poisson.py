"""Poisson 型の汎関数: exp_φ / log_φ、双不変性、条件付き正定値性、u = r(v−φ) 分解、畳み込み半群"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from service.algebra_core import gram_matrix
from service.dual_functionals import (
    Functional,
    convolve,
    functional_norm,
    is_hermitian,
    is_state,
    min_density_eigenvalue,
)
from service.errors import DomainError, InternalAssertionError, RadiusError
from service.hypergroup import Hypergroup, build_hypergroup_from_idempotent, restrict_functional
from service.idempotent import is_idempotent_state
from service.report import VerificationReport
from utils.config_manager import (
    get_bisection_iterations,
    get_gram_rank_cut,
    get_law_tolerance,
    get_psd_threshold,
    get_series_tolerance,
)

logger = logging.getLogger(__name__)

_SCALED_NORM = 0.5


@dataclass(frozen=True, eq=False)
class PoissonDecomposition:
    """u = rate · (jump − phi)"""

    phi: Functional
    rate: float
    jump: Functional

    @property
    def generator(self) -> Functional:
        return (self.jump - self.phi) * self.rate

    def to_dict(self) -> dict:
        return {
            'phi': [[float(z.real), float(z.imag)] for z in self.phi.covec],
            'rate': self.rate,
            'jump': [[float(z.real), float(z.imag)] for z in self.jump.covec],
        }


def is_bi_invariant(qg, phi: Functional, u: Functional, tol: float | None = None) -> bool:
    """u⋆φ = φ⋆u = u"""
    if tol is None:
        tol = get_law_tolerance()
    return (functional_norm(qg, convolve(qg, u, phi) - u) <= tol
            and functional_norm(qg, convolve(qg, phi, u) - u) <= tol)


def _require_bi_invariant(qg, phi: Functional, u: Functional, tol: float) -> None:
    if not is_bi_invariant(qg, phi, u, tol):
        raise DomainError("汎関数が φ-双不変ではありません")


def restrict_to_Aphi(qg, phi: Functional, u: Functional, H: Hypergroup | None = None) -> Functional:
    """u|_{A_φ} を A_φ の基底で表す"""
    if H is None:
        H = build_hypergroup_from_idempotent(qg, phi)
    return restrict_functional(H, u)


def _squarings(norm: float) -> int:
    """norm / 2^k ≤ 1/2 となる最小の k"""
    if norm <= _SCALED_NORM:
        return 0
    return math.ceil(math.log2(norm / _SCALED_NORM))


def _repeated_square(qg, x: Functional, k: int) -> Functional:
    for _ in range(k):
        x = convolve(qg, x, x)
    return x


def exp_phi(qg, phi: Functional, u: Functional, tol: float | None = None) -> Functional:
    """exp_φ(u) = φ + Σ_{n≥1} u^{⋆n}/n!（u/2^k で級数を取り k 回二乗する）"""
    if tol is None:
        tol = get_series_tolerance()
    _require_bi_invariant(qg, phi, u, get_law_tolerance())
    norm = functional_norm(qg, u)
    if norm == 0.0:
        return phi
    k = _squarings(norm)
    scaled = u / 2 ** k
    s = norm / 2 ** k
    tail_tol = tol / 2 ** k
    total = phi
    power = scaled
    coefficient = 1.0
    n = 1
    while True:
        coefficient /= n
        total = total + power * coefficient
        # 残りの項は s^{n+1}/(n+1)!·e^s 以下
        if coefficient * s ** (n + 1) / (n + 1) * math.exp(s) < tail_tol:
            break
        power = convolve(qg, power, scaled)
        n += 1
    logger.debug(f"exp_φ: ‖u‖={norm:.4f}, 二乗={k}, 項数={n}")
    return _repeated_square(qg, total, k)


def log_phi(qg, phi: Functional, u: Functional, tol: float | None = None) -> Functional:
    """log_φ(u) = −Σ_{k≥1} (φ−u)^{⋆k}/k（‖u−φ‖ < 1）"""
    if tol is None:
        tol = get_series_tolerance()
    _require_bi_invariant(qg, phi, u, get_law_tolerance())
    gap = phi - u
    radius = functional_norm(qg, gap)
    if radius >= 1.0:
        raise RadiusError(f"log_φ の収束半径外です: ‖u−φ‖ = {radius:.6f}")
    if radius == 0.0:
        return Functional.zeros(qg.dim)
    terms = 1
    while radius ** terms / (terms * (1.0 - radius)) >= tol:
        terms += 1
    total = Functional.zeros(qg.dim)
    power = gap
    for k in range(1, terms):
        total = total - power / k
        power = convolve(qg, power, gap)
    logger.debug(f"log_φ: ‖u−φ‖={radius:.4f}, 項数={terms}")
    return total


def null_ideal_basis(qg, phi: Functional, cut: float | None = None) -> np.ndarray:
    """{x : φ(x*x) = 0} の基底（列）"""
    if cut is None:
        cut = get_gram_rank_cut()
    G = gram_matrix(qg.algebra, phi.covec)
    w, V = np.linalg.eigh((G + G.conj().T) / 2)
    scale = max(float(np.max(np.abs(w))), 1.0)
    return V[:, w < cut * scale]


def is_conditionally_positive(qg, phi: Functional, u: Functional, tol: float | None = None) -> bool:
    """φ(x*x) = 0 なる全ての x で u(x*x) ≥ 0"""
    if tol is None:
        tol = get_law_tolerance()
    if not is_hermitian(qg, u, tol):
        raise DomainError("条件付き正定値性の判定にはエルミートな汎関数が必要です")
    Y = null_ideal_basis(qg, phi)
    if Y.shape[1] == 0:
        return True
    Gu = gram_matrix(qg.algebra, u.covec)
    M = Y.conj().T @ Gu @ Y
    return bool(np.linalg.eigvalsh((M + M.conj().T) / 2)[0] >= -tol)


def _in_generator_class(qg, phi: Functional, u: Functional, tol: float) -> bool:
    return (abs(u(qg.algebra.unit)) < tol and is_bi_invariant(qg, phi, u, tol)
            and is_hermitian(qg, u, tol) and is_conditionally_positive(qg, phi, u, tol))


def levy_decompose(qg, phi: Functional, u: Functional, tol: float | None = None) -> PoissonDecomposition:
    """u = r(v−φ) を r 最小（φ + t·u が正値な最大の t の逆数）で求める"""
    if tol is None:
        tol = get_law_tolerance()
    if not is_idempotent_state(qg, phi, tol):
        raise DomainError("φ が冪等状態ではありません")
    if not _in_generator_class(qg, phi, u, tol):
        raise DomainError("u(1) = 0・双不変性・条件付き正定値性のいずれかを満たしません")
    norm = functional_norm(qg, u)
    if norm < tol:
        return PoissonDecomposition(phi, 0.0, phi)

    slack = -get_psd_threshold()

    def feasible(t: float) -> bool:
        return min_density_eigenvalue(qg, phi + u * t) >= slack

    hi = 2.0 * functional_norm(qg, phi) / norm
    if feasible(2.0 * hi):
        raise InternalAssertionError("φ + t·u が全ての t で正値になりました")
    if feasible(hi):
        lo = hi
    else:
        lo = 0.0
        for _ in range(get_bisection_iterations()):
            mid = (lo + hi) / 2
            if feasible(mid):
                lo = mid
            else:
                hi = mid
    if lo <= 0.0:
        raise InternalAssertionError("正値となる t > 0 が見つかりませんでした")

    jump = phi + u * lo
    if not is_state(qg, jump, get_psd_threshold() + tol) or not is_bi_invariant(qg, phi, jump, tol):
        raise InternalAssertionError("分解で得た v が φ-双不変な状態になりませんでした")
    result = PoissonDecomposition(phi, 1.0 / lo, jump)
    logger.info(f"Lévy 型分解: r={result.rate:.6f}")
    return result


def poisson_series(qg, phi: Functional, rate: float, jump: Functional, tol: float | None = None) -> Functional:
    """e^{−r} Σ_{k≥0} r^k v^{⋆k}/k!（v^{⋆0} = φ）。r/2^m の級数を m 回二乗する"""
    if tol is None:
        tol = get_series_tolerance()
    if rate < 0:
        raise DomainError(f"r は 0 以上が必要です: {rate}")
    m = _squarings(rate)
    rho = rate / 2 ** m
    tail_tol = tol / 2 ** m
    total = phi
    power = phi
    weight = 1.0
    k = 0
    while weight * rho / (k + 1) * math.exp(rho) >= tail_tol:
        k += 1
        weight *= rho / k
        power = convolve(qg, power, jump)
        total = total + power * weight
    return _repeated_square(qg, total * math.exp(-rho), m)


def semigroup_state(qg, phi: Functional, u: Functional, t: float, tol: float | None = None) -> Functional:
    """ω_t = exp_φ(t·u)"""
    if tol is None:
        tol = get_law_tolerance()
    if t < 0:
        raise DomainError(f"t は 0 以上が必要です: {t}")
    if not _in_generator_class(qg, phi, u, tol):
        raise DomainError("u が Poisson 生成元の条件を満たしません")
    return exp_phi(qg, phi, u * t)


def check_exp_log_calculus(qg, phi: Functional, w1: Functional, w2: Functional,
                           tol: float | None = None) -> VerificationReport:
    """exp_φ と log_φ の逆関係、可換なときの準同型性と加法性"""
    if tol is None:
        tol = get_law_tolerance()
    report = VerificationReport('exp_log_calculus')
    e1 = exp_phi(qg, phi, w1)
    e2 = exp_phi(qg, phi, w2)
    if functional_norm(qg, w1) < math.log(2.0):
        report.add('log_of_exp', functional_norm(qg, log_phi(qg, phi, e1) - w1), tol)
    if functional_norm(qg, e1 - phi) < 1.0:
        report.add('exp_of_log', functional_norm(qg, exp_phi(qg, phi, log_phi(qg, phi, e1)) - e1), tol)

    commutator = functional_norm(qg, convolve(qg, w1, w2) - convolve(qg, w2, w1))
    if commutator > tol:
        logger.debug(f"w1, w2 が可換でないため準同型性の検査を省略します: {commutator:.3e}")
        return report
    product = convolve(qg, e1, e2)
    report.add('exp_homomorphism', functional_norm(qg, product - exp_phi(qg, phi, w1 + w2)), tol)
    if max(functional_norm(qg, e - phi) for e in (e1, e2, product)) < 1.0:
        additive = log_phi(qg, phi, product) - log_phi(qg, phi, e1) - log_phi(qg, phi, e2)
        report.add('log_additivity', functional_norm(qg, additive), tol)
    return report


def check_norm_additivity(qg, phi: Functional, u: Functional, w: Functional,
                          tol: float | None = None) -> VerificationReport:
    """u, w が生成元のとき ‖u+w‖ = ‖u‖ + ‖w‖"""
    if tol is None:
        tol = get_law_tolerance()
    law = get_law_tolerance()
    for g in (u, w):
        if not _in_generator_class(qg, phi, g, law):
            raise DomainError("ノルム加法性の検査には Poisson 生成元が必要です")
    report = VerificationReport('norm_additivity')
    gap = functional_norm(qg, u + w) - functional_norm(qg, u) - functional_norm(qg, w)
    report.add('norm_additivity', abs(gap), tol)
    return report


def check_power_log_control(qg, phi: Functional, u: Functional, n: int,
                            tol: float | None = None) -> VerificationReport:
    """‖u−φ‖ < 1/2 かつ ‖u^{⋆n}−φ‖ < 1/2 の状態で、1 ≤ k ≤ n の全ての冪が 1/2 以内にあり log_φ(u^{⋆k}) = k·log_φ(u)"""
    if tol is None:
        tol = get_law_tolerance()
    if not is_state(qg, u, tol) or not is_bi_invariant(qg, phi, u, tol):
        raise DomainError("φ-双不変な状態が必要です")
    powers = [u]
    for _ in range(1, n):
        powers.append(convolve(qg, powers[-1], u))
    if functional_norm(qg, u - phi) >= 0.5 or functional_norm(qg, powers[-1] - phi) >= 0.5:
        raise DomainError("‖u−φ‖ < 1/2 と ‖u^{⋆n}−φ‖ < 1/2 が必要です")
    base = log_phi(qg, phi, u)
    report = VerificationReport('power_log_control')
    worst_distance = max(functional_norm(qg, p - phi) for p in powers)
    report.add('intermediate_powers', max(0.0, worst_distance - 0.5), tol, max_distance=worst_distance)
    worst_log = max(functional_norm(qg, log_phi(qg, phi, p) - base * k) for k, p in enumerate(powers, start=1))
    report.add('log_of_powers', worst_log, tol)
    return report
