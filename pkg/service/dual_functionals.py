"""汎関数の畳み込み Banach *-代数、Fourier 変換、双対量子群"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from service.errors import StructureError
from service.quantum_group import QuantumGroup, IrrepTable, dual_presentation, irreps
from service.report import VerificationReport
from utils.config_manager import get_law_tolerance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Functional:
    """A 上の線形汎関数 φ(x) = covec · coords(x)"""

    covec: np.ndarray

    def __post_init__(self):
        covec = np.asarray(self.covec, dtype=complex)
        if covec.ndim != 1:
            raise StructureError(f"汎関数は1次元配列である必要があります: shape={covec.shape}")
        object.__setattr__(self, 'covec', covec)

    @classmethod
    def zeros(cls, d: int) -> 'Functional':
        return cls(np.zeros(d, dtype=complex))

    @property
    def dim(self) -> int:
        return self.covec.shape[0]

    def __call__(self, x: np.ndarray) -> complex:
        return complex(self.covec @ x)

    def __add__(self, other: 'Functional') -> 'Functional':
        return Functional(self.covec + other.covec)

    def __sub__(self, other: 'Functional') -> 'Functional':
        return Functional(self.covec - other.covec)

    def __neg__(self) -> 'Functional':
        return Functional(-self.covec)

    def __mul__(self, scalar: complex) -> 'Functional':
        return Functional(self.covec * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> 'Functional':
        return Functional(self.covec / scalar)

    def distance(self, other: 'Functional') -> float:
        """座標の最大差（ノルム計算を伴わない比較用）"""
        return float(np.max(np.abs(self.covec - other.covec)))


@dataclass(frozen=True, eq=False)
class FourierImage:
    """φ̂(α) の並び"""

    blocks_img: tuple[np.ndarray, ...]

    def max_block_norm(self) -> float:
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks_img)


def _check_dim(qg, *phis: Functional) -> None:
    for phi in phis:
        if phi.dim != qg.dim:
            raise StructureError(f"汎関数の長さ {phi.dim} が代数の次元 {qg.dim} と一致しません")


def counit_functional(qg) -> Functional:
    return Functional(qg.counit.copy())


def haar_functional(qg) -> Functional:
    return Functional(qg.haar.copy())


def convolve(qg, phi1: Functional, phi2: Functional) -> Functional:
    """(φ1⋆φ2)(x) = (φ1⊗φ2)Δ(x)"""
    _check_dim(qg, phi1, phi2)
    return Functional(np.kron(phi1.covec, phi2.covec) @ qg.comul)


def convolution_power(qg, phi: Functional, n: int) -> Functional:
    """φ^{⋆n}（n ≥ 1、二乗の繰り返し）"""
    if n < 1:
        raise ValueError(f"冪指数は1以上が必要です: {n}")
    result: Functional | None = None
    base = phi
    while n:
        if n & 1:
            result = base if result is None else convolve(qg, result, base)
        n >>= 1
        if n:
            base = convolve(qg, base, base)
    assert result is not None
    return result


def star(qg, phi: Functional) -> Functional:
    """φ*(x) = conj(φ(S(x)*))"""
    _check_dim(qg, phi)
    J = qg.algebra.invol
    return Functional((np.conj(J) @ qg.antipode).T @ np.conj(phi.covec))


def hermitian_conjugate(qg, phi: Functional) -> Functional:
    """φ^H(x) = conj(φ(x*))"""
    return Functional(np.conj(qg.algebra.invol.T @ phi.covec))


def hermitian_part(qg, phi: Functional) -> Functional:
    return (phi + hermitian_conjugate(qg, phi)) / 2


def is_hermitian(qg, phi: Functional, tol: float | None = None) -> bool:
    if tol is None:
        tol = get_law_tolerance()
    return phi.distance(hermitian_conjugate(qg, phi)) <= tol


def functional_norm(qg, phi: Functional) -> float:
    """密度ブロックのトレースノルムの和（双対 C*-ノルム）"""
    _check_dim(qg, phi)
    return float(sum(np.linalg.norm(b, 'nuc') for b in qg.blocks.density_blocks(phi.covec)))


def functional_sup_norm(qg, phi: Functional, starts: int = 8, seed: int = 0) -> float:
    """sup{|φ(x)| : ‖x‖ ≤ 1} をユニタリ元上の最大化で直接求める（検証用）"""
    blocks = qg.blocks
    sizes = blocks.sizes
    params = sum(n * n for n in sizes)
    rng = np.random.default_rng(seed)

    def unitary_element(theta: np.ndarray) -> np.ndarray:
        mats = []
        pos = 0
        for n in sizes:
            raw = theta[pos:pos + n * n].reshape(n, n)
            pos += n * n
            herm = np.triu(raw) + np.triu(raw, 1).T + 1j * (np.tril(raw, -1) - np.tril(raw, -1).T)
            mats.append(expm(1j * herm))
        return blocks.element_from_blocks(mats)

    def objective(theta: np.ndarray) -> float:
        return -float(np.real(phi.covec @ unitary_element(theta)))

    best = 0.0
    for _ in range(starts):
        result = minimize(objective, rng.uniform(-np.pi, np.pi, params), method='BFGS')
        best = max(best, -float(result.fun))
    return best


def is_positive_functional(qg, phi: Functional, tol: float | None = None) -> bool:
    if tol is None:
        tol = get_law_tolerance()
    _check_dim(qg, phi)
    for b in qg.blocks.density_blocks(phi.covec):
        if np.max(np.abs(b - b.conj().T)) > tol:
            return False
        if np.linalg.eigvalsh((b + b.conj().T) / 2)[0] < -tol:
            return False
    return True


def is_state(qg, phi: Functional, tol: float | None = None) -> bool:
    if tol is None:
        tol = get_law_tolerance()
    return is_positive_functional(qg, phi, tol) and abs(phi(qg.algebra.unit) - 1.0) < tol


def min_density_eigenvalue(qg, phi: Functional) -> float:
    return min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in qg.blocks.density_blocks(phi.covec))


def jordan_split(qg, phi: Functional, tol: float | None = None) -> tuple[Functional, Functional] | None:
    """各ブロックが半正定値か半負定値のときだけ φ = φ₊ − φ₋ に分ける。条件外は None"""
    if tol is None:
        tol = get_law_tolerance()
    plus, minus = [], []
    for b in qg.blocks.density_blocks(phi.covec):
        if np.max(np.abs(b - b.conj().T)) > tol:
            return None
        w = np.linalg.eigvalsh((b + b.conj().T) / 2)
        zero = np.zeros_like(b)
        if w[0] >= -tol:
            plus.append(b)
            minus.append(zero)
        elif w[-1] <= tol:
            plus.append(zero)
            minus.append(-b)
        else:
            logger.debug("不定符号のブロックがあるため Jordan 分解を行いません")
            return None
    to_covec = qg.blocks.covector_from_density
    return Functional(to_covec(plus)), Functional(to_covec(minus))


def fourier(qg, tbl: IrrepTable, phi: Functional) -> FourierImage:
    """φ̂(α)_ij = φ(u^α_ij)"""
    _check_dim(qg, phi)
    return FourierImage(tuple(np.einsum('ijk,k->ij', c, phi.covec) for c in tbl.coeffs))


def inverse_fourier(qg, tbl: IrrepTable, img: FourierImage) -> Functional:
    flat = np.concatenate([np.asarray(b, dtype=complex).reshape(-1) for b in img.blocks_img])
    return Functional(np.linalg.solve(tbl.coefficient_matrix, flat))


def dual_haar(tbl: IrrepTable) -> np.ndarray:
    """ĥ(φ) = Σ n_α Tr φ̂(α) / Σ n_α²（双対側の座標）"""
    total = sum(n * n for n in tbl.sizes)
    coords = sum(n * np.trace(c) for n, c in zip(tbl.sizes, tbl.coeffs))
    return np.asarray(coords, dtype=complex) / total


def dual_quantum_group(qg: QuantumGroup, tbl: IrrepTable | None = None) -> QuantumGroup:
    """A* 上の双対量子群（積は畳み込み、単位は ε）"""
    if tbl is None:
        tbl = irreps(qg)
    d = qg.dim
    pres = dual_presentation(qg.algebra, qg.comul, qg.counit, qg.antipode)
    comul = qg.algebra.mul.reshape(d * d, d)
    dual = QuantumGroup(pres, tbl.dual_blocks, comul, qg.algebra.unit.copy(), qg.antipode.T.copy(),
                        dual_haar(tbl), f'dual({qg.name})')
    logger.info(f"双対量子群 {dual.name} を構築しました: blocks={list(dual.blocks.sizes)}")
    return dual


def structure_residuals(first, second, transport: np.ndarray | None = None,
                        tol: float | None = None) -> VerificationReport:
    """線形写像 T による構造テンソルの一致を残差で報告（量子群・超群の同型判定）"""
    if tol is None:
        tol = get_law_tolerance()
    report = VerificationReport('isomorphism')
    if first.dim != second.dim:
        report.add('dimension', float('inf'), tol, dims=(first.dim, second.dim))
        return report
    d = first.dim
    T = np.eye(d, dtype=complex) if transport is None else np.asarray(transport, dtype=complex)
    a1, a2 = first.algebra, second.algebra

    same_sizes = sorted(first.blocks.sizes) == sorted(second.blocks.sizes)
    report.add('block_sizes', 0.0 if same_sizes else float('inf'), tol,
               sizes=(list(first.blocks.sizes), list(second.blocks.sizes)))
    lhs = np.einsum('ijk,lk->ijl', a1.mul, T)
    rhs = np.einsum('ai,bj,abl->ijl', T, T, a2.mul)
    report.add('multiplication', np.max(np.abs(lhs - rhs)), tol)
    report.add('unit', np.max(np.abs(T @ a1.unit - a2.unit)), tol)
    report.add('involution', np.max(np.abs(T @ a1.invol - a2.invol @ np.conj(T))), tol)
    report.add('comultiplication', np.max(np.abs(np.kron(T, T) @ first.comul - second.comul @ T)), tol)
    report.add('counit', np.max(np.abs(first.counit - second.counit @ T)), tol)
    report.add('antipode', np.max(np.abs(T @ first.antipode - second.antipode @ T)), tol)
    report.add('haar', np.max(np.abs(first.haar - second.haar @ T)), tol)
    return report
