"""有限次元 *-代数（構造定数表示）の基本演算と Wedderburn 分解"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from service.errors import ConditioningError, DecompositionError, DomainError, StructureError
from service.report import VerificationReport
from utils.config_manager import get_law_tolerance, get_wedderburn_attempts, get_wedderburn_seed

logger = logging.getLogger(__name__)

# 固有値クラスタの分割幅と、再試行を要求する最小ギャップ（最大固有値比）
_CLUSTER_SPLIT = 1e-6
_MIN_GAP = 1e-4


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    """構造定数で与えた有限次元 *-代数"""

    dim: int
    mul: np.ndarray
    unit: np.ndarray
    invol: np.ndarray

    def __post_init__(self):
        d = self.dim
        if d < 1:
            raise StructureError(f"次元は1以上が必要です: {d}")
        mul = np.asarray(self.mul, dtype=complex)
        unit = np.asarray(self.unit, dtype=complex)
        invol = np.asarray(self.invol, dtype=complex)
        if mul.shape != (d, d, d):
            raise StructureError(f"mul の形状が不正です: {mul.shape} (期待値 {(d, d, d)})")
        if unit.shape != (d,):
            raise StructureError(f"unit の形状が不正です: {unit.shape}")
        if invol.shape != (d, d):
            raise StructureError(f"invol の形状が不正です: {invol.shape}")
        object.__setattr__(self, 'mul', mul)
        object.__setattr__(self, 'unit', unit)
        object.__setattr__(self, 'invol', invol)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[i] = 1.0
        return e


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """⊕ M_{n_k} へのブロック分解（行列単位座標）"""

    sizes: tuple[int, ...]
    iso: np.ndarray
    iso_inv: np.ndarray

    @property
    def offsets(self) -> list[int]:
        offs = [0]
        for n in self.sizes:
            offs.append(offs[-1] + n * n)
        return offs

    def blocks_of(self, x: np.ndarray) -> list[np.ndarray]:
        """元 x の各ブロック行列"""
        flat = self.iso @ np.asarray(x, dtype=complex)
        offs = self.offsets
        return [flat[offs[k]:offs[k + 1]].reshape(n, n) for k, n in enumerate(self.sizes)]

    def element_from_blocks(self, mats: list[np.ndarray]) -> np.ndarray:
        flat = np.concatenate([np.asarray(m, dtype=complex).reshape(-1) for m in mats])
        return self.iso_inv @ flat

    def density_blocks(self, w: np.ndarray) -> list[np.ndarray]:
        """汎関数 w の密度ブロック D_k（w(x) = Σ Tr(D_k x_k)）"""
        flat = self.iso_inv.T @ np.asarray(w, dtype=complex)
        offs = self.offsets
        return [flat[offs[k]:offs[k + 1]].reshape(n, n).T for k, n in enumerate(self.sizes)]

    def covector_from_density(self, mats: list[np.ndarray]) -> np.ndarray:
        flat = np.concatenate([np.asarray(m, dtype=complex).T.reshape(-1) for m in mats])
        return self.iso.T @ flat

    def matrix_unit(self, k: int, i: int, j: int) -> np.ndarray:
        n = self.sizes[k]
        return self.iso_inv[:, self.offsets[k] + i * n + j].copy()


def multiply(pres: AlgebraPresentation, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum('i,j,ijk->k', x, y, pres.mul)


def adjoint(pres: AlgebraPresentation, x: np.ndarray) -> np.ndarray:
    return pres.invol @ np.conj(x)


def left_matrix(pres: AlgebraPresentation, x: np.ndarray) -> np.ndarray:
    """左正則表現 L_x（座標に作用）"""
    return np.einsum('i,ijk->kj', x, pres.mul)


def right_matrix(pres: AlgebraPresentation, x: np.ndarray) -> np.ndarray:
    return np.einsum('j,ijk->ki', x, pres.mul)


def trace_state(pres: AlgebraPresentation) -> np.ndarray:
    """正規化した左正則表現のトレース τ(x) = Tr(L_x)/d"""
    return np.einsum('ikk->i', pres.mul) / pres.dim


def gram_matrix(pres: AlgebraPresentation, w: np.ndarray) -> np.ndarray:
    """G[i, j] = w(e_i* e_j)"""
    t = np.einsum('pjk,k->pj', pres.mul, w)
    return pres.invol.T @ t


def verify_algebra(pres: AlgebraPresentation, tol: float | None = None) -> VerificationReport:
    """結合律・単位律・対合の法則を残差として検証"""
    if tol is None:
        tol = get_law_tolerance()
    c = pres.mul
    J = pres.invol
    report = VerificationReport('algebra')

    lhs = np.einsum('ijp,pkq->ijkq', c, c)
    rhs = np.einsum('jkp,ipq->ijkq', c, c)
    report.add('associativity', np.max(np.abs(lhs - rhs)), tol)

    eye = np.eye(pres.dim)
    left_unit = np.einsum('i,ijk->jk', pres.unit, c)
    right_unit = np.einsum('j,ijk->ik', pres.unit, c)
    report.add('left_unit', np.max(np.abs(left_unit - eye)), tol)
    report.add('right_unit', np.max(np.abs(right_unit - eye)), tol)

    report.add('involution_square', np.max(np.abs(J @ np.conj(J) - eye)), tol)
    # (e_i e_j)* = e_j* e_i*
    star_of_product = np.einsum('kp,ijp->ijk', J, np.conj(c))
    product_of_stars = np.einsum('pj,qi,pqk->ijk', J, J, c)
    report.add('involution_antimultiplicative', np.max(np.abs(star_of_product - product_of_stars)), tol)
    report.add('unit_self_adjoint', np.max(np.abs(adjoint(pres, pres.unit) - pres.unit)), tol)

    logger.debug(f"代数の検証: dim={pres.dim}, 最大残差={report.max_residual:.3e}")
    return report


def _clusters(values: np.ndarray) -> list[np.ndarray] | None:
    """昇順固有値を塊に分ける。塊の間隔が小さすぎる場合は None"""
    scale = max(1.0, float(np.max(np.abs(values))))
    groups: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        gap = values[i] - values[i - 1]
        if gap > _CLUSTER_SPLIT * scale:
            if gap < _MIN_GAP * scale:
                return None
            groups.append([i])
        else:
            groups[-1].append(i)
    return [np.array(g) for g in groups]


def _hermitian_sqrt(G: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    G = (G + G.conj().T) / 2
    w, V = np.linalg.eigh(G)
    if w[0] <= tol * max(1.0, w[-1]):
        raise DecompositionError(
            f"トレース内積が正定値ではありません（最小固有値 {w[0]:.3e}）: 半単純でない可能性があります"
        )
    R = (V * np.sqrt(w)) @ V.conj().T
    Rinv = (V / np.sqrt(w)) @ V.conj().T
    return R, Rinv


def _random_self_adjoint(pres: AlgebraPresentation, rng: np.random.Generator,
                         span: np.ndarray | None = None) -> np.ndarray:
    if span is None:
        x = rng.standard_normal(pres.dim) + 1j * rng.standard_normal(pres.dim)
    else:
        k = span.shape[1]
        x = span @ (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return (x + adjoint(pres, x)) / 2


def _split_center(pres, R, Rinv, rng):
    d = pres.dim
    c = pres.mul
    commutator = (c - np.transpose(c, (1, 0, 2))).transpose(1, 2, 0).reshape(d * d, d)
    center = null_space(commutator, rcond=1e-10)
    z = _random_self_adjoint(pres, rng, center)
    pz = R @ left_matrix(pres, z) @ Rinv
    pz = (pz + pz.conj().T) / 2
    w, V = np.linalg.eigh(pz)
    groups = _clusters(w)
    if groups is None:
        return None
    sizes = []
    ranges = []
    for g in groups:
        n = int(round(np.sqrt(len(g))))
        if n * n != len(g):
            return None
        sizes.append(n)
        ranges.append(V[:, g])
    return sizes, ranges


def _element_from_projector(pres, R, Rinv, P):
    return Rinv @ P @ R @ pres.unit


def _gns_sq_norm(pres, tau, x):
    return float(np.real(tau @ multiply(pres, adjoint(pres, x), x)))


def _block_units(pres, R, Rinv, tau, n, Vk, rng):
    """1つの単純成分の行列単位 e_ij（座標ベクトル）を作る"""
    qk = _element_from_projector(pres, R, Rinv, Vk @ Vk.conj().T)
    if n == 1:
        return [[qk]]
    a = _random_self_adjoint(pres, rng)
    ak = multiply(pres, multiply(pres, qk, a), qk)
    H = Vk.conj().T @ (R @ left_matrix(pres, ak) @ Rinv) @ Vk
    H = (H + H.conj().T) / 2
    w, W = np.linalg.eigh(H)
    groups = _clusters(w)
    if groups is None or len(groups) != n or any(len(g) != n for g in groups):
        return None
    projections = []
    for g in groups:
        U = Vk @ W[:, g]
        projections.append(_element_from_projector(pres, R, Rinv, U @ U.conj().T))

    p1 = projections[0]
    row = [p1]
    for j in range(1, n):
        pj = projections[j]
        # 基底元のうち p_1 e_m p_j のノルムが最大のものを選ぶ
        candidates = [multiply(pres, multiply(pres, p1, pres.basis(m)), pj) for m in range(pres.dim)]
        norms = [_gns_sq_norm(pres, tau, v) for v in candidates]
        v = candidates[int(np.argmax(norms))]
        scale = _gns_sq_norm(pres, tau, v) / float(np.real(tau @ pj))
        row.append(v / np.sqrt(scale))
    column = [adjoint(pres, e) for e in row]
    column[0] = p1
    return [[multiply(pres, column[i], row[j]) for j in range(n)] for i in range(n)]


def _canonical_keys(pres: AlgebraPresentation, structure: BlockStructure) -> list[tuple]:
    d = pres.dim
    idx = np.arange(d, dtype=float)
    samples = [d - idx, np.cos(idx + 1.0) + 1j * np.sin(2.0 * idx + 1.0)]
    keys = []
    for k, n in enumerate(structure.sizes):
        vec: list[float] = []
        for g in samples:
            tr = np.trace(structure.blocks_of(g)[k]) / n
            vec.extend([-round(float(tr.real), 8), -round(float(tr.imag), 8)])
        keys.append((n, tuple(vec)))
    return keys


def _canonicalize(pres: AlgebraPresentation, structure: BlockStructure) -> BlockStructure:
    keys = _canonical_keys(pres, structure)
    order = sorted(range(len(structure.sizes)), key=lambda k: keys[k])
    offs = structure.offsets
    columns = np.concatenate([np.arange(offs[k], offs[k + 1]) for k in order])
    M = structure.iso_inv[:, columns]
    return BlockStructure(tuple(structure.sizes[k] for k in order), np.linalg.inv(M), M)


def wedderburn(pres: AlgebraPresentation, tol: float | None = None) -> BlockStructure:
    """左正則表現と可換子のスペクトル射影による数値的 Wedderburn 分解"""
    if tol is None:
        tol = get_law_tolerance()
    if pres.dim == 1:
        u = pres.unit[0]
        return BlockStructure((1,), np.array([[1.0 / u]], dtype=complex), np.array([[u]], dtype=complex))

    tau = trace_state(pres)
    R, Rinv = _hermitian_sqrt(gram_matrix(pres, tau), tol)

    seed = get_wedderburn_seed()
    attempts = get_wedderburn_attempts()
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        split = _split_center(pres, R, Rinv, rng)
        if split is None:
            logger.warning(f"中心元の固有値ギャップが不足したため再試行します（試行 {attempt + 1}）")
            continue
        sizes, ranges = split
        units = []
        for n, Vk in zip(sizes, ranges):
            block = _block_units(pres, R, Rinv, tau, n, Vk, rng)
            if block is None:
                break
            units.append(block)
        if len(units) != len(sizes):
            logger.warning(f"単純成分内の固有値ギャップが不足したため再試行します（試行 {attempt + 1}）")
            continue
        M = np.column_stack([e for block in units for row in block for e in row])
        structure = BlockStructure(tuple(sizes), np.linalg.inv(M), M)
        structure = _canonicalize(pres, structure)
        logger.debug(f"Wedderburn分解: dim={pres.dim}, sizes={list(structure.sizes)}")
        return structure

    raise ConditioningError(f"{attempts} 回の試行でスペクトルが分離できませんでした")


def operator_norm(pres: AlgebraPresentation, blocks: BlockStructure, x: np.ndarray) -> float:
    return max(float(np.linalg.norm(b, 2)) for b in blocks.blocks_of(x))


def is_positive_element(pres: AlgebraPresentation, blocks: BlockStructure, x: np.ndarray,
                        tol: float | None = None) -> bool:
    if tol is None:
        tol = get_law_tolerance()
    x = np.asarray(x, dtype=complex)
    if np.max(np.abs(adjoint(pres, x) - x)) > tol * max(1.0, float(np.max(np.abs(x)))):
        raise DomainError("自己共役でない元の正値性は判定できません")
    for b in blocks.blocks_of(x):
        b = (b + b.conj().T) / 2
        if np.linalg.eigvalsh(b)[0] < -tol:
            return False
    return True


def tensor(a: AlgebraPresentation, b: AlgebraPresentation) -> AlgebraPresentation:
    """テンソル積代数（基底 e_i⊗f_k は i*d_B + k）"""
    da, db = a.dim, b.dim
    d = da * db
    mul = np.einsum('ijp,klq->ikjlpq', a.mul, b.mul).reshape(d, d, d)
    return AlgebraPresentation(d, mul, np.kron(a.unit, b.unit), np.kron(a.invol, b.invol))


def matrix_algebra(n: int) -> AlgebraPresentation:
    """行列単位 E_ij（添字 i*n + j）で表した M_n(C)"""
    d = n * n
    mul = np.zeros((d, d, d), dtype=complex)
    invol = np.zeros((d, d), dtype=complex)
    unit = np.zeros(d, dtype=complex)
    for i in range(n):
        unit[i * n + i] = 1.0
        for j in range(n):
            invol[j * n + i, i * n + j] = 1.0
            for k in range(n):
                mul[i * n + j, j * n + k, i * n + k] = 1.0
    return AlgebraPresentation(d, mul, unit, invol)


def commutative_algebra(d: int) -> AlgebraPresentation:
    """C^d（各点積、複素共役）"""
    mul = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        mul[i, i, i] = 1.0
    return AlgebraPresentation(d, mul, np.ones(d, dtype=complex), np.eye(d, dtype=complex))


def direct_sum(a: AlgebraPresentation, b: AlgebraPresentation) -> AlgebraPresentation:
    da, db = a.dim, b.dim
    d = da + db
    mul = np.zeros((d, d, d), dtype=complex)
    mul[:da, :da, :da] = a.mul
    mul[da:, da:, da:] = b.mul
    invol = np.zeros((d, d), dtype=complex)
    invol[:da, :da] = a.invol
    invol[da:, da:] = b.invol
    return AlgebraPresentation(d, mul, np.concatenate([a.unit, b.unit]), invol)
