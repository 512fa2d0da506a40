"""乗積表による有限群と部分群・両側剰余類の列挙"""
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from service.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """乗積表で与えた有限群（table[g, h] = gh の添字）"""

    name: str
    table: np.ndarray
    identity: int
    inverses: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def multiply(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def element_order(self, g: int) -> int:
        x, n = g, 1
        while x != self.identity:
            x = self.multiply(x, g)
            n += 1
        return n


def group_from_table(table, name: str = 'G') -> FiniteGroup:
    """乗積表を検証して群を構築（結合律・単位元・逆元）"""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise DomainError(f"乗積表は空でない正方行列である必要があります: shape={t.shape}")
    n = t.shape[0]
    if not np.issubdtype(t.dtype, np.integer) or t.min() < 0 or t.max() >= n:
        raise DomainError("乗積表の要素は 0..n-1 の整数である必要があります")
    t = t.astype(int)
    for row in t:
        if len(set(row.tolist())) != n:
            raise DomainError("乗積表の行が置換になっていません")

    # (gh)k = g(hk)
    left = t[t[:, :, None], np.arange(n)[None, None, :]]
    right = t[np.arange(n)[:, None, None], t[None, :, :]]
    if not np.array_equal(left, right):
        raise DomainError("乗積表が結合律を満たしません")

    identities = [e for e in range(n) if np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n))]
    if not identities:
        raise DomainError("単位元が存在しません")
    e = identities[0]
    inverses = []
    for g in range(n):
        inv = [h for h in range(n) if t[g, h] == e and t[h, g] == e]
        if not inv:
            raise DomainError(f"元 {g} の逆元が存在しません")
        inverses.append(inv[0])
    return FiniteGroup(name, t, e, tuple(inverses))


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return group_from_table((idx[:, None] + idx[None, :]) % n, f'Z{n}')


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """(g1, g2) の添字は g1 * |B| + g2"""
    nb = b.order
    n = a.order * nb
    table = np.zeros((n, n), dtype=int)
    for x in range(n):
        for y in range(n):
            table[x, y] = a.table[x // nb, y // nb] * nb + b.table[x % nb, y % nb]
    return group_from_table(table, f'{a.name}x{b.name}')


def klein_four() -> FiniteGroup:
    return direct_product(cyclic_group(2), cyclic_group(2))


def permutation_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    """置換のリストから群を作る（合成は (gh)(x) = g(h(x))）"""
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.zeros((n, n), dtype=int)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            table[i, j] = index[tuple(g[h[x]] for x in range(len(h)))]
    return group_from_table(table, name)


def symmetric_group(k: int = 3) -> FiniteGroup:
    return permutation_group(list(itertools.permutations(range(k))), f'S{k}')


def subgroups(group: FiniteGroup) -> list[frozenset[int]]:
    """全部分群（位数、要素の辞書順）"""
    found: set[frozenset[int]] = set()
    for size in range(1, group.order + 1):
        if group.order % size:
            continue
        for subset in itertools.combinations(range(group.order), size):
            if group.identity not in subset:
                continue
            s = set(subset)
            if all(group.multiply(g, h) in s for g in subset for h in subset):
                found.add(frozenset(subset))
    result = sorted(found, key=lambda s: (len(s), sorted(s)))
    logger.debug(f"{group.name} の部分群数: {len(result)}")
    return result


def double_coset_count(group: FiniteGroup, sub: frozenset[int]) -> int:
    """両側剰余類 HgH の個数"""
    seen: set[int] = set()
    count = 0
    for g in range(group.order):
        if g in seen:
            continue
        count += 1
        for h1 in sub:
            for h2 in sub:
                seen.add(group.multiply(group.multiply(h1, g), h2))
    return count
