"""JSON 入出力（"schema": "fqg/1"、複素数は [re, im]、添字は0始まり）"""
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from service.algebra_core import AlgebraPresentation
from service.dual_functionals import Functional
from service.errors import FqgError
from service.finite_groups import group_from_table
from service.quantum_group import QuantumGroup, function_algebra, group_algebra, quantum_group_from_parts

logger = logging.getLogger(__name__)

SCHEMA = 'fqg/1'


class PresentationFormatError(FqgError):
    """入力 JSON の不備。field に問題のあるフィールドを持つ"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _complex(value: Any, field: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise PresentationFormatError(field, f"複素数は [re, im] で指定してください: {value!r}")


def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_vector(v: np.ndarray) -> list[list[float]]:
    return [encode_complex(z) for z in v]


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [encode_vector(row) for row in m]


def encode_sparse(t: np.ndarray, cut: float = 1e-14) -> list[list[float]]:
    """非零成分を [添字..., re, im] の並びに"""
    return [[*map(int, idx), float(z.real), float(z.imag)] for idx, z in np.ndenumerate(t) if abs(z) > cut]


def _vector(data: dict, key: str, d: int) -> np.ndarray:
    raw = _require(data, key)
    if not isinstance(raw, list) or len(raw) != d:
        raise PresentationFormatError(key, f"長さ {d} の配列が必要です")
    return np.array([_complex(z, f"{key}[{i}]") for i, z in enumerate(raw)], dtype=complex)


def _matrix(data: dict, key: str, rows: int, cols: int) -> np.ndarray:
    raw = _require(data, key)
    if not isinstance(raw, list) or len(raw) != rows:
        raise PresentationFormatError(key, f"{rows}×{cols} の行列が必要です")
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise PresentationFormatError(f"{key}[{i}]", f"長さ {cols} の行が必要です")
        for j, z in enumerate(row):
            out[i, j] = _complex(z, f"{key}[{i}][{j}]")
    return out


def _sparse(data: dict, key: str, shape: tuple[int, ...]) -> np.ndarray:
    raw = _require(data, key)
    if not isinstance(raw, list):
        raise PresentationFormatError(key, "疎表現のリストが必要です")
    out = np.zeros(shape, dtype=complex)
    rank = len(shape)
    for n, entry in enumerate(raw):
        field = f"{key}[{n}]"
        if not isinstance(entry, list) or len(entry) != rank + 2:
            raise PresentationFormatError(field, f"[添字×{rank}, re, im] が必要です")
        idx = entry[:rank]
        if not all(isinstance(i, int) and 0 <= i < s for i, s in zip(idx, shape)):
            raise PresentationFormatError(field, f"添字が範囲外です: {idx}")
        out[tuple(idx)] += _complex(entry[rank:], field)
    return out


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise PresentationFormatError(key, "必須フィールドがありません")
    return data[key]


def _dimension(data: dict) -> int:
    d = _require(data, 'dim')
    if not isinstance(d, int) or d < 1:
        raise PresentationFormatError('dim', f"正の整数が必要です: {d!r}")
    return d


def presentation_to_dict(pres: AlgebraPresentation) -> dict:
    return {
        'schema': SCHEMA,
        'kind': 'presentation',
        'dim': pres.dim,
        'mul': encode_sparse(pres.mul),
        'unit': encode_vector(pres.unit),
        'invol': encode_matrix(pres.invol),
    }


def presentation_from_dict(data: dict) -> AlgebraPresentation:
    d = _dimension(data)
    return AlgebraPresentation(d, _sparse(data, 'mul', (d, d, d)), _vector(data, 'unit', d),
                               _matrix(data, 'invol', d, d))


def quantum_group_to_dict(qg) -> dict:
    """量子群・超群とも同じ形式。超群は kappa と kind を持つ"""
    out = presentation_to_dict(qg.algebra)
    out.update({
        'kind': 'hypergroup' if hasattr(qg, 'kappa') else 'quantum_group',
        'name': qg.name,
        'comul': [[r // qg.dim, r % qg.dim, c, re, im] for r, c, re, im in encode_sparse(qg.comul)],
        'counit': encode_vector(qg.counit),
        'haar': encode_vector(qg.haar),
    })
    key = 'kappa' if hasattr(qg, 'kappa') else 'antipode'
    out[key] = encode_matrix(qg.antipode)
    return out


def _group_from_dict(data: dict) -> QuantumGroup:
    table = _require(data, 'table')
    try:
        group = group_from_table(np.asarray(table), str(data.get('name', 'G')))
    except (FqgError, ValueError) as e:
        raise PresentationFormatError('table', str(e)) from e
    flavour = data.get('algebra', 'c')
    if flavour == 'c':
        return function_algebra(group)
    if flavour == 'g':
        return group_algebra(group)
    raise PresentationFormatError('algebra', f"'c' か 'g' を指定してください: {flavour!r}")


def quantum_group_from_dict(data: dict) -> QuantumGroup:
    if not isinstance(data, dict):
        raise PresentationFormatError('$', "JSON オブジェクトが必要です")
    schema = data.get('schema', SCHEMA)
    if schema != SCHEMA:
        raise PresentationFormatError('schema', f"未対応のスキーマです: {schema!r}")
    if data.get('kind') == 'group':
        return _group_from_dict(data)
    algebra = presentation_from_dict(data)
    d = algebra.dim
    comul = _sparse(data, 'comul', (d, d, d)).reshape(d * d, d)
    counit = _vector(data, 'counit', d)
    antipode = _matrix(data, 'antipode', d, d)
    haar = _vector(data, 'haar', d) if 'haar' in data else None
    qg = quantum_group_from_parts(algebra, comul, counit, antipode, haar, str(data.get('name', '')))
    logger.info(f"量子群を読み込みました: {qg.name or '(無名)'}, dim={d}")
    return qg


def functional_to_dict(phi: Functional) -> dict:
    return {'schema': SCHEMA, 'kind': 'functional', 'covec': encode_vector(phi.covec)}


def functional_from_data(data: Any, d: int) -> Functional:
    """{"covec": [...]} か、素の [[re, im], ...] 配列"""
    if isinstance(data, list):
        data = {'covec': data}
    if not isinstance(data, dict):
        raise PresentationFormatError('covec', "汎関数の係数配列が必要です")
    return Functional(_vector(data, 'covec', d))


def decomposition_to_dict(dec) -> dict:
    out = {'schema': SCHEMA, 'kind': 'poisson_decomposition'}
    out.update(dec.to_dict())
    return out


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise PresentationFormatError(str(path), "ファイルが見つかりません") from e
    except json.JSONDecodeError as e:
        raise PresentationFormatError(str(path), f"JSON の構文エラー（{e.lineno} 行 {e.colno} 列）") from e


def load_quantum_group(path: str | Path) -> QuantumGroup:
    return quantum_group_from_dict(read_json(path))


def load_functional(path: str | Path, d: int) -> Functional:
    return functional_from_data(read_json(path), d)


def dumps(payload: dict) -> str:
    """決定的な出力（キー順固定）"""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
