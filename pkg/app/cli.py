"""コマンドラインの入口: 量子群を読み込み、検証・構成・分解を実行してレポートを出力する"""
import argparse
import logging
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, TextIO

import numpy as np

from app import __version__
from service.divisibility import (
    RootSearchFailure,
    capture_and_extract,
    main_theorem_suite,
    root_chain_search,
    second_proof_diagnostics,
)
from service.dual_functionals import Functional, counit_functional, functional_norm, is_state
from service.errors import ChainRejectedError, FqgError
from service.finite_groups import cyclic_group, klein_four, symmetric_group
from service.hypergroup import (
    build_hypergroup_from_idempotent,
    hypergroup_irreps,
    verify_duality_theorem,
    verify_hypergroup,
    verify_peter_weyl,
)
from service.idempotent import (
    check_idempotent_properties,
    enumerate_idempotents_bruteforce,
    support_idempotent,
)
from service.poisson import exp_phi, levy_decompose, poisson_series
from service.presentation_io import (
    SCHEMA,
    PresentationFormatError,
    decomposition_to_dict,
    dumps,
    encode_vector,
    load_functional,
    load_quantum_group,
)
from service.quantum_group import (
    QuantumGroup,
    check_orthogonality,
    function_algebra,
    group_algebra,
    irreps,
    verify_cqg,
    verify_irrep_table,
)
from service.report import VerificationReport
from utils.config_manager import get_law_tolerance

logger = logging.getLogger(__name__)

COMMANDS = ('verify', 'irreps', 'idempotents', 'hypergroup', 'duality', 'poisson-decompose',
            'divisible-check', 'suite')

_GROUPS = {
    'Z2': lambda: cyclic_group(2),
    'Z3': lambda: cyclic_group(3),
    'Z4': lambda: cyclic_group(4),
    'Z2xZ2': klein_four,
    'S3': lambda: symmetric_group(3),
}

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    builtin_name: str | None = None
    tol: float | None = None
    output: str = 'table'
    seed: int | None = None
    functional_path: str | None = None
    phi_path: str | None = None
    index: int | None = None


def builtin(name: str) -> QuantumGroup:
    """c:G は関数環 C(G)、g:G は群環 ℂ[G]"""
    flavour, _, group_name = name.partition(':')
    factory = _GROUPS.get(group_name)
    if flavour not in ('c', 'g') or factory is None:
        known = ', '.join(f'{f}:{g}' for f in 'cg' for g in _GROUPS)
        raise PresentationFormatError('builtin', f"未知の組み込み量子群です: {name!r}（{known}）")
    group = factory()
    return function_algebra(group) if flavour == 'c' else group_algebra(group)


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"正の値が必要です: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fqg', description='有限量子群の冪等状態・超群・無限分解可能性の検証')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('command', choices=COMMANDS)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', dest='input_path', help='量子群の JSON ファイル')
    source.add_argument('--builtin', dest='builtin_name', help='組み込み量子群（例: c:Z4, g:S3）')
    parser.add_argument('--tol', type=_positive_float, default=None, help='残差の許容値（既定は設定ファイル）')
    parser.add_argument('--output', choices=('json', 'table'), default='table')
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--functional', dest='functional_path', help='汎関数（係数ベクトル）の JSON ファイル')
    parser.add_argument('--phi', dest='phi_path', help='冪等状態の JSON ファイル（既定は ε）')
    parser.add_argument('--index', type=int, default=None, help='列挙した冪等状態のうち1つだけを対象にする')
    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(**vars(args))


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    return str(value)


def _report_payload(report: VerificationReport) -> dict:
    return {
        'title': report.title,
        'passed': report.passed,
        'checks': [
            {
                'name': c.name,
                'residual': f'{c.residual:.6e}',
                'tol': f'{c.tol:.6e}',
                'passed': c.passed,
                'detail': _jsonable(c.detail),
            }
            for c in report.checks
        ],
        'notes': _jsonable(report.notes),
    }


def _render_table(report: VerificationReport, extra: dict) -> str:
    width = max([len(c.name) for c in report.checks] + [10])
    lines = [f'# {report.title}']
    for c in report.checks:
        lines.append(f"{c.name:<{width}}  {c.residual:.6e}  {c.tol:.6e}  {'OK' if c.passed else 'NG'}")
    for key in sorted(report.notes):
        lines.append(f'{key}: {_jsonable(report.notes[key])}')
    for key in sorted(extra):
        lines.append(f'{key}: {_jsonable(extra[key])}')
    lines.append('PASS' if report.passed else 'FAIL')
    return '\n'.join(lines)


def _load_phi(config: RunConfig, qg: QuantumGroup) -> Functional:
    if config.phi_path is None:
        return counit_functional(qg)
    return load_functional(config.phi_path, qg.dim)


def _require_functional(config: RunConfig, qg: QuantumGroup) -> Functional:
    if config.functional_path is None:
        raise PresentationFormatError('--functional', f"{config.command} には汎関数ファイルが必要です")
    return load_functional(config.functional_path, qg.dim)


def _selected_idempotents(config: RunConfig, qg: QuantumGroup) -> list[tuple[int, Functional]]:
    states = enumerate_idempotents_bruteforce(qg).states
    indexed = list(enumerate(states))
    if config.index is None:
        return indexed
    if not 0 <= config.index < len(states):
        raise PresentationFormatError('--index', f"0 から {len(states) - 1} の範囲で指定してください: {config.index}")
    return [indexed[config.index]]


def _cmd_verify(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    return verify_cqg(qg, config.tol), {'blocks': list(qg.blocks.sizes)}


def _cmd_irreps(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    tbl = irreps(qg, config.tol)
    report = verify_irrep_table(qg, tbl, config.tol)
    report.extend(check_orthogonality(qg, tbl, config.tol), prefix='orthogonality.')
    return report, {'sizes': list(tbl.sizes), 'trivial_index': tbl.trivial_index}


def _cmd_idempotents(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    enumeration = enumerate_idempotents_bruteforce(qg)
    tbl = irreps(qg)
    report = VerificationReport(f'idempotents {qg.name}')
    for k, phi in enumerate(enumeration.states):
        report.extend(check_idempotent_properties(qg, tbl, phi, config.tol), prefix=f'phi[{k}].')
    extra = {
        'count': len(enumeration.states),
        'partial': enumeration.partial,
        'idempotents': [encode_vector(phi.covec) for phi in enumeration.states],
    }
    return report, extra


def _cmd_hypergroup(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    report = VerificationReport(f'hypergroups {qg.name}')
    sizes = {}
    for k, phi in _selected_idempotents(config, qg):
        H = build_hypergroup_from_idempotent(qg, phi, config.tol)
        report.extend(verify_hypergroup(H, config.tol), prefix=f'phi[{k}].')
        report.extend(verify_peter_weyl(H, hypergroup_irreps(H), config.tol), prefix=f'phi[{k}].')
        sizes[f'phi[{k}]'] = list(H.blocks.sizes)
    return report, {'blocks': sizes}


def _cmd_duality(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    report = VerificationReport(f'duality {qg.name}')
    selected = _selected_idempotents(config, qg)
    for k, phi in selected:
        report.extend(verify_duality_theorem(qg, phi, config.tol), prefix=f'phi[{k}].')
    return report, {'count': len(selected)}


def _cmd_poisson(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    u = _require_functional(config, qg)
    phi = _load_phi(config, qg)
    dec = levy_decompose(qg, phi, u, config.tol)
    report = VerificationReport(f'poisson_decompose {qg.name}')
    tol = get_law_tolerance() if config.tol is None else config.tol
    report.add('reconstruction', functional_norm(qg, dec.generator - u), tol)
    series = poisson_series(qg, dec.phi, dec.rate, dec.jump)
    report.add('series_agreement', functional_norm(qg, series - exp_phi(qg, phi, u)), tol)
    return report, {'decomposition': decomposition_to_dict(dec)}


def _cmd_divisible(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    omega = _require_functional(config, qg)
    report = VerificationReport(f'divisible_check {qg.name}')
    if not is_state(qg, omega):
        raise PresentationFormatError('--functional', "状態（正値かつ ω(1) = 1）が必要です")
    n = max(math.lcm(*range(1, qg.dim + 1)), 2)
    tbl = irreps(qg)
    phi = support_idempotent(qg, tbl, omega) if config.phi_path is None else _load_phi(config, qg)
    chain = root_chain_search(qg, omega, n, tbl=tbl)
    if isinstance(chain, RootSearchFailure):
        report.add('root_search', float('inf'), 0.0, level=chain.level, reason=chain.reason,
                   min_eigenvalue=chain.min_eigenvalue)
        return report, {'poisson': False, 'narrative': chain.reason}
    try:
        dec = capture_and_extract(qg, chain, config.tol, phi)
    except ChainRejectedError as e:
        report.add('capture', float('inf'), 0.0, condition=e.condition)
        return report, {'poisson': False, 'narrative': e.narrative, 'chain': chain.indices}
    diagnostics, extracted = second_proof_diagnostics(qg, chain, config.tol, phi)
    report.extend(diagnostics, prefix='second_proof.')
    extra = {
        'poisson': True,
        'decomposition': decomposition_to_dict(dec),
        'chain': chain.indices,
        'clip_magnitudes': chain.clip_magnitudes,
        'second_proof_generator': encode_vector(extracted.covec),
    }
    return report, extra


def _cmd_suite(config: RunConfig, qg: QuantumGroup) -> tuple[VerificationReport, dict]:
    return main_theorem_suite(qg, seed=config.seed, tol=config.tol), {}


_DISPATCH: dict[str, Callable[[RunConfig, QuantumGroup], tuple[VerificationReport, dict]]] = {
    'verify': _cmd_verify,
    'irreps': _cmd_irreps,
    'idempotents': _cmd_idempotents,
    'hypergroup': _cmd_hypergroup,
    'duality': _cmd_duality,
    'poisson-decompose': _cmd_poisson,
    'divisible-check': _cmd_divisible,
    'suite': _cmd_suite,
}


def _emit(stream: TextIO, config: RunConfig, qg_name: str, report: VerificationReport | None,
          extra: dict, error: str | None = None) -> None:
    if config.output == 'json':
        payload: dict[str, Any] = {'schema': SCHEMA, 'command': config.command, 'quantum_group': qg_name}
        if report is not None:
            payload['report'] = _report_payload(report)
        if error is not None:
            payload['error'] = error
        payload.update({k: _jsonable(v) for k, v in extra.items()})
        stream.write(dumps(payload) + '\n')
    elif report is not None:
        stream.write(_render_table(report, extra) + '\n')
    if error is not None and config.output != 'json':
        stream.write(f'ERROR: {error}\n')


def run(config: RunConfig, stream: TextIO | None = None) -> int:
    """0: 合格、1: 数学的な不合格（公理違反・連鎖の棄却など）、2: 入力エラー"""
    if stream is None:
        stream = sys.stdout
    qg_name = config.builtin_name or config.input_path or ''
    try:
        if config.builtin_name is not None:
            qg = builtin(config.builtin_name)
        elif config.input_path is not None:
            qg = load_quantum_group(config.input_path)
        else:
            raise PresentationFormatError('--input', "--input か --builtin が必要です")
        qg_name = qg.name
        logger.info(f"{config.command} を開始します: {qg_name}")
        report, extra = _DISPATCH[config.command](config, qg)
    except PresentationFormatError as e:
        logger.error(f"入力エラー: {e}")
        _emit(stream, config, qg_name, None, {}, str(e))
        return EXIT_INPUT
    except FqgError as e:
        logger.error(f"{config.command} が失敗しました: {e}")
        _emit(stream, config, qg_name, None, {}, f'{type(e).__name__}: {e}')
        return EXIT_FAIL

    _emit(stream, config, qg_name, report, extra)
    status = EXIT_PASS if report.passed else EXIT_FAIL
    logger.info(f"{config.command} が終了しました: 終了コード {status}")
    return status
