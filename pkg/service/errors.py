class FqgError(Exception):
    """有限量子群計算の基底例外"""


class StructureError(FqgError):
    """テンソル・行列の形状が一致しない"""


class DomainError(FqgError):
    """演算の前提条件を満たさない入力"""


class DecompositionError(FqgError):
    """半単純でない代数の分解要求"""


class ConditioningError(FqgError):
    """スペクトルが退化して分解が決まらない"""


class AxiomViolationError(FqgError):
    """公理系から決まるはずの量が一意に決まらない"""


class ConvergenceError(FqgError):
    """反復が許容回数内に収束しない"""


class RadiusError(FqgError):
    """対数級数の収束半径外"""


class InternalAssertionError(FqgError):
    """理論上起こり得ない結果（実装の不具合を示す）"""


class ChainRejectedError(FqgError):
    """根の鎖が捕捉条件を満たさない"""

    def __init__(self, condition: int, narrative: str):
        super().__init__(f"条件({condition})違反: {narrative}")
        self.condition = condition
        self.narrative = narrative
