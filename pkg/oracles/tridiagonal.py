"""
Симметричные трёхдиагональные операторы и бисекция по последовательности Штурма.

Нужны только несколько нижних собственных значений, поэтому плотная
диагонализация не используется: память O(N), время O(N) на одно сечение.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from oscillator.exceptions import EmptyOperator

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    diag: np.ndarray
    offdiag: np.ndarray
    step: float = 1.0
    domain: Tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        offdiag = np.asarray(self.offdiag, dtype=float)
        if len(offdiag) != max(len(diag) - 1, 0):
            raise ValueError(f"offdiag must have {max(len(diag) - 1, 0)} entries, got {len(offdiag)}")
        object.__setattr__(self, 'diag', diag)
        object.__setattr__(self, 'offdiag', offdiag)

    def __len__(self):
        return len(self.diag)


def gershgorin_bounds(op: TridiagonalOperator) -> Tuple[float, float]:
    """Интервал, содержащий весь спектр (круги Гершгорина)"""
    if not len(op):
        raise EmptyOperator("operator has no entries")
    radius = np.zeros_like(op.diag)
    radius[:-1] += np.abs(op.offdiag)
    radius[1:] += np.abs(op.offdiag)
    return float(np.min(op.diag - radius)), float(np.max(op.diag + radius))


def _pivot_floor(offdiag_sq) -> float:
    return np.finfo(float).tiny * max(1.0, max(offdiag_sq, default=0.0))


def _count(diag: List[float], offdiag_sq: List[float], shift: float, pivmin: float) -> int:
    # q_i = d_i − x − e²_{i−1}/q_{i−1}; число отрицательных q_i = число собственных значений < x
    negatives = 0
    q = diag[0] - shift
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        negatives += 1
    for d, e2 in zip(diag[1:], offdiag_sq):
        q = d - shift - e2 / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            negatives += 1
    return negatives


def sturm_count(op: TridiagonalOperator, shift: float) -> int:
    """
    Число собственных значений строго меньше shift.

    Raises:
        EmptyOperator: для оператора нулевого размера
    """
    if not len(op):
        raise EmptyOperator("operator has no entries")
    offdiag_sq = (op.offdiag ** 2).tolist()
    return _count(op.diag.tolist(), offdiag_sq, float(shift), _pivot_floor(offdiag_sq))


def tridiag_eigs(op: TridiagonalOperator, count: int) -> List[float]:
    """
    count наименьших собственных значений по возрастанию.

    Бисекция идёт до соседних чисел с плавающей точкой, что заведомо уже
    1e−12 от ширины интервала Гершгорина.

    Raises:
        EmptyOperator: для N = 0
        ValueError: если count > N
    """
    size = len(op)
    if not size:
        raise EmptyOperator("operator has no entries")
    if not 0 <= count <= size:
        raise ValueError(f"count must be in [0, {size}], got {count}")

    lower, upper = gershgorin_bounds(op)
    pad = 2 * EPS * max(abs(lower), abs(upper)) + np.finfo(float).tiny
    lower, upper = lower - pad, upper + pad

    diag = op.diag.tolist()
    offdiag_sq = (op.offdiag ** 2).tolist()
    pivmin = _pivot_floor(offdiag_sq)

    # все точки (x, число собственных значений < x) сужают следующие интервалы
    samples = [(lower, 0), (upper, size)]
    values = []
    for index in range(count):
        lo = max(x for x, below in samples if below <= index)
        hi = min(x for x, below in samples if below > index)
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            below = _count(diag, offdiag_sq, mid, pivmin)
            samples.append((mid, below))
            if below > index:
                hi = mid
            else:
                lo = mid
        values.append(0.5 * (lo + hi))
    logger.debug(f"Sturm bisection: N={size}, {count} eigenvalues, {len(samples)} samples")
    return values
