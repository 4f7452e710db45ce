"""
Полиномиальные (обрывающиеся) гипергеометрические функции.

Квантование всегда обрывает ряд на a = −n, поэтому здесь нет общего
₁F₁/₂F₁, только конечные суммы. Суммы считаются накоплением отношения
соседних членов, без факториалов, что держит n до нескольких сотен.
"""
import numpy as np

from .exceptions import DenominatorPole


def pochhammer(x: float, j: int) -> float:
    """Возрастающий факториал (x)_j = x(x+1)···(x+j−1), (x)_0 = 1"""
    if j < 0:
        raise ValueError(f"pochhammer order must be non-negative, got {j}")
    result = 1.0
    for i in range(j):
        result *= x + i
    return result


def _check_denominator(n: int, c: float):
    if n < 0:
        raise ValueError(f"polynomial degree must be non-negative, got {n}")
    for j in range(n):
        if c + j == 0:
            raise DenominatorPole(f"c + {j} = 0 for c = {c} within degree {n}")


def hyp1f1_poly(n: int, c: float, x):
    """
    ₁F₁(−n; c; x) = Σ_{j=0}^{n} (−n)_j x^j / ((c)_j j!).

    Args:
        n: степень полинома
        c: нижний параметр, c + j ≠ 0 для 0 ≤ j < n
        x: число или массив numpy

    Raises:
        DenominatorPole: если c + j = 0
    """
    _check_denominator(n, c)
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(n):
        term = term * (-n + j) / ((c + j) * (j + 1)) * x
        total = total + term
    return total if total.ndim else float(total)


def hyp1f1_poly_recurrence(n: int, c: float, x):
    """
    Тот же полином через трёхчленное рекуррентное соотношение
    (c+k)·M_{k+1} = (2k+c−x)·M_k − k·M_{k−1}, M_0 = 1, M_1 = 1 − x/c.
    """
    _check_denominator(n, c)
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return previous if previous.ndim else float(previous)
    current = 1 - x / c
    for k in range(1, n):
        previous, current = current, ((2 * k + c - x) * current - k * previous) / (c + k)
    return current if current.ndim else float(current)


def hyp2f1_poly(n: int, b: float, c: float, z):
    """
    ₂F₁(−n, b; c; z) = Σ_{j=0}^{n} (−n)_j (b)_j z^j / ((c)_j j!).

    Raises:
        DenominatorPole: если c + j = 0
    """
    _check_denominator(n, c)
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for j in range(n):
        term = term * (-n + j) * (b + j) / ((c + j) * (j + 1)) * z
        total = total + term
    return total if total.ndim else float(total)


def hyp1f1_term_scale(n: int, c: float, x) -> float:
    """Сумма модулей членов ряда: масштаб, относительно которого теряется точность"""
    _check_denominator(n, c)
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(n):
        term = term * abs(-n + j) / (abs(c + j) * (j + 1)) * np.abs(x)
        total = total + term
    return total if total.ndim else float(total)
