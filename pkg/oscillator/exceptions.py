"""
Ошибки расчётов осциллятора Дирака.

Все наследуют ValueError, поэтому вызывающий код может ловить их
как обычную ошибку входных данных.
"""


class OscillatorError(ValueError):
    """Базовая ошибка для всех расчётов пакета"""


class NonPositiveFrequency(OscillatorError):
    """Эффективная частота ω̃ = ω − ωc/2 не положительна (поле слишком сильное)"""


class InvalidDeformation(OscillatorError):
    """Параметры некоммутативности дают ϱ₁ ≤ 0 или ϱ₂ ≤ 0"""


class DenominatorPole(OscillatorError):
    """Знаменатель гипергеометрического ряда обращается в ноль"""


class BetaOutOfRange(OscillatorError):
    """β вне допустимой области (β < 0 или β ≥ β₀ для выбранного m)"""


class InvalidM(OscillatorError):
    """Угловое число m не подходит для операции"""


class ZeroBeta(OscillatorError):
    """Операция определена только при β > 0"""


class TailTooHeavy(OscillatorError):
    """Сетка обрезает заметную часть нормировочного интеграла"""


class GridTooCoarse(OscillatorError):
    """Слишком мало точек сетки или сетка неравномерная"""


class DenominatorZero(OscillatorError):
    """ε + m0c² = 0, нижняя компонента спинора не определена"""


class EmptyOperator(OscillatorError):
    """Трёхдиагональный оператор без элементов"""


class CutoffTooSmall(OscillatorError):
    """Верхняя граница импульсной сетки не покрывает хвост волновой функции"""
