"""Real-argument Gamma function via the Lanczos approximation.

The rational Lanczos sum below is the 13-term set with g = 6.0246800407767...
popularised by Boost and the Cephes library. Positive integer arguments
short-circuit to exact factorials.
"""

import math

from .errors import DomainError

_G = 6.024680040776729583740234375

# numerator and denominator of lanczos_sum(x) * exp(-g), highest power first
_NUM = (
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
)
_DEN = (
    1.0,
    66.0,
    1925.0,
    32670.0,
    357423.0,
    2637558.0,
    13339535.0,
    45995730.0,
    105258076.0,
    150917976.0,
    120543840.0,
    39916800.0,
    0.0,
)

# Gamma(x) overflows a double just above 171.62.
_MAX_ARG = 171.6


def _lanczos_sum_expg_scaled(x):
    if x < 1.0:
        num = den = 0.0
        for a, b in zip(_NUM, _DEN):
            num = num * x + a
            den = den * x + b
        return num / den
    # evaluate in 1/x so the degree-12 polynomials stay well scaled
    y = 1.0 / x
    num = den = 0.0
    for a, b in zip(reversed(_NUM), reversed(_DEN)):
        num = num * y + a
        den = den * y + b
    return num / den


def _sin_pi(x):
    # exact reduction to [-1/2, 1/2] keeps sin(pi x) accurate near the poles
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def _is_nonpositive_integer(x):
    return x <= 0 and x == math.floor(x)


def _check(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x}")
    return x


def gamma(x):
    """Gamma function for real ``x``.

    Raises
    ------
    DomainError
        At the poles x = 0, -1, -2, ... or for non-finite input.
    OverflowError
        If the result exceeds the double range.
    """
    x = _check(x)
    if x == math.floor(x) and x <= _MAX_ARG:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        denom = _sin_pi(x) * gamma(1.0 - x)
        value = math.pi / denom if denom != 0 else math.inf
        if not math.isfinite(value):
            raise OverflowError(f"gamma({x}) overflows a double")
        return value
    if x > _MAX_ARG:
        raise OverflowError(f"gamma({x}) overflows a double")
    zgh = x + _G - 0.5
    # split the power so zgh**(x - 0.5) cannot overflow before the exp divides it
    half = zgh ** (0.5 * (x - 0.5))
    return _lanczos_sum_expg_scaled(x) * half * (half / math.exp(x - 0.5))


def log_gamma(x):
    """log|Gamma(x)| for real ``x`` (not a pole)."""
    x = _check(x)
    if x == math.floor(x) and x <= _MAX_ARG:
        return math.log(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.log(math.pi / abs(_sin_pi(x))) - log_gamma(1.0 - x)
    zgh = x + _G - 0.5
    return math.log(_lanczos_sum_expg_scaled(x)) + (x - 0.5) * (math.log(zgh) - 1.0)
