"""Central differences with Richardson extrapolation (Ridders' tableau).

``max_step`` lets callers keep the stencil away from branch points such as
theta0 or the coalescence point, which a generic differentiator cannot know.
"""

import math

_CON = 1.4
_CON2 = _CON * _CON
_SAFE = 2.0


def _central(f, x, h, order):
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def derivative(f, x, order=1, h0=None, max_step=None, ntab=10):
    """Return (estimate, error_estimate) of the first or second derivative."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    h = h0 if h0 is not None else 0.1 * max(1.0, abs(x))
    if max_step is not None:
        h = min(h, max_step)
    if not h > 0:
        raise ValueError("step must be positive")
    a = [[0.0] * ntab for _ in range(ntab)]
    a[0][0] = _central(f, x, h, order)
    err = math.inf
    best = a[0][0]
    for i in range(1, ntab):
        h /= _CON
        a[0][i] = _central(f, x, h, order)
        fac = _CON2
        for j in range(1, i + 1):
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0)
            fac *= _CON2
            errt = max(abs(a[j][i] - a[j - 1][i]), abs(a[j][i] - a[j - 1][i - 1]))
            if errt <= err:
                err = errt
                best = a[j][i]
        if abs(a[i][i] - a[i - 1][i - 1]) >= _SAFE * err:
            break
    return best, err


def d1(f, x, **kw):
    return derivative(f, x, 1, **kw)[0]


def d2(f, x, **kw):
    return derivative(f, x, 2, **kw)[0]
