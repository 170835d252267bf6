"""Brute-force numerical machinery used to cross-check the closed forms.

Nothing here knows about gravitons. The routines are deliberately generic:
an adaptive Gauss-Kronrod integrator, a panel-per-half-period integrator
for smooth envelopes times a cosine or sine, a tensor-product rule for
two-time integrals, and Monte Carlo summary statistics.

Integrands are called with numpy arrays of abscissae; scalar-only callables
are detected and evaluated point by point.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonConvergenceError

# Kronrod 15-point abscissae and weights (nonnegative half), with the
# embedded 7-point Gauss weights on the odd-indexed abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set on [-1, 1]: 7 negative, centre, 7 positive.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    """Outcome of a quadrature: value, error estimate, integrand evaluations."""

    value: float
    error_estimate: float
    evaluations: int


def _as_vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        flat = np.array([float(f(float(xi))) for xi in x.ravel()])
        return flat.reshape(x.shape)

    return g


def _gk15(f, a: np.ndarray, b: np.ndarray):
    """Apply G7K15 to the intervals [a_i, b_i] at once."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = f(x)
    k = half * (y @ _KW)
    g = half * (y @ _GW)
    resabs = np.abs(half) * (np.abs(y) @ _KW)
    floor = 50.0 * _EPS * resabs
    # Roundoff floor in the spirit of QUADPACK.
    err = np.maximum(np.abs(k - g), floor)
    return k, err, err <= floor


def _adaptive(f, a: float, b: float, target: Callable[[float], float],
              max_intervals: int, points: Sequence[float] = ()) -> QuadResult:
    edges = np.array(sorted({a, b, *[p for p in points if a < p < b]}))
    lo, hi = edges[:-1], edges[1:]
    vals, errs, limited = _gk15(f, lo, hi)
    evaluations = 15 * len(lo)
    heap = [(-e, l, h, v, r) for e, l, h, v, r in zip(errs, lo, hi, vals, limited)]
    heapq.heapify(heap)
    total = float(np.sum(vals))
    total_err = float(np.sum(errs))
    while total_err > target(total):
        if heap[0][4]:
            # Worst interval is already at its roundoff floor: refining cannot help.
            break
        if len(heap) >= max_intervals:
            raise NonConvergenceError(
                f"adaptive quadrature hit {max_intervals} intervals on [{a}, {b}] "
                f"(error estimate {total_err:.3e}, target {target(total):.3e})"
            )
        # Bisect the worst few intervals in one vectorized call.
        n_split = max(1, min(len(heap), 16))
        worst = []
        while heap and len(worst) < n_split and not heap[0][4]:
            worst.append(heapq.heappop(heap))
        l = np.array([w[1] for w in worst])
        h = np.array([w[2] for w in worst])
        if np.any(np.abs(h - l) < 1e3 * _EPS * max(abs(a), abs(b), 1e-300)):
            raise NonConvergenceError(f"interval width underflow while integrating on [{a}, {b}]")
        m = 0.5 * (l + h)
        new_v, new_e, new_r = _gk15(f, np.concatenate([l, m]), np.concatenate([m, h]))
        evaluations += 30 * len(worst)
        for w in worst:
            total -= w[3]
            total_err += w[0]
        k = len(worst)
        for i in range(k):
            for j, lo_j, hi_j in ((i, l[i], m[i]), (i + k, m[i], h[i])):
                heapq.heappush(heap, (-new_e[j], lo_j, hi_j, new_v[j], bool(new_r[j])))
                total += new_v[j]
                total_err += new_e[j]
    # Re-sum from the heap to shed accumulated roundoff of the running totals.
    value = math.fsum(item[3] for item in heap)
    error = math.fsum(-item[0] for item in heap)
    return QuadResult(value, error, evaluations)


def adaptive_quad(f: Callable, a: float, b: float, tol: float = 1e-10, *,
                  relative: bool = False, points: Sequence[float] = (),
                  max_intervals: int = 5000) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of f on [a, b].

    The default contract is |value - I| <= tol * max(1, |value|). With
    ``relative=True`` the target is tol * |value| instead, which is what one
    wants for integrals whose natural size is far from one.

    Args:
        f: integrand, ideally vectorized over numpy arrays.
        a, b: finite limits with a < b.
        tol: requested tolerance.
        relative: use a purely relative target.
        points: interior breakpoints (kinks, singular points).
        max_intervals: subdivision limit; exceeding it raises NonConvergenceError.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("adaptive_quad needs finite limits; use oscillatory_quad for tails")
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    fv = _as_vectorized(f)
    if relative:
        def target(v: float) -> float:
            return tol * abs(v) + 1e-300
    else:
        def target(v: float) -> float:
            return tol * max(1.0, abs(v))
    return _adaptive(fv, float(a), float(b), target, max_intervals, points)


def _wynn_epsilon(s: Sequence[float]) -> float:
    """Wynn epsilon extrapolation of a sequence of partial sums."""
    n = len(s)
    e_prev = np.zeros(n + 1)
    e_cur = np.array(s, dtype=float)
    best = e_cur[-1]
    k = 0
    while len(e_cur) > 1:
        diff = np.diff(e_cur)
        with np.errstate(divide="ignore", invalid="ignore"):
            e_next = e_prev[1:len(e_cur)] + 1.0 / diff
        if not np.all(np.isfinite(e_next)):
            break
        e_prev, e_cur = e_cur, e_next
        k += 1
        if k % 2 == 0:
            best = e_cur[-1]
    return float(best)


def oscillatory_quad(envelope: Callable, omega: float, a: float, b: float,
                     tol: float = 1e-10, *, kind: str = "cos",
                     length_scale: float = 1.0, max_panels: int = 200000) -> QuadResult:
    """Integrate envelope(x) * cos(omega x) (or sin) over [a, b].

    The range is cut at the zeros of the trigonometric factor, so every panel
    carries at most half a period, and each panel is integrated by G7K15 with
    adaptive refinement where needed. ``b`` may be ``inf``: panels are then
    generated in blocks until the tail is negligible, and for slowly decaying
    envelopes the sequence of partial sums is accelerated with Wynn's epsilon
    algorithm (equivalent to iterated Shanks/Richardson-type extrapolation).
    When omega = 0 panels of width ``length_scale`` are used.

    Tolerance contract as for adaptive_quad: tol * max(1, |value|). When
    many panels sit at the double-precision roundoff floor the reported
    error_estimate can exceed that target; it is never understated.
    """
    if kind not in ("cos", "sin"):
        raise DomainError(f"kind must be 'cos' or 'sin', got {kind!r}")
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    omega = abs(float(omega)) if kind == "cos" else float(omega)
    env = _as_vectorized(envelope)
    trig = np.cos if kind == "cos" else np.sin

    def integrand(x: np.ndarray) -> np.ndarray:
        return env(x) * trig(omega * x)

    w = abs(omega)
    if w > 0.0:
        step = math.pi / w
        offset = 0.5 * step if kind == "cos" else 0.0
    else:
        step = float(length_scale)
        offset = 0.0

    def panel_edges(k0: int, k1: int) -> np.ndarray:
        # Zeros z_k = offset + k*step lying strictly inside (a, b).
        return offset + step * np.arange(k0, k1)

    k_first = math.floor((a - offset) / step) + 1
    evaluations = 0

    def integrate_panels(edges: np.ndarray, per_panel_tol: float):
        nonlocal evaluations
        lo, hi = edges[:-1], edges[1:]
        vals, errs, _ = _gk15(integrand, lo, hi)
        evaluations += 15 * len(lo)
        bad = np.nonzero(errs > per_panel_tol)[0]
        for i in bad:
            r = _adaptive(integrand, float(lo[i]), float(hi[i]),
                          lambda v: per_panel_tol, 2000)
            vals[i] = r.value
            errs[i] = r.error_estimate
            evaluations += r.evaluations
        return vals, errs

    if math.isfinite(b):
        k_last = math.ceil((b - offset) / step) - 1
        if k_last - k_first + 1 > max_panels:
            raise NonConvergenceError(f"{k_last - k_first + 1} panels exceed max_panels")
        inner = panel_edges(k_first, k_last + 1)
        edges = np.concatenate([[a], inner[(inner > a) & (inner < b)], [b]])
        n_panels = len(edges) - 1
        # First pass to learn the scale, then tighten per-panel targets.
        vals, errs = integrate_panels(edges, np.inf)
        scale = max(1.0, abs(math.fsum(vals)))
        vals, errs = integrate_panels(edges, tol * scale / n_panels)
        # Panels that could not reach their share stopped at the roundoff
        # floor (otherwise _adaptive raises), so the summed estimate is
        # reported as is, like adaptive_quad does.
        return QuadResult(math.fsum(vals), math.fsum(errs), evaluations)

    # Semi-infinite range.
    block = 64
    partial: list[float] = []
    errors: list[float] = []
    running = 0.0
    k = k_first
    left = a
    extrap_prev = None
    while True:
        edges = np.concatenate([[left], panel_edges(k, k + block)])
        edges = edges[edges >= left]
        vals, errs = integrate_panels(edges, tol * 1e-3 * max(1.0, abs(running)))
        for v in vals:
            running += v
            partial.append(running)
        errors.extend(errs.tolist())
        left = float(edges[-1])
        k += block
        scale = max(1.0, abs(running))
        block_sum = abs(math.fsum(vals))
        if block_sum < 1e-3 * tol * scale and abs(vals[-1]) < 1e-3 * tol * scale:
            return QuadResult(running, math.fsum(errors) + block_sum, evaluations)
        if len(partial) >= 2 * block:
            extrap = _wynn_epsilon(partial[-40:])
            if extrap_prev is not None and abs(extrap - extrap_prev) < 0.1 * tol * max(1.0, abs(extrap)):
                err = abs(extrap - extrap_prev) + math.fsum(errors)
                return QuadResult(extrap, err, evaluations)
            extrap_prev = extrap
        if len(partial) > max_panels:
            raise NonConvergenceError("oscillatory tail did not converge within max_panels")


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached n-point Gauss-Legendre nodes and weights on [-1, 1]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def panel_rule(edges: Sequence[float], n_nodes: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    x, w = gauss_legendre(n_nodes)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[None, :]
    weights = 0.5 * (hi - lo) * w[None, :]
    return nodes.ravel(), weights.ravel()


def _refined_edges(base: np.ndarray, level: int) -> np.ndarray:
    parts = 2**level
    pieces = [np.linspace(l, h, parts + 1)[:-1] for l, h in zip(base[:-1], base[1:])]
    return np.concatenate(pieces + [base[-1:]])


def nested_time_quad(kernel: Callable, weights: tuple[Callable, Callable], tf: float,
                     tol: float = 1e-8, *, t0: float = 0.0, breakpoints: Sequence[float] = (),
                     n_nodes: int = 16, atol: float = 0.0, max_nodes: int = 4096) -> QuadResult:
    """Tensor-product quadrature of the two-time integral.

        I = int_{t0}^{tf} int_{t0}^{tf} w1(t) w2(t') kernel(t, t') dt dt'

    Composite Gauss-Legendre on panels (split at ``breakpoints``), halving the
    panel width until two successive levels agree to tol relative (or to
    ``atol`` absolute). ``kernel`` must broadcast over arrays t[:, None],
    t'[None, :].
    """
    if not tf > t0:
        raise DomainError(f"need tf > t0, got tf={tf}, t0={t0}")
    w1, w2 = (_as_vectorized(w) for w in weights)
    base = np.array(sorted({t0, tf, *[p for p in breakpoints if t0 < p < tf]}), dtype=float)
    previous = None
    evaluations = 0
    level = 0
    while True:
        nodes, q = panel_rule(_refined_edges(base, level), n_nodes)
        if len(nodes) > max_nodes:
            raise NonConvergenceError(
                f"nested_time_quad needs more than {max_nodes} nodes per axis "
                f"(last change {abs(value - previous) if previous is not None else float('nan'):.3e})")
        a = q * w1(nodes)
        c = q * w2(nodes)
        kmat = np.asarray(kernel(nodes[:, None], nodes[None, :]), dtype=float)
        if kmat.shape != (len(nodes), len(nodes)):
            kmat = np.broadcast_to(kmat, (len(nodes), len(nodes)))
        value = float(a @ kmat @ c)
        evaluations += kmat.size
        if previous is not None:
            change = abs(value - previous)
            if change <= tol * abs(value) or change <= atol:
                return QuadResult(value, change, evaluations)
        previous = value
        level += 1


def time_quad(f: Callable, tf: float, tol: float = 1e-10, *, t0: float = 0.0,
              breakpoints: Sequence[float] = (), n_nodes: int = 16,
              atol: float = 0.0, max_nodes: int = 1 << 16) -> QuadResult:
    """Single-time analogue of nested_time_quad (composite Gauss-Legendre)."""
    fv = _as_vectorized(f)
    base = np.array(sorted({t0, tf, *[p for p in breakpoints if t0 < p < tf]}), dtype=float)
    previous = None
    evaluations = 0
    level = 0
    while True:
        nodes, q = panel_rule(_refined_edges(base, level), n_nodes)
        if len(nodes) > max_nodes:
            raise NonConvergenceError("time_quad did not converge")
        value = float(q @ fv(nodes))
        evaluations += len(nodes)
        if previous is not None:
            change = abs(value - previous)
            if change <= tol * abs(value) or change <= atol:
                return QuadResult(value, change, evaluations)
        previous = value
        level += 1


@dataclass(frozen=True)
class SampleMoments:
    """Monte Carlo summary of a scalar sample with standard errors.

    The variance standard error assumes near-Gaussian data; the skewness and
    excess-kurtosis errors are the large-n Gaussian values sqrt(6/n), sqrt(24/n).
    """

    n: int
    mean: float
    sem: float
    var: float
    var_se: float
    skew: float
    skew_se: float
    excess_kurtosis: float
    kurtosis_se: float


def sample_moments(x) -> SampleMoments:
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise DomainError("need at least two samples")
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d**2))
    var = m2 * n / (n - 1)
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    skew = m3 / m2**1.5 if m2 > 0 else 0.0
    kurt = m4 / m2**2 - 3.0 if m2 > 0 else 0.0
    return SampleMoments(
        n=n,
        mean=mean,
        sem=math.sqrt(var / n),
        var=var,
        var_se=var * math.sqrt(2.0 / (n - 1)),
        skew=skew,
        skew_se=math.sqrt(6.0 / n),
        excess_kurtosis=kurt,
        kurtosis_se=math.sqrt(24.0 / n),
    )


def sphere_quad(f: Callable, n_theta: int = 32, n_phi: int = 64):
    """Integral of f(n) over the unit sphere, f taking a unit 3-vector.

    Gauss-Legendre in cos(theta) times the periodic trapezoid rule in phi,
    which is exact for polynomials in the components of n up to degree
    min(2 n_theta - 1, n_phi - 1). f may return any array shape.
    """
    u, wu = gauss_legendre(n_theta)
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * math.pi / n_phi
    total = None
    for ui, wi in zip(u, wu):
        s = math.sqrt(max(0.0, 1.0 - ui * ui))
        for ph in phis:
            n = np.array([s * math.cos(ph), s * math.sin(ph), ui])
            term = wi * wphi * np.asarray(f(n), dtype=float)
            total = term if total is None else total + term
    return total
