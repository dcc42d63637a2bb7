"""Laws of the sufficient overlap statistic T(u, v) under pi x pi.

Every prior supported by the package factors its likelihood-ratio kernel
through a low-dimensional statistic of the signal pair (u, v): a scalar
overlap <u, v>, a support-intersection count |u n v|, or the coordinate
agreement triple (a, b, c).  This module represents the pushforward of
pi^{x2} through that statistic:

- discrete laws carry exact rational-derived atom probabilities
  (math.comb / Fraction arithmetic, evaluated once into floats);
- the single continuous law (sphere overlap) is represented by its exact
  Beta-derived density, never by a discretization.

On top of the laws sit the quantile objects used by the hardness
criteria: survival functions P(g(T) >= r) and the generalized-inverse
thresholds

    threshold_sup(mass) = sup { r : P(g(T) >= r) >= mass },

whose boundary-atom behaviour (achieved mass, exactness flag) the
criteria need to expose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import beta as beta_dist

Statistic = float | tuple
Transform = Callable[[Statistic], float] | None

# Relative slack for survival >= mass comparisons; absorbs 1-ulp float
# discrepancies when a caller passes a mass meant to hit an atom exactly.
_REL_TOL = 1e-12


def _ge(a: float, b: float) -> bool:
    return a >= b - _REL_TOL * max(abs(a), abs(b))


@dataclass(frozen=True)
class ThresholdResult:
    """sup-threshold of a transformed statistic at a given tail mass.

    `exact` is True iff the survival function actually attains the
    requested mass at the threshold (relative tolerance 1e-12); when it
    is False the complementary event is strictly fatter than 1 - mass,
    which several equivalence statements treat as a failed premise.
    """

    threshold: float
    achieved_mass: float
    exact: bool


@dataclass(frozen=True)
class OverlapLaw:
    """Distribution of the overlap statistic under pi x pi.

    kind: "discrete" (atoms + probs) or "continuous" (density accessors).
    statistic: "scalar" or "pair_counts" (integer triples).
    """

    kind: str
    statistic: str
    descriptor: dict
    values: tuple = ()
    probs: tuple = ()
    _pdf: Callable[[float], float] | None = None
    _cdf: Callable[[float], float] | None = None
    _ppf: Callable[[float], float] | None = None
    support: tuple[float, float] = (0.0, 0.0)
    _sampler: Callable | None = None

    def __post_init__(self) -> None:
        if self.kind == "discrete":
            total = math.fsum(self.probs)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"atom probabilities sum to {total}, not 1")
            if any(p < 0.0 for p in self.probs):
                raise ValueError("atom probabilities must be nonnegative")
        elif self.kind != "continuous":
            raise ValueError(f"unknown law kind {self.kind!r}")

    @property
    def atoms(self) -> list[tuple[Statistic, float]]:
        if self.kind != "discrete":
            raise ValueError("atoms are only defined for discrete laws")
        return list(zip(self.values, self.probs))

    def pdf(self, t: float) -> float:
        if self._pdf is None:
            raise ValueError("law has no density")
        return self._pdf(t)

    def cdf(self, t: float) -> float:
        if self._cdf is None:
            raise ValueError("law has no cdf")
        return self._cdf(t)

    def ppf(self, p: float) -> float:
        if self._ppf is None:
            raise ValueError("law has no quantile function")
        return self._ppf(p)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _exact_atoms(pairs: list[tuple[Statistic, Fraction]]) -> tuple[tuple, tuple]:
    total = sum(p for _, p in pairs)
    if total != 1:
        raise AssertionError(f"exact atom masses sum to {total}, not 1")
    pairs = [(v, p) for v, p in pairs if p > 0]
    pairs.sort(key=lambda vp: vp[0] if isinstance(vp[0], tuple) else (vp[0],))
    return tuple(v for v, _ in pairs), tuple(float(p) for _, p in pairs)


def hypergeometric_law(n: int, k: int) -> OverlapLaw:
    """|u n v| for two independent uniform k-subsets (or binary k-sparse
    vectors) of [n]; exact combinatorial pmf."""
    if n <= 0 or k <= 0:
        raise ValueError(f"need n, k positive, got n={n}, k={k}")
    if k > n:
        raise ValueError(f"need k <= n, got k={k} > n={n}")
    denom = math.comb(n, k)
    pairs = [
        (float(ell), Fraction(math.comb(k, ell) * math.comb(n - k, k - ell), denom))
        for ell in range(0, k + 1)
    ]
    values, probs = _exact_atoms(pairs)
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "hypergeometric", "n": n, "k": k},
        values=values,
        probs=probs,
    )


def signed_sparse_law(n: int, k: int) -> OverlapLaw:
    """<u, v> for u, v uniform on +-1/sqrt(k)-valued k-sparse vectors.

    Conditional on an intersection of size ell (hypergeometric), the dot
    product is (2B - ell)/k with B ~ Bin(ell, 1/2); atoms live on the
    grid j/k, j in [-k, k].
    """
    if n <= 0 or k <= 0 or k > n:
        raise ValueError(f"invalid signed_sparse parameters n={n}, k={k}")
    denom = math.comb(n, k)
    acc: dict[int, Fraction] = {}
    for ell in range(0, k + 1):
        p_ell = Fraction(math.comb(k, ell) * math.comb(n - k, k - ell), denom)
        if ell == 0:
            acc[0] = acc.get(0, Fraction(0)) + p_ell
            continue
        for b in range(0, ell + 1):
            j = 2 * b - ell
            acc[j] = acc.get(j, Fraction(0)) + p_ell * Fraction(math.comb(ell, b), 2**ell)
    pairs = [(j / k, p) for j, p in acc.items()]
    values, probs = _exact_atoms(pairs)
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "signed_sparse", "n": n, "k": k},
        values=values,
        probs=probs,
    )


def rademacher_mean_law(n: int) -> OverlapLaw:
    """<u, v> = n^{-1} sum_i eps_i for u, v uniform on {-1/sqrt(n), 1/sqrt(n)}^n:
    a shifted binomial on the grid (2b - n)/n."""
    if n <= 0:
        raise ValueError(f"need n positive, got {n}")
    pairs = [((2 * b - n) / n, Fraction(math.comb(n, b), 2**n)) for b in range(0, n + 1)]
    values, probs = _exact_atoms(pairs)
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "rademacher_mean", "n": n},
        values=values,
        probs=probs,
    )


def two_point_law(rho_p: float, stat_values: tuple[float, float, float]) -> OverlapLaw:
    """Scalar statistic of a two-point prior: point 1 w.p. rho_p.

    stat_values = (T(1,1), T(2,2), T(mixed)); the three pair classes have
    masses rho_p^2, (1-rho_p)^2, 2 rho_p (1-rho_p).
    """
    if not 0.0 <= rho_p <= 1.0:
        raise ValueError(f"rho_p must lie in [0, 1], got {rho_p}")
    v11, v22, vmix = (float(v) for v in stat_values)
    acc: dict[float, float] = {}
    for v, p in ((v11, rho_p * rho_p), (v22, (1 - rho_p) ** 2), (vmix, 2 * rho_p * (1 - rho_p))):
        acc[v] = acc.get(v, 0.0) + p
    items = sorted((v, p) for v, p in acc.items() if p > 0.0)
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "two_point", "rho_p": rho_p, "values": [v11, v22, vmix]},
        values=tuple(v for v, _ in items),
        probs=tuple(p for _, p in items),
    )


def pair_counts_law(n: int, rho_p: float) -> OverlapLaw:
    """Agreement-count triple (a, b, c) = (#{u_i=v_i=0}, #{u_i!=v_i},
    #{u_i=v_i=1}) over n+1 coordinates for the two-point prior
    {e_0 w.p. rho_p, 1 - e_0 w.p. 1-rho_p}."""
    if n <= 0:
        raise ValueError(f"need n positive, got {n}")
    if not 0.0 <= rho_p <= 1.0:
        raise ValueError(f"rho_p must lie in [0, 1], got {rho_p}")
    atoms = [
        ((n, 0, 1), rho_p * rho_p),
        ((1, 0, n), (1 - rho_p) ** 2),
        ((0, n + 1, 0), 2 * rho_p * (1 - rho_p)),
    ]
    items = sorted((v, p) for v, p in atoms if p > 0.0)
    return OverlapLaw(
        kind="discrete",
        statistic="pair_counts",
        descriptor={"kind": "pair_counts", "n": n, "rho_p": rho_p},
        values=tuple(v for v, _ in items),
        probs=tuple(p for _, p in items),
    )


def equality_law(n: int) -> OverlapLaw:
    """Equality indicator 1(u = v) for a uniform prior on the slice of
    {-1,1}^n with 9n/10 positive coordinates (n divisible by 10)."""
    if n <= 0 or n % 10 != 0:
        raise ValueError(f"need n positive and divisible by 10, got {n}")
    size = math.comb(n, 9 * n // 10)
    pairs = [(1.0, Fraction(1, size)), (0.0, Fraction(size - 1, size))]
    values, probs = _exact_atoms(pairs)
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "equality", "n": n},
        values=values,
        probs=probs,
    )


def atoms_law(values: Sequence[float], probs: Sequence[float]) -> OverlapLaw:
    """Synthetic discrete law from explicit atoms (testing / CLI)."""
    if len(values) != len(probs) or not values:
        raise ValueError("values and probs must be nonempty and of equal length")
    items = sorted(zip((float(v) for v in values), (float(p) for p in probs)))
    return OverlapLaw(
        kind="discrete",
        statistic="scalar",
        descriptor={"kind": "atoms", "values": list(values), "probs": list(probs)},
        values=tuple(v for v, _ in items),
        probs=tuple(p for _, p in items),
    )


def sphere_law(n: int) -> OverlapLaw:
    """<u, v> for u, v uniform on the unit sphere in R^n.

    Equal in law to the first coordinate of a uniform sphere point:
    T = 2X - 1 with X ~ Beta((n-1)/2, (n-1)/2), density proportional to
    (1 - t^2)^{(n-3)/2} on [-1, 1].
    """
    if n < 2:
        raise ValueError(f"sphere law needs n >= 2, got {n}")
    a = 0.5 * (n - 1)
    dist = beta_dist(a, a, loc=-1.0, scale=2.0)

    def sampler(rng: np.random.Generator, count: int) -> np.ndarray:
        return dist.rvs(size=count, random_state=rng)

    return OverlapLaw(
        kind="continuous",
        statistic="scalar",
        descriptor={"kind": "sphere", "n": n},
        _pdf=lambda t: float(dist.pdf(t)),
        _cdf=lambda t: float(dist.cdf(t)),
        _ppf=lambda p: float(dist.ppf(p)),
        support=(-1.0, 1.0),
        _sampler=sampler,
    )


_LAW_BUILDERS = {
    "hypergeometric": lambda d: hypergeometric_law(int(d["n"]), int(d["k"])),
    "signed_sparse": lambda d: signed_sparse_law(int(d["n"]), int(d["k"])),
    "rademacher_mean": lambda d: rademacher_mean_law(int(d["n"])),
    "sphere": lambda d: sphere_law(int(d["n"])),
    "two_point": lambda d: two_point_law(float(d["rho_p"]), tuple(d["values"])),
    "pair_counts": lambda d: pair_counts_law(int(d["n"]), float(d["rho_p"])),
    "equality": lambda d: equality_law(int(d["n"])),
    "atoms": lambda d: atoms_law(d["values"], d["probs"]),
}


def make_law(spec: dict) -> OverlapLaw:
    """Build an OverlapLaw from a prior descriptor (see _LAW_BUILDERS)."""
    try:
        kind = spec["kind"]
    except (TypeError, KeyError):
        raise ValueError("prior descriptor must be a dict with a 'kind' field") from None
    try:
        builder = _LAW_BUILDERS[kind]
    except KeyError:
        raise ValueError(
            f"unknown prior kind {kind!r}; available: {sorted(_LAW_BUILDERS)}"
        ) from None
    return builder(spec)


# ---------------------------------------------------------------------------
# Survival / thresholds / expectations / sampling
# ---------------------------------------------------------------------------


def _apply(transform: Transform, value: Statistic) -> float:
    return float(value) if transform is None else float(transform(value))


def survival(law: OverlapLaw, r: float, transform: Transform = None) -> float:
    """P(g(T) >= r) with g the optional transform (identity by default)."""
    if law.kind == "discrete":
        return math.fsum(p for v, p in law.atoms if _apply(transform, v) >= r)
    lo, hi = law.support
    if transform is None:
        if r <= lo:
            return 1.0
        if r > hi:
            return 0.0
        return 1.0 - law.cdf(r)
    tau = _abs_level(law, transform, r)
    if tau is None:
        return 0.0
    return _abs_survival(law, tau)


def _abs_survival(law: OverlapLaw, tau: float) -> float:
    """P(|T| >= tau) for a continuous law."""
    if tau <= 0.0:
        return 1.0
    hi = max(abs(law.support[0]), abs(law.support[1]))
    if tau > hi:
        return 0.0
    return (1.0 - law.cdf(tau)) + law.cdf(-tau)

def abs_level_for(law: OverlapLaw, transform: Transform, r: float) -> float | None:
    """Public alias of _abs_level: the |t|-boundary of {g(T) >= r}."""
    return _abs_level(law, transform, r)


def _abs_level(law: OverlapLaw, transform: Transform, r: float) -> float | None:
    """Smallest tau >= 0 with g(tau) >= r, for g even and nondecreasing
    in |t| (validated on a grid); None when sup g < r."""
    hi = max(abs(law.support[0]), abs(law.support[1]))
    g = lambda s: _apply(transform, s)
    grid = np.linspace(0.0, hi, 129)
    vals = [g(s) for s in grid]
    if any(v2 < v1 - 1e-12 * max(1.0, abs(v1)) for v1, v2 in zip(vals, vals[1:])):
        raise ValueError("continuous-law transforms must be nondecreasing in |t|")
    for s in (grid[1], hi / 2):
        if abs(g(-s) - g(s)) > 1e-9 * max(1.0, abs(g(s))):
            raise ValueError("continuous-law transforms must be even in t")
    if vals[0] >= r:
        return 0.0
    if vals[-1] < r:
        return None
    lo_s, hi_s = 0.0, hi
    for _ in range(200):
        mid = 0.5 * (lo_s + hi_s)
        if g(mid) >= r:
            hi_s = mid
        else:
            lo_s = mid
    return hi_s


def threshold_sup(law: OverlapLaw, mass: float, transform: Transform = None) -> ThresholdResult:
    """sup { r : P(g(T) >= r) >= mass }, the generalized inverse of the
    survival function of the transformed statistic.

    For discrete laws the sup is attained at an atom of g(T); `exact`
    records whether its tail mass equals `mass` to relative 1e-12.
    """
    if not mass > 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    if mass > 1.0 + _REL_TOL:
        raise ValueError(f"mass must be at most 1, got {mass}")
    if law.kind == "discrete":
        # group atoms by transformed level, then walk tail masses downward
        levels: dict[float, float] = {}
        for v, p in law.atoms:
            g = _apply(transform, v)
            levels[g] = levels.get(g, 0.0) + p
        ordered = sorted(levels)
        tails: list[float] = []
        acc, comp = 0.0, 0.0  # Kahan-compensated tail accumulation
        for r in reversed(ordered):
            y = levels[r] - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
            tails.append(acc)
        tails.reverse()  # tails[i] = P(g(T) >= ordered[i])
        best = None
        for r, s in zip(ordered, tails):
            if _ge(s, mass):
                best = (r, s)
        if best is None:
            # survival at the lowest level is 1 >= mass for mass <= 1
            raise AssertionError("unreachable: survival at min level is 1")
        threshold, achieved = best
        exact = abs(achieved - mass) <= _REL_TOL * max(abs(achieved), abs(mass))
        return ThresholdResult(threshold=threshold, achieved_mass=achieved, exact=exact)

    # Continuous: survival is continuous and strictly decreasing across
    # the support, so the threshold solves survival(r) = mass exactly.
    lo, hi = law.support
    if transform is None:
        lo_r, hi_r = lo, hi
    else:
        lo_r = _apply(transform, 0.0)
        hi_r = max(_apply(transform, lo), _apply(transform, hi))
    f = lambda r: survival(law, r, transform) - mass
    if f(lo_r) < 0.0:
        return ThresholdResult(threshold=lo_r, achieved_mass=survival(law, lo_r, transform), exact=False)
    a, b = lo_r, hi_r
    for _ in range(200):
        mid = 0.5 * (a + b)
        if f(mid) >= 0.0:
            a = mid
        else:
            b = mid
    return ThresholdResult(threshold=a, achieved_mass=mass, exact=True)


class AtomEvaluationError(ValueError):
    """f(atom) was non-finite; carries the offending atom."""

    def __init__(self, atom: Statistic, value: float):
        self.atom = atom
        self.value = value
        super().__init__(f"non-finite integrand value {value} at atom {atom!r}")


def expect(
    law: OverlapLaw,
    f: Callable[[Statistic], float],
    rel_tol: float = 1e-10,
    points: Sequence[float] | None = None,
) -> float:
    """E[f(T)]: exact weighted sum for discrete laws, adaptive quadrature
    (with optional interior break points) for continuous ones."""
    if law.kind == "discrete":
        terms = []
        for v, p in law.atoms:
            y = float(f(v))
            if not math.isfinite(y):
                raise AtomEvaluationError(v, y)
            terms.append(y * p)
        return math.fsum(terms)
    lo, hi = law.support
    integrand = lambda t: f(t) * law.pdf(t)
    value, _ = integrate.quad(
        integrand, lo, hi, epsrel=rel_tol, epsabs=1e-14, limit=400,
        points=[p for p in (points or []) if lo < p < hi] or None,
    )
    return float(value)


def sample(law: OverlapLaw, seed: int, count: int) -> np.ndarray:
    """Seeded statistic draws; deterministic for a fixed (seed, count)."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    if law.kind == "discrete":
        idx = rng.choice(len(law.values), size=count, p=np.asarray(law.probs))
        if law.statistic == "pair_counts":
            out = np.empty(count, dtype=object)
            for i, j in enumerate(idx):
                out[i] = law.values[j]  # keep the triples hashable tuples
            return out
        return np.asarray([law.values[i] for i in idx], dtype=float)
    return np.asarray(law._sampler(rng, count), dtype=float)
