"""Executable form of the lattice discretization and its coupled bit fields.

Point patterns are projected onto occupied cells of a lattice with spacing
epsilon. On a finite window of sites the coupled construction draws one
Bernoulli bit T per site and one bit U per directed site pair within range t,
then assembles V (a site keeps its T bit only if every outgoing U bit is set)
and W (a site is hit if any incoming U bit is set). V sites are independent
Bernoulli with the smaller occupancy parameter; W sites are independent of
the T field and carry the coupled parameter q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bounds import delta_count
from .errors import ResourceLimitError
from .pointprocess import PointPattern
from .seeding import derived_rng

# total U-bit budget: Delta * window sites
MAX_FIELD_BITS = 200_000_000


class DiscretizedSites(NamedTuple):
    sites: np.ndarray        # unique integer site coordinates, lexicographically sorted
    truncated: bool          # True when epsilon does not tile the region side


def discretize(pattern: PointPattern, epsilon: float) -> DiscretizedSites:
    """Occupied lattice sites: z is occupied iff some point lies in
    z*eps + [0, eps)^d (half-open cell convention)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    cells_per_axis = pattern.region.side / epsilon
    truncated = abs(cells_per_axis - round(cells_per_axis)) > 1e-9
    if len(pattern) == 0:
        return DiscretizedSites(np.empty((0, pattern.region.dim), dtype=np.int64), truncated)
    sites = np.unique(np.floor(pattern.points / epsilon).astype(np.int64), axis=0)
    return DiscretizedSites(sites, truncated)


def ball_offsets(t: float, epsilon: float) -> np.ndarray:
    """Nonzero integer offsets o with ||o * epsilon|| <= t, for d = 2."""
    if t <= 0 or epsilon <= 0:
        raise ValueError("t and epsilon must be positive")
    rho2 = (t / epsilon) ** 2
    m = int(math.floor(math.sqrt(rho2)))
    while (m + 1) * (m + 1) <= rho2:
        m += 1
    span = np.arange(-m, m + 1)
    ox, oy = np.meshgrid(span, span, indexing="ij")
    mask = (ox * ox + oy * oy <= rho2) & ~((ox == 0) & (oy == 0))
    return np.stack([ox[mask], oy[mask]], axis=1)


def site_related(u, v, t: float, epsilon: float) -> bool:
    """Whether some lattice site lies within t of both u and v.

    u and v are integer site coordinates; the search scans the full t-ball
    of u, so the relation holds exactly when the balls intersect on the
    lattice (in particular always when u == v, never when ||u-v|| > 2t).
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    rho2 = (t / epsilon) ** 2
    m = int(math.floor(math.sqrt(rho2)))
    while (m + 1) * (m + 1) <= rho2:
        m += 1
    span = np.arange(-m, m + 1)
    grids = np.meshgrid(*([span] * u.size), indexing="ij")
    w = np.stack([g.ravel() for g in grids], axis=1) + u
    near_u = np.sum((w - u) ** 2, axis=1) <= rho2
    near_v = np.sum((w - v) ** 2, axis=1) <= rho2
    return bool(np.any(near_u & near_v))


@dataclass(frozen=True)
class SiteField:
    """One sampled window of the coupled bit fields.

    U bits are indexed by (offset j, source site u) and stand for the
    directed pair (u, u + offset_j); opposite directions carry independent
    bits. W is assembled from in-window sources only, so sites within the
    ball radius of the boundary see a truncated product and are excluded
    from the interior mask used for marginal statistics.
    """

    window: tuple
    epsilon: float
    t: float
    p_lambda: float
    p_nu: float
    seed: int
    offsets: np.ndarray
    delta_sites: int
    T: np.ndarray
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    interior: np.ndarray


def sample_coupled_fields(window, epsilon: float, t: float, p_lambda: float,
                          p_nu: float, seed: int, path: tuple = ()) -> SiteField:
    """Draw one coupled field realization on a finite window (d = 2).

    T ~ Bernoulli(p_lambda) per site and U ~ Bernoulli((p_nu/p_lambda)^(1/Delta))
    per directed in-range pair, all independent; V and W are their defining
    products. Requires 0 < p_nu <= p_lambda <= 1 and t >= epsilon.
    """
    window = tuple(int(w) for w in window)
    if len(window) != 2 or any(w < 1 for w in window):
        raise ValueError("window must give positive extents for two axes")
    if not 0 < p_nu <= p_lambda <= 1:
        raise ValueError("need 0 < p_nu <= p_lambda <= 1")
    offsets = ball_offsets(t, epsilon)
    if offsets.shape[0] == 0:
        raise ValueError("t must be at least epsilon so the site ball is nonempty")
    Delta = delta_count(t, epsilon, 2)
    assert Delta == offsets.shape[0]
    n_sites = window[0] * window[1]
    if Delta * n_sites > MAX_FIELD_BITS:
        raise ResourceLimitError("field exceeds the U-bit budget")
    margin = int(math.ceil(t / epsilon))
    if window[0] <= 2 * margin or window[1] <= 2 * margin:
        raise ValueError("window too small: no interior sites beyond the ball radius")

    rng = derived_rng(seed, *path)
    u_param = (p_nu / p_lambda) ** (1.0 / Delta)
    T = rng.random(window) < p_lambda
    U = rng.random((Delta, *window)) < u_param
    V = T & U.all(axis=0)
    W = np.zeros(window, dtype=bool)
    for j, (ox, oy) in enumerate(offsets):
        src = _shifted_view(U[j], ox, oy)
        if src is not None:
            dst_slice, src_slice = src
            W[dst_slice] |= U[j][src_slice]
    interior = np.zeros(window, dtype=bool)
    interior[margin:window[0] - margin, margin:window[1] - margin] = True
    return SiteField(window=window, epsilon=float(epsilon), t=float(t),
                     p_lambda=float(p_lambda), p_nu=float(p_nu), seed=int(seed),
                     offsets=offsets, delta_sites=Delta, T=T, U=U, V=V, W=W,
                     interior=interior)


def _shifted_view(plane, ox, oy):
    """Slices aligning W[v] with U[source = v - offset]; None if empty."""
    nx, ny = plane.shape
    if abs(ox) >= nx or abs(oy) >= ny:
        return None

    def axis_slices(shift, n):
        if shift >= 0:
            return slice(shift, n), slice(0, n - shift)
        return slice(0, n + shift), slice(-shift, n)

    dx, sx = axis_slices(ox, nx)
    dy, sy = axis_slices(oy, ny)
    return (dx, dy), (sx, sy)


def implication_holds(field: SiteField) -> bool:
    """Deterministic mechanism check: V_u = 1 forces W_v = 1 for every site v
    with 0 < ||v - u|| <= t that lies in the window."""
    for ox, oy in field.offsets:
        src = _shifted_view(field.V, ox, oy)
        if src is None:
            continue
        dst_slice, src_slice = src
        if np.any(field.V[src_slice] & ~field.W[dst_slice]):
            return False
    return True


def field_csv_rows(field: SiteField, field_index: int = 0):
    """Site dump rows: field, u1, u2, T, V, W, interior."""
    header = ["field", "u1", "u2", "T", "V", "W", "interior"]
    nx, ny = field.window
    rows = []
    for ix in range(nx):
        for iy in range(ny):
            rows.append([field_index, ix, iy, int(field.T[ix, iy]),
                         int(field.V[ix, iy]), int(field.W[ix, iy]),
                         int(field.interior[ix, iy])])
    return header, rows
