"""Fields sampled on a uniform centered box, plus the discrete calculus used
everywhere else in the package.

The grid covers [-L, L)^dim with N nodes per axis (spacing h = 2L/N, x slowest
axis, C payload order). All whole-space integrals quoted by this package are
truncated to that box; norm helpers below are the single place the truncation
convention lives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import (
    InvalidFieldError,
    NotAGradientError,
    ParameterError,
    RangeError,
    StructuralError,
)


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the centered box [-L, L)^dim, N nodes per axis."""

    dim: int
    extent: float
    points: int
    origin: tuple = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ParameterError(f"dim must be 2 or 3, got {self.dim}")
        if not (self.extent > 0) or not np.isfinite(self.extent):
            raise ParameterError(f"extent must be positive, got {self.extent}")
        if self.points < 4 or self.points % 2 != 0:
            raise ParameterError(f"points must be even and >= 4, got {self.points}")
        origin = self.origin
        if origin is None:
            origin = (0.0,) * self.dim
        origin = tuple(float(c) for c in origin)
        if len(origin) != self.dim:
            raise StructuralError(f"origin has {len(origin)} coordinates for dim {self.dim}")
        object.__setattr__(self, "origin", origin)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.points

    @property
    def shape(self) -> tuple:
        return (self.points,) * self.dim

    @property
    def origin_index(self) -> int:
        # node sitting at the center coordinate on every axis (N even)
        return self.points // 2

    def axis(self, k: int = 0) -> np.ndarray:
        return self.origin[k] - self.extent + self.spacing * np.arange(self.points)

    def coords(self):
        """dim broadcastable coordinate arrays (sparse meshgrid)."""
        axes = [self.axis(k) for k in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij", sparse=True)

    def radii(self) -> np.ndarray:
        """|x| measured from the absolute origin, dense array."""
        c = self.coords()
        return np.sqrt(sum(np.broadcast_to(a * a, self.shape) for a in c))

    def interior(self, ring: int = 1) -> tuple:
        """Slices selecting nodes at least `ring` layers away from the box edge."""
        if ring < 0 or 2 * ring >= self.points:
            raise ParameterError(f"ring {ring} leaves no interior at N={self.points}")
        sl = slice(ring, self.points - ring) if ring else slice(None)
        return (sl,) * self.dim

    def is_centered(self) -> bool:
        return all(c == 0.0 for c in self.origin)


def _require_centered(grid: Grid, what: str):
    if not grid.is_centered():
        raise StructuralError(f"{what} requires a grid centered at the origin")


def _as_payload(grid: Grid, values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != grid.shape:
        raise StructuralError(f"payload shape {arr.shape} does not match grid shape {grid.shape}")
    if not np.isfinite(arr).all():
        raise InvalidFieldError("field payload contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class ScalarField:
    grid: Grid
    values: np.ndarray
    time: float = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_payload(self.grid, self.values))
        if self.time is not None:
            t = float(self.time)
            if not np.isfinite(t):
                raise InvalidFieldError("field time stamp is not finite")
            object.__setattr__(self, "time", t)

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values, self.time)

    def __neg__(self):
        return self.with_values(-self.values)

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise StructuralError("fields live on different grids")


@dataclass(frozen=True)
class VectorField:
    grid: Grid
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.grid.dim:
            raise StructuralError(f"vector field needs {self.grid.dim} components, got {len(comps)}")
        for c in comps:
            if not isinstance(c, ScalarField):
                raise StructuralError("vector components must be ScalarFields")
            if c.grid != self.grid:
                raise StructuralError("vector components live on different grids")
            if c.time != comps[0].time:
                raise StructuralError("vector components carry different time stamps")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_arrays(cls, grid: Grid, arrays, time=None) -> "VectorField":
        return cls(grid, tuple(ScalarField(grid, a, time) for a in arrays))

    @property
    def time(self):
        return self.components[0].time

    def component(self, i: int) -> ScalarField:
        return self.components[i]

    def array(self) -> np.ndarray:
        """(dim, N, ..., N) stacked view of the component payloads."""
        return np.stack([c.values for c in self.components])

    def magnitude(self) -> np.ndarray:
        return np.sqrt(sum(c.values**2 for c in self.components))

    def __neg__(self):
        return VectorField(self.grid, tuple(-c for c in self.components))

    def __add__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, scalar):
        return VectorField(self.grid, tuple(c * scalar for c in self.components))

    __rmul__ = __mul__


@dataclass(frozen=True)
class TensorField:
    grid: Grid
    components: tuple
    symmetric: bool = False

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.components)
        d = self.grid.dim
        if len(rows) != d or any(len(r) != d for r in rows):
            raise StructuralError(f"tensor field needs {d}x{d} components")
        t0 = rows[0][0].time
        for row in rows:
            for c in row:
                if not isinstance(c, ScalarField) or c.grid != self.grid:
                    raise StructuralError("tensor components must be ScalarFields on the same grid")
                if c.time != t0:
                    raise StructuralError("tensor components carry different time stamps")
        if self.symmetric:
            for i in range(d):
                for j in range(i + 1, d):
                    if not np.array_equal(rows[i][j].values, rows[j][i].values):
                        raise StructuralError("tensor marked symmetric has asymmetric payload")
        object.__setattr__(self, "components", rows)

    @classmethod
    def from_arrays(cls, grid: Grid, arrays, time=None, symmetric=False) -> "TensorField":
        rows = tuple(
            tuple(ScalarField(grid, arrays[i][j], time) for j in range(grid.dim))
            for i in range(grid.dim)
        )
        return cls(grid, rows, symmetric)

    @property
    def time(self):
        return self.components[0][0].time

    def component(self, i: int, j: int) -> ScalarField:
        return self.components[i][j]

    def row(self, i: int) -> VectorField:
        return VectorField(self.grid, self.components[i])

    def symmetrized(self) -> "TensorField":
        d = self.grid.dim
        arrays = [
            [0.5 * (self.components[i][j].values + self.components[j][i].values) for j in range(d)]
            for i in range(d)
        ]
        return TensorField.from_arrays(self.grid, arrays, self.time, symmetric=True)

    def __neg__(self):
        rows = tuple(tuple(-c for c in row) for row in self.components)
        return TensorField(self.grid, rows, self.symmetric)

    def __add__(self, other):
        _same_grid(self, other)
        rows = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.components, other.components)
        )
        return TensorField(self.grid, rows, self.symmetric and other.symmetric)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        rows = tuple(tuple(c * scalar for c in row) for row in self.components)
        return TensorField(self.grid, rows, self.symmetric)

    __rmul__ = __mul__


@dataclass(frozen=True)
class TimeSeriesField:
    """Frames of one field kind on a shared grid at strictly increasing times."""

    frames: tuple

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise StructuralError("time series needs at least one frame")
        kind = type(frames[0])
        grid = frames[0].grid
        for f in frames:
            if type(f) is not kind:
                raise StructuralError("time series mixes field kinds")
            if f.grid != grid:
                raise StructuralError("time series frames live on different grids")
            if f.time is None:
                raise StructuralError("time series frames need time stamps")
        t = [f.time for f in frames]
        if any(b <= a for a, b in zip(t, t[1:])):
            raise StructuralError("time series stamps must be strictly increasing")
        object.__setattr__(self, "frames", frames)

    @property
    def grid(self) -> Grid:
        return self.frames[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([f.time for f in self.frames])

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, k):
        return self.frames[k]

    def map(self, fn) -> "TimeSeriesField":
        return TimeSeriesField(tuple(fn(f) for f in self.frames))


# ---------------------------------------------------------------------------
# discrete calculus: second-order central stencils, one-sided closure at the
# box edge (no periodic wrap anywhere)

def _d1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    return np.gradient(values, h, axis=axis, edge_order=2)


def _d2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    a = np.moveaxis(values, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = a[2:] - 2.0 * a[1:-1] + a[:-2]
    out[0] = 2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]
    out[-1] = 2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]
    out /= h * h
    return np.moveaxis(out, 0, axis)


def gradient(f: ScalarField) -> VectorField:
    h = f.grid.spacing
    return VectorField.from_arrays(
        f.grid, [_d1(f.values, h, k) for k in range(f.grid.dim)], f.time
    )


def divergence(v: VectorField) -> ScalarField:
    h = v.grid.spacing
    out = sum(_d1(v.component(i).values, h, i) for i in range(v.grid.dim))
    return ScalarField(v.grid, out, v.time)


def curl(v: VectorField):
    """d=2: scalar rotation; d=3: the usual vector curl."""
    h = v.grid.spacing
    a = [c.values for c in v.components]
    if v.grid.dim == 2:
        return ScalarField(v.grid, _d1(a[1], h, 0) - _d1(a[0], h, 1), v.time)
    cx = _d1(a[2], h, 1) - _d1(a[1], h, 2)
    cy = _d1(a[0], h, 2) - _d1(a[2], h, 0)
    cz = _d1(a[1], h, 0) - _d1(a[0], h, 1)
    return VectorField.from_arrays(v.grid, [cx, cy, cz], v.time)


def laplacian(f: ScalarField) -> ScalarField:
    h = f.grid.spacing
    out = sum(_d2(f.values, h, k) for k in range(f.grid.dim))
    return ScalarField(f.grid, out, f.time)


def mixed_second(f: ScalarField, i: int, j: int) -> np.ndarray:
    """Second derivative d_i d_j, compact 3-point stencil on the diagonal."""
    h = f.grid.spacing
    if i == j:
        return _d2(f.values, h, i)
    return _d1(_d1(f.values, h, i), h, j)


def tensor_divergence(T: TensorField) -> VectorField:
    """Row-wise divergence (div T)_i = sum_j d_j T_ij."""
    h = T.grid.spacing
    d = T.grid.dim
    rows = [
        sum(_d1(T.component(i, j).values, h, j) for j in range(d))
        for i in range(d)
    ]
    return VectorField.from_arrays(T.grid, rows, T.time)


def tensor_source(T: TensorField) -> ScalarField:
    """Double divergence sum_ij d_i d_j T_ij."""
    d = T.grid.dim
    out = sum(mixed_second(T.component(i, j), i, j) for i in range(d) for j in range(d))
    return ScalarField(T.grid, out, T.time)


def outer(u: VectorField, w: VectorField = None) -> TensorField:
    """u tensor w (defaults to u tensor u, symmetric)."""
    if w is None:
        w = u
    _same_grid(u, w)
    d = u.grid.dim
    arrays = [[u.component(i).values * w.component(j).values for j in range(d)] for i in range(d)]
    return TensorField.from_arrays(u.grid, arrays, u.time, symmetric=w is u)


def time_derivative(series: TimeSeriesField) -> TimeSeriesField:
    """Frame-wise d/dt, central in the interior and one-sided at the ends."""
    if len(series) < 3:
        raise StructuralError("time differentiation needs at least 3 frames")
    t = series.times
    first = series.frames[0]
    if isinstance(first, ScalarField):
        stack = np.stack([f.values for f in series.frames])
        dstack = np.gradient(stack, t, axis=0, edge_order=2)
        frames = tuple(
            ScalarField(series.grid, dstack[k], series.frames[k].time) for k in range(len(series))
        )
        return TimeSeriesField(frames)
    if isinstance(first, VectorField):
        d = series.grid.dim
        comps = []
        for i in range(d):
            stack = np.stack([f.component(i).values for f in series.frames])
            comps.append(np.gradient(stack, t, axis=0, edge_order=2))
        frames = tuple(
            VectorField.from_arrays(series.grid, [comps[i][k] for i in range(d)], series.frames[k].time)
            for k in range(len(series))
        )
        return TimeSeriesField(frames)
    raise StructuralError("time derivative expects scalar or vector frames")


# ---------------------------------------------------------------------------
# norms and truncation reporting

def _magnitude(f) -> np.ndarray:
    if isinstance(f, ScalarField):
        return np.abs(f.values)
    if isinstance(f, VectorField):
        return f.magnitude()
    raise StructuralError("norms expect a scalar or vector field")


def weighted_lp_norm(f, p: float, gamma: float) -> float:
    """L^p norm against the weight (1+|x|)^-gamma, truncated to the box.

    The truncation tail for data bounded by the weight class itself is
    O(L^(d-gamma-...)); callers quote it via `weight_tail_bound`.
    """
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    if not gamma >= 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    g = f.grid
    m = _magnitude(f)
    w = (1.0 + g.radii()) ** (-gamma)
    total = float(np.sum(m**p * w)) * g.spacing**g.dim
    return total ** (1.0 / p)


def lp_norm(f, p: float = 2.0) -> float:
    """Plain box L^p norm (cell measure included)."""
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    g = f.grid
    m = _magnitude(f)
    return float(np.sum(m**p) * g.spacing**g.dim) ** (1.0 / p)


def interior_lp_norm(f, p: float = 2.0, ring: int = 1) -> float:
    """Box L^p norm over nodes at least `ring` layers from the edge."""
    g = f.grid
    m = _magnitude(f)[g.interior(ring)]
    return float(np.sum(m**p) * g.spacing**g.dim) ** (1.0 / p)


def interior_max(f, ring: int = 1) -> float:
    g = f.grid
    return float(np.max(_magnitude(f)[g.interior(ring)]))


def weight_tail_bound(f, p: float, gamma: float) -> float:
    """Upper bound on the weighted-norm mass outside the box, assuming the data
    stays below its box maximum times the weight decay already achieved."""
    g = f.grid
    m = _magnitude(f)
    # honest envelope: data outside assumed below its value on the outermost shell
    r = g.extent
    shell = float(np.max(m[_outer_shell_mask(g)]))
    d = g.dim
    surf = 2.0 * np.pi if d == 2 else 4.0 * np.pi
    tail = shell**p * surf * _radial_weight_tail(r, gamma, d)
    return tail ** (1.0 / p)


def _outer_shell_mask(g: Grid) -> np.ndarray:
    mask = np.zeros(g.shape, dtype=bool)
    for k in range(g.dim):
        sl = [slice(None)] * g.dim
        sl[k] = 0
        mask[tuple(sl)] = True
        sl[k] = g.points - 1
        mask[tuple(sl)] = True
    return mask


def _radial_weight_tail(R: float, gamma: float, d: int) -> float:
    """Integral of r^(d-1) (1+r)^-gamma for r > R (closed form when it converges)."""
    if gamma <= d:
        return np.inf
    # (1+r)^(d-1-gamma) envelope, integrated exactly
    return (1.0 + R) ** (d - gamma) / (gamma - d)


# ---------------------------------------------------------------------------
# interpolation and line-integral potential

def _index_coords(grid: Grid, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != grid.dim:
        raise StructuralError(f"points have {pts.shape[-1]} coordinates for dim {grid.dim}")
    idx = np.empty_like(pts)
    for k in range(grid.dim):
        idx[..., k] = (pts[..., k] - (grid.origin[k] - grid.extent)) / grid.spacing
    return idx


def sample_scalar_at(f: ScalarField, points, order: int = 1) -> np.ndarray:
    """Interpolate f at arbitrary points inside the box hull (no extrapolation).

    order=1 is multilinear; order=3 the cubic-spline upgrade.
    """
    idx = _index_coords(f.grid, points)
    n = f.grid.points
    if np.any(idx < -1e-9) or np.any(idx > n - 1 + 1e-9):
        raise RangeError("sample point outside the sampled box hull")
    coords = [np.clip(idx[..., k], 0.0, n - 1) for k in range(f.grid.dim)]
    return ndimage.map_coordinates(f.values, coords, order=order, mode="nearest")


def sample_vector_at(v: VectorField, points, order: int = 1) -> np.ndarray:
    cols = [sample_scalar_at(c, points, order) for c in v.components]
    return np.stack(cols, axis=-1)


def shifted_field(f, offset, order: int = 1, clamp: bool = True):
    """Field of x -> f(x - offset) on the same grid.

    With clamp=True nodes whose pull-back leaves the box are filled with the
    nearest sampled value; callers must restrict to the margin window (see
    galilean module) so no clamped value enters a quoted norm.
    """
    grid = f.grid if not isinstance(f, VectorField) else f.grid
    off = np.asarray(offset, dtype=np.float64)
    if off.shape != (grid.dim,):
        raise StructuralError(f"offset needs {grid.dim} components")
    shift_idx = off / grid.spacing
    if not clamp and np.any(np.abs(shift_idx) > 0):
        raise RangeError("shift without clamping would leave the box")

    def one(sf: ScalarField) -> ScalarField:
        base = np.indices(grid.shape).astype(np.float64)
        coords = [base[k] - shift_idx[k] for k in range(grid.dim)]
        coords = [np.clip(c, 0.0, grid.points - 1) for c in coords]
        vals = ndimage.map_coordinates(sf.values, coords, order=order, mode="nearest")
        return ScalarField(grid, vals, sf.time)

    if isinstance(f, ScalarField):
        return one(f)
    if isinstance(f, VectorField):
        return VectorField(grid, tuple(one(c) for c in f.components))
    raise StructuralError("shifted_field expects a scalar or vector field")


def poincare_potential(X: VectorField, nodes: int = 32, order: int = 1) -> ScalarField:
    """Line-integral potential q(x) = int_0^1 x . X(lambda x) dlambda.

    Gauss-Legendre in lambda (the box is star-shaped around the origin, so
    every sample stays inside). gradient(q) recovers X up to O(h^2) only when
    X is curl-free; callers check that themselves.
    """
    _require_centered(X.grid, "poincare_potential")
    g = X.grid
    lam, wts = np.polynomial.legendre.leggauss(nodes)
    lam = 0.5 * (lam + 1.0)
    wts = 0.5 * wts
    coords = g.coords()
    base = np.indices(g.shape).astype(np.float64)
    i0 = (np.asarray(g.origin) + g.extent) / g.spacing  # index of the coordinate origin
    out = np.zeros(g.shape)
    for m in range(nodes):
        idx = [i0[k] + lam[m] * (base[k] - i0[k]) for k in range(g.dim)]
        acc = np.zeros(g.shape)
        for k in range(g.dim):
            xk = np.broadcast_to(coords[k], g.shape)
            acc += xk * ndimage.map_coordinates(X.component(k).values, idx, order=order, mode="nearest")
        out += wts[m] * acc
    return ScalarField(g, out, X.time)


def curl_sup(v: VectorField, ring: int = 1) -> float:
    """Max magnitude of the discrete curl over the interior window."""
    c = curl(v)
    if isinstance(c, ScalarField):
        return interior_max(c, ring)
    return interior_max(c, ring)


def require_curl_free(v: VectorField, tol: float, ring: int = 1, what: str = "field"):
    scale = max(interior_max(v, ring), 1e-300)
    rel = curl_sup(v, ring) / scale
    if rel > tol:
        raise NotAGradientError(f"{what} has relative curl {rel:.3e} > {tol:.3e}")
