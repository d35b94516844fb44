"""Hot numerical kernels with a numba path and a pure-numpy fallback.

Every kernel is written once, in a style numba can compile. The field
formulas use ``np.*`` so that, uncompiled, they broadcast over arrays (the
numpy fallback) and, compiled, they run as scalar code inside loops.

Wave classes are passed around as small integers (1..4) together with the
scalars ``th0, th1, a, lam, eps``; see :class:`wavescope.wave_model.WaveParameters`.
Which implementation the public names point to is decided by
``WAVESCOPE_DISABLE_NUMBA`` (see :mod:`wavescope._accel`). Both variants stay
importable as ``*_numba`` / ``*_numpy`` for tests and the benchmark.
"""

import types

import numpy as np

from . import _accel

# ---------------------------------------------------------------------------
# field formulas
# ---------------------------------------------------------------------------


def background_current(cls, th0, a, lam, y):
    s = th0 * (y - 1.0)
    if cls == 4:
        return a * np.sinh(s) + lam * np.cosh(s)
    return a * np.sin(s + lam)


def background_current_dy(cls, th0, a, lam, y):
    s = th0 * (y - 1.0)
    if cls == 4:
        return th0 * (a * np.cosh(s) + lam * np.sinh(s))
    return a * th0 * np.cos(s + lam)


def background_antiderivative(cls, th0, a, lam, y):
    """Integral of the background current from the bed to ``y``."""
    s = th0 * (y - 1.0)
    if cls == 4:
        return (a * (np.cosh(s) - np.cosh(th0)) + lam * (np.sinh(s) + np.sinh(th0))) / th0
    return a * (np.cos(lam - th0) - np.cos(s + lam)) / th0


def generator(cls, th1, y):
    if cls == 1:
        return np.sin(th1 * y)
    if cls == 2:
        return y * 1.0
    return np.sinh(th1 * y)


def generator_dy(cls, th1, y):
    if cls == 1:
        return th1 * np.cos(th1 * y)
    if cls == 2:
        return y * 0.0 + 1.0
    return th1 * np.cosh(th1 * y)


def generator_dyy(cls, th1, y):
    if cls == 1:
        return -th1 * th1 * np.sin(th1 * y)
    if cls == 2:
        return y * 0.0
    return th1 * th1 * np.sinh(th1 * y)


def velocity(cls, th0, th1, a, lam, eps, x, y):
    u = background_current(cls, th0, a, lam, y) + eps * np.cos(x) * generator_dy(cls, th1, y)
    v = eps * np.sin(x) * generator(cls, th1, y)
    return u, v


def hamiltonian(cls, th0, th1, a, lam, eps, x, y):
    return eps * np.cos(x) * generator(cls, th1, y) + background_antiderivative(cls, th0, a, lam, y)


def hessian(cls, th0, th1, a, lam, eps, x, y):
    """Second derivatives (H_XX, H_XY, H_YY) of the Hamiltonian."""
    hxx = -eps * np.cos(x) * generator(cls, th1, y)
    hxy = -eps * np.sin(x) * generator_dy(cls, th1, y)
    hyy = eps * np.cos(x) * generator_dyy(cls, th1, y) + background_current_dy(cls, th0, a, lam, y)
    return hxx, hxy, hyy


# ---------------------------------------------------------------------------
# grid evaluation
# ---------------------------------------------------------------------------


def _hamiltonian_grid_loop(cls, th0, th1, a, lam, eps, xs, ys):
    # H is separable: eps cos(x) * G(y) + A(y); same operation order as the broadcast path
    ex = eps * np.cos(xs)
    g = generator(cls, th1, ys)
    aa = background_antiderivative(cls, th0, a, lam, ys)
    out = np.empty((ys.shape[0], xs.shape[0]))
    for j in range(ys.shape[0]):
        for i in range(xs.shape[0]):
            out[j, i] = ex[i] * g[j] + aa[j]
    return out


def _speed_grid_loop(cls, th0, th1, a, lam, eps, xs, ys):
    ec = eps * np.cos(xs)
    es = eps * np.sin(xs)
    g = generator(cls, th1, ys)
    dg = generator_dy(cls, th1, ys)
    u0 = background_current(cls, th0, a, lam, ys)
    out = np.empty((ys.shape[0], xs.shape[0]))
    for j in range(ys.shape[0]):
        for i in range(xs.shape[0]):
            u = u0[j] + ec[i] * dg[j]
            v = es[i] * g[j]
            out[j, i] = np.sqrt(u * u + v * v)
    return out


def hamiltonian_grid_numpy(cls, th0, th1, a, lam, eps, xs, ys):
    return hamiltonian(cls, th0, th1, a, lam, eps, xs[None, :], ys[:, None])


def speed_grid_numpy(cls, th0, th1, a, lam, eps, xs, ys):
    u, v = velocity(cls, th0, th1, a, lam, eps, xs[None, :], ys[:, None])
    return np.sqrt(u * u + v * v)


# ---------------------------------------------------------------------------
# marching squares
# ---------------------------------------------------------------------------

# Cell corners: c0=(iy,ix) c1=(iy,ix+1) c2=(iy+1,ix+1) c3=(iy+1,ix).
# Edges: e0=c0-c1, e1=c1-c2, e2=c3-c2, e3=c0-c3.
# Case bit k is set when corner k lies above the level.
# SEGMENT_TABLE[case, center_above, slot] = (edge_a, edge_b), -1 when unused.


def _build_segment_table():
    table = -np.ones((16, 2, 2, 2), dtype=np.int64)
    crosses = ((0, 1), (1, 2), (3, 2), (0, 3))
    for case in range(16):
        bits = [(case >> k) & 1 for k in range(4)]
        edges = [e for e, (p, q) in enumerate(crosses) if bits[p] != bits[q]]
        for center in (0, 1):
            if len(edges) == 2:
                table[case, center, 0] = edges
            elif len(edges) == 4:
                # saddle cell: the corners sharing the center's side stay connected
                if (case == 5) == bool(center):
                    pairs = ((0, 1), (2, 3))  # cut off c1 and c3
                else:
                    pairs = ((3, 0), (1, 2))  # cut off c0 and c2
                table[case, center, 0] = pairs[0]
                table[case, center, 1] = pairs[1]
    return table


SEGMENT_TABLE = _build_segment_table()


def _edge_point(f, iy, ix, e, level, nx):
    """Crossing on edge ``e`` of cell (iy, ix): (x_index, y_index, edge_id)."""
    if e == 0:
        fa = f[iy, ix]
        fb = f[iy, ix + 1]
        return ix + (level - fa) / (fb - fa), iy * 1.0, 2 * (iy * nx + ix)
    if e == 1:
        fa = f[iy, ix + 1]
        fb = f[iy + 1, ix + 1]
        return ix + 1.0, iy + (level - fa) / (fb - fa), 2 * (iy * nx + ix + 1) + 1
    if e == 2:
        fa = f[iy + 1, ix]
        fb = f[iy + 1, ix + 1]
        return ix + (level - fa) / (fb - fa), iy + 1.0, 2 * ((iy + 1) * nx + ix)
    fa = f[iy, ix]
    fb = f[iy + 1, ix]
    return ix * 1.0, iy + (level - fa) / (fb - fa), 2 * (iy * nx + ix) + 1


def _contour_segments_loop(f, level, table):
    ny, nx = f.shape
    cap = 2 * (ny - 1) * (nx - 1)
    ids = np.empty((cap, 2), dtype=np.int64)
    pts = np.empty((cap, 4))
    m = 0
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            f0 = f[iy, ix]
            f1 = f[iy, ix + 1]
            f2 = f[iy + 1, ix + 1]
            f3 = f[iy + 1, ix]
            case = (f0 > level) | ((f1 > level) << 1) | ((f2 > level) << 2) | ((f3 > level) << 3)
            if case == 0 or case == 15:
                continue
            center = 1 if 0.25 * (f0 + f1 + f2 + f3) > level else 0
            for slot in range(2):
                ea = table[case, center, slot, 0]
                if ea < 0:
                    continue
                eb = table[case, center, slot, 1]
                xa, ya, ida = _edge_point(f, iy, ix, ea, level, nx)
                xb, yb, idb = _edge_point(f, iy, ix, eb, level, nx)
                ids[m, 0] = ida
                ids[m, 1] = idb
                pts[m, 0] = xa
                pts[m, 1] = ya
                pts[m, 2] = xb
                pts[m, 3] = yb
                m += 1
    return ids[:m].copy(), pts[:m].copy()


def contour_segments_numpy(f, level, table=SEGMENT_TABLE):
    """Vectorized twin of the loop kernel; same segment order, same bits."""
    ny, nx = f.shape
    f0 = f[:-1, :-1]
    f1 = f[:-1, 1:]
    f2 = f[1:, 1:]
    f3 = f[1:, :-1]
    case = (
        (f0 > level).astype(np.int64)
        | ((f1 > level).astype(np.int64) << 1)
        | ((f2 > level).astype(np.int64) << 2)
        | ((f3 > level).astype(np.int64) << 3)
    ).ravel()
    center = (0.25 * (f0 + f1 + f2 + f3) > level).astype(np.int64).ravel()
    iy, ix = np.divmod(np.arange((ny - 1) * (nx - 1), dtype=np.int64), nx - 1)

    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = ((level - f0) / (f1 - f0)).ravel()
        t1 = ((level - f1) / (f2 - f1)).ravel()
        t2 = ((level - f3) / (f2 - f3)).ravel()
        t3 = ((level - f0) / (f3 - f0)).ravel()
    fx = ix.astype(float)
    fy = iy.astype(float)
    ex = np.stack([fx + t0, fx + 1.0, fx + t2, fx])
    ey = np.stack([fy, fy + t1, fy + 1.0, fy + t3])
    eid = np.stack([
        2 * (iy * nx + ix),
        2 * (iy * nx + ix + 1) + 1,
        2 * ((iy + 1) * nx + ix),
        2 * (iy * nx + ix) + 1,
    ])

    slots = table[case, center]  # (ncells, 2 slots, 2 ends)
    valid = slots[:, :, 0] >= 0
    cell = np.broadcast_to(np.arange(case.size)[:, None], valid.shape)[valid]
    ea = slots[:, :, 0][valid]
    eb = slots[:, :, 1][valid]
    ids = np.stack([eid[ea, cell], eid[eb, cell]], axis=1)
    pts = np.stack([ex[ea, cell], ey[ea, cell], ex[eb, cell], ey[eb, cell]], axis=1)
    return ids, pts


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) streamline integration
# ---------------------------------------------------------------------------

DT_MIN = 1e-12

STATUS_OK = 0
STATUS_CLOSED = 1
STATUS_UNDERFLOW = 2
STATUS_MAX_STEPS = 3
STATUS_LEFT_WINDOW = 4

# fmt: off
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# fmt: on

DP45_A = (
    (),
    (_A21,),
    (_A31, _A32),
    (_A41, _A42, _A43),
    (_A51, _A52, _A53, _A54),
    (_A61, _A62, _A63, _A64, _A65),
    (_B1, 0.0, _B3, _B4, _B5, _B6),
)
DP45_B = (_B1, 0.0, _B3, _B4, _B5, _B6, 0.0)
DP45_E = (_E1, 0.0, _E3, _E4, _E5, _E6, _E7)


def next_dt(dt, err, tol):
    """Step-size proposal after an accepted step, clipped to [dt/10, 5 dt]."""
    if err <= 0.0:
        return 5.0 * dt
    fac = 0.9 * (tol / err) ** 0.2
    if fac > 5.0:
        fac = 5.0
    elif fac < 0.1:
        fac = 0.1
    return dt * fac


def _dp45_step(cls, th0, th1, a, lam, eps, x, y, h):
    """One DP5(4) step of (X', Y') = (U, V): (x_new, y_new, error)."""
    k1x, k1y = velocity(cls, th0, th1, a, lam, eps, x, y)
    k2x, k2y = velocity(cls, th0, th1, a, lam, eps, x + h * _A21 * k1x, y + h * _A21 * k1y)
    k3x, k3y = velocity(cls, th0, th1, a, lam, eps,
                        x + h * (_A31 * k1x + _A32 * k2x),
                        y + h * (_A31 * k1y + _A32 * k2y))
    k4x, k4y = velocity(cls, th0, th1, a, lam, eps,
                        x + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x),
                        y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y))
    k5x, k5y = velocity(cls, th0, th1, a, lam, eps,
                        x + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x),
                        y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y))
    k6x, k6y = velocity(cls, th0, th1, a, lam, eps,
                        x + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x),
                        y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y))
    xn = x + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
    yn = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
    k7x, k7y = velocity(cls, th0, th1, a, lam, eps, xn, yn)
    errx = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
    erry = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
    return xn, yn, max(abs(errx), abs(erry))


def _land_on_section(cls, th0, th1, a, lam, eps, x, y, h, use_x, c0, direction):
    """Shrink a step from (x, y) so it ends on the section coord = c0."""
    lo = 0.0
    hi = h
    xs = x
    ys = y
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        xm, ym, _e = _dp45_step(cls, th0, th1, a, lam, eps, x, y, mid)
        s = ((xm if use_x else ym) - c0) * direction
        xs = xm
        ys = ym
        if s < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * (1.0 + h):
            break
    return xs, ys, hi


def _streamline_loop(cls, th0, th1, a, lam, eps, x0, y0, t_end, tol, h_scale,
                     dt0, dt_max, max_steps, return_tol, stop_on_return):
    pts = np.empty((max_steps + 2, 2))
    ts = np.empty(max_steps + 2)
    pts[0, 0] = x0
    pts[0, 1] = y0
    ts[0] = 0.0
    n = 1
    h0 = hamiltonian(cls, th0, th1, a, lam, eps, x0, y0)
    u0, v0 = velocity(cls, th0, th1, a, lam, eps, x0, y0)
    # Poincare section through the start, transversal to the flow.
    use_x = abs(u0) >= abs(v0)
    vel0 = u0 if use_x else v0
    direction = 1.0 if vel0 >= 0.0 else -1.0
    c0 = x0 if use_x else y0
    other0 = y0 if use_x else x0
    section_ok = abs(vel0) > 0.0

    x = x0
    y = y0
    hx = h0
    t = 0.0
    dt = dt0
    status = STATUS_OK
    closed = False
    max_drift = 0.0
    steps = 0
    # window top; above it the perturbation grows without bound for W4
    y_cap = 1.0 + 2.0 * eps + 1e-12
    while t < t_end:
        if steps >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if dt < DT_MIN:
            status = STATUS_UNDERFLOW
            break
        h = min(dt, t_end - t, dt_max)
        xn, yn, err = _dp45_step(cls, th0, th1, a, lam, eps, x, y, h)
        if err > tol:
            dt = 0.5 * h
            continue
        if yn > y_cap and yn > y:
            status = STATUS_LEFT_WINDOW
            break
        hn = hamiltonian(cls, th0, th1, a, lam, eps, xn, yn)
        if abs(hn - hx) > tol * h_scale:
            # conservation is the invariant we care about; treat drift as error
            dt = 0.5 * h
            continue
        steps += 1
        s_prev = ((x if use_x else y) - c0) * direction
        s_new = ((xn if use_x else yn) - c0) * direction
        if section_ok and s_prev < 0.0 and s_new >= 0.0:
            xl, yl, hl = _land_on_section(cls, th0, th1, a, lam, eps, x, y, h,
                                          use_x, c0, direction)
            other = yl if use_x else xl
            if abs(other - other0) < return_tol:
                closed = True
                if stop_on_return:
                    pts[n, 0] = xl
                    pts[n, 1] = yl
                    ts[n] = t + hl
                    n += 1
                    hl_val = hamiltonian(cls, th0, th1, a, lam, eps, xl, yl)
                    d = abs(hl_val - h0) / h_scale
                    if d > max_drift:
                        max_drift = d
                    status = STATUS_CLOSED
                    break
        x = xn
        y = yn
        hx = hn
        t += h
        d = abs(hn - h0) / h_scale
        if d > max_drift:
            max_drift = d
        pts[n, 0] = x
        pts[n, 1] = y
        ts[n] = t
        n += 1
        dt = next_dt(h, err, tol)
    return pts[:n].copy(), ts[:n].copy(), status, closed, max_drift


# ---------------------------------------------------------------------------
# backend wiring
# ---------------------------------------------------------------------------

_FAMILY = (
    background_current,
    background_current_dy,
    background_antiderivative,
    generator,
    generator_dy,
    generator_dyy,
    velocity,
    hamiltonian,
    hessian,
    next_dt,
    _dp45_step,
    _land_on_section,
    _streamline_loop,
    _hamiltonian_grid_loop,
    _speed_grid_loop,
    _edge_point,
    _contour_segments_loop,
)


def _compile_family():
    """njit the kernel family inside a private namespace.

    The copies resolve each other's names to compiled dispatchers while the
    module-level originals keep calling plain Python.
    """
    if not _accel.NUMBA_AVAILABLE:
        return None
    ns = dict(globals())
    compiled = {}
    for func in _FAMILY:
        clone = types.FunctionType(func.__code__, ns, func.__name__, func.__defaults__)
        clone.__module__ = func.__module__
        clone.__qualname__ = func.__qualname__
        compiled[func.__name__] = _accel.njit(clone)
    ns.update(compiled)
    return types.SimpleNamespace(**compiled)


_nb = _compile_family()

if _nb is not None:
    hamiltonian_grid_numba = _nb._hamiltonian_grid_loop
    speed_grid_numba = _nb._speed_grid_loop
    velocity_numba = _nb.velocity
    hessian_numba = _nb.hessian

    def contour_segments_numba(f, level, table=SEGMENT_TABLE):
        return _nb._contour_segments_loop(np.ascontiguousarray(f, dtype=np.float64), float(level), table)

    def streamline_numba(*args):
        return _nb._streamline_loop(*args)
else:  # pragma: no cover
    hamiltonian_grid_numba = speed_grid_numba = velocity_numba = hessian_numba = None
    contour_segments_numba = streamline_numba = None


def streamline_python(*args):
    return _streamline_loop(*args)


if _accel.USE_NUMBA:
    hamiltonian_grid = hamiltonian_grid_numba
    speed_grid = speed_grid_numba
    contour_segments = contour_segments_numba
    streamline = streamline_numba
else:
    hamiltonian_grid = hamiltonian_grid_numpy
    speed_grid = speed_grid_numpy
    contour_segments = contour_segments_numpy
    streamline = streamline_python
