"""Pure-numpy versions of the compiled kernels in ``_ckernels.pyx``.

Same signatures, same algorithms; used when the extension is not built or
``CORRPH_PURE_PYTHON=1`` is set.
"""
import numpy as np

_FACTOR = 1.12837916709551257388  # 2/sqrt(pi)


def faddeeva(z):
    """Elementwise w(z) = exp(-z**2) erfc(-i z) for a complex array."""
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    z = z.ravel()
    xi, yi = z.real, z.imag
    xabs, yabs = np.abs(xi), np.abs(yi)
    x, y = xabs / 6.3, yabs / 4.4
    qrho = x * x + y * y
    xquad = xabs * xabs - yabs * yabs
    yquad = 2.0 * xabs * yabs
    small = qrho < 0.085264

    u = np.zeros(z.size)
    v = np.zeros(z.size)
    u2 = np.zeros(z.size)
    v2 = np.zeros(z.size)

    # power series branch
    if small.any():
        s = np.flatnonzero(small)
        q = (1.0 - 0.85 * y[s]) * np.sqrt(qrho[s])
        n = np.rint(6.0 + 72.0 * q).astype(int)
        xq, yq = xquad[s], yquad[s]
        j = 2 * n + 1
        xsum = 1.0 / j
        ysum = np.zeros(s.size)
        for i in range(n.max(), 0, -1):
            act = i <= n
            j = np.where(act, j - 2, j)
            xaux = (xsum * xq - ysum * yq) / i
            ysum_new = (xsum * yq + ysum * xq) / i
            xsum = np.where(act, xaux + 1.0 / j, xsum)
            ysum = np.where(act, ysum_new, ysum)
        u1 = -_FACTOR * (xsum * yabs[s] + ysum * xabs[s]) + 1.0
        v1 = _FACTOR * (xsum * xabs[s] - ysum * yabs[s])
        daux = np.exp(-xq)
        u2[s] = daux * np.cos(yq)
        v2[s] = -daux * np.sin(yq)
        u[s] = u1 * u2[s] - v1 * v2[s]
        v[s] = u1 * v2[s] + v1 * u2[s]

    # continued fraction branch
    if (~small).any():
        s = np.flatnonzero(~small)
        q = qrho[s]
        far = q > 1.0
        h = np.zeros(s.size)
        kapn = np.zeros(s.size, dtype=int)
        nu = np.zeros(s.size, dtype=int)
        qf = np.sqrt(q[far])
        nu[far] = (3.0 + 1442.0 / (26.0 * qf + 77.0)).astype(int)
        near = ~far
        qn = (1.0 - y[s][near]) * np.sqrt(1.0 - q[near])
        h[near] = 1.88 * qn
        kapn[near] = np.rint(7.0 + 34.0 * qn).astype(int)
        nu[near] = np.rint(16.0 + 26.0 * qn).astype(int)
        h2 = 2.0 * h
        use_h = h > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            qlam = np.where(use_h, h2 ** kapn, 0.0)
        ya, xa = yabs[s], xabs[s]
        rx = np.zeros(s.size)
        ry = np.zeros(s.size)
        sx = np.zeros(s.size)
        sy = np.zeros(s.size)
        for n in range(nu.max(), -1, -1):
            act = n <= nu
            tx = ya + h + (n + 1) * rx
            ty = xa - (n + 1) * ry
            c = 0.5 / (tx * tx + ty * ty)
            rx = np.where(act, c * tx, rx)
            ry = np.where(act, c * ty, ry)
            upd = act & use_h & (n <= kapn)
            if upd.any():
                tx2 = qlam + sx
                sx_new = rx * tx2 - ry * sy
                sy_new = ry * tx2 + rx * sy
                sx = np.where(upd, sx_new, sx)
                sy = np.where(upd, sy_new, sy)
                with np.errstate(invalid="ignore"):
                    qlam = np.where(upd, qlam / np.where(use_h, h2, 1.0), qlam)
        uu = np.where(use_h, _FACTOR * sx, _FACTOR * rx)
        vv = np.where(use_h, _FACTOR * sy, _FACTOR * ry)
        uu = np.where(ya == 0.0, np.exp(-xa * xa), uu)
        u[s] = uu
        v[s] = vv

    lower = yi < 0.0
    if lower.any():
        ls = lower & ~small
        with np.errstate(over="ignore", invalid="ignore"):
            w1 = 2.0 * np.exp(-xquad[ls])
            u2[ls] = w1 * np.cos(yquad[ls])
            v2[ls] = -w1 * np.sin(yquad[ls])
        lsm = lower & small
        u2[lsm] *= 2.0
        v2[lsm] *= 2.0
        u = np.where(lower, u2 - u, u)
        v = np.where(lower, v2 - v, v)
        v = np.where(lower & (xi > 0.0), -v, v)
    v = np.where(~lower & (xi < 0.0), -v, v)
    return (u + 1j * v).reshape(shape)


def ph_sums(bit_generator, counts, init_cum, jump_cum, rates):
    """Sum ``counts[i]`` independent phase-type draws for every ``i``.

    Walks all embedded jump chains in lockstep; see ``_ckernels.ph_sums``
    for the encoding of ``init_cum`` and ``jump_cum``.
    """
    gen = np.random.Generator(bit_generator)
    counts = np.asarray(counts, dtype=np.int64)
    nphase = rates.shape[0]
    total = np.zeros(counts.size)
    remaining = counts.copy()
    state = np.full(counts.size, nphase)  # nphase == "between claims"

    def start(idx):
        r = gen.random(idx.size)
        return np.minimum((r[:, None] >= init_cum[None, :]).sum(axis=1), nphase)

    idle = (state == nphase) & (remaining > 0)
    while idle.any():
        idx = np.flatnonzero(idle)
        state[idx] = start(idx)
        remaining[idx] -= 1
        idle = (state == nphase) & (remaining > 0)
    active = np.flatnonzero(state < nphase)
    while active.size:
        st = state[active]
        total[active] += gen.standard_exponential(active.size) / rates[st]
        r = gen.random(active.size)
        nxt = np.minimum((r[:, None] >= jump_cum[st]).sum(axis=1), nphase)
        state[active] = nxt
        idle = (state == nphase) & (remaining > 0)
        while idle.any():
            idx = np.flatnonzero(idle)
            state[idx] = start(idx)
            remaining[idx] -= 1
            idle = (state == nphase) & (remaining > 0)
        active = np.flatnonzero(state < nphase)
    return total
