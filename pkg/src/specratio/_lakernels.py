"""Compiled dense linear-algebra kernels (complex LU, Hessenberg QR, Hermitian QL).

Everything here works in place on contiguous complex128 arrays and is wrapped
by the public API in :mod:`specratio.cmatrix`. The kernels are deliberately
loop-based: numba turns them into machine code, and the explicit loops keep
the pivoting/deflation logic auditable.
"""

import numpy as np
from numba import njit

MACHINE_EPS = float(np.finfo(np.float64).eps)


@njit(cache=True)
def lu_factor_inplace(a, piv):
    """Doolittle LU with partial pivoting, PA = LU stored in a.

    Returns (log_abs_det, sign_swaps, zero_pivot_index). log_abs_det is -inf
    when an exact zero pivot occurs; factors are still valid because a zero
    pivot implies the whole remaining column is zero.
    """
    n = a.shape[0]
    log_abs_det = 0.0
    swaps = 0
    zero_pivot = -1
    for k in range(n):
        p = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            v = abs(a[i, k])
            if v > best:
                best = v
                p = i
        if p != k:
            swaps += 1
            piv[k], piv[p] = piv[p], piv[k]
            for j in range(n):
                a[k, j], a[p, j] = a[p, j], a[k, j]
        akk = a[k, k]
        if akk == 0.0:
            if zero_pivot < 0:
                zero_pivot = k
            log_abs_det = -np.inf
            continue
        log_abs_det += np.log(abs(akk))
        for i in range(k + 1, n):
            m = a[i, k] / akk
            a[i, k] = m
            if m != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= m * a[k, j]
    return log_abs_det, swaps, zero_pivot


@njit(cache=True)
def lu_solve_inplace(lu, piv, b, x):
    """Solve LUx = b[piv] for each column of b; lu from lu_factor_inplace."""
    n = lu.shape[0]
    m = b.shape[1]
    for j in range(m):
        for i in range(n):
            x[i, j] = b[piv[i], j]
        # forward substitution, unit lower triangle
        for i in range(1, n):
            s = x[i, j]
            for k in range(i):
                s -= lu[i, k] * x[k, j]
            x[i, j] = s
        # back substitution
        for i in range(n - 1, -1, -1):
            s = x[i, j]
            for k in range(i + 1, n):
                s -= lu[i, k] * x[k, j]
            x[i, j] = s / lu[i, i]


@njit(cache=True)
def hessenberg_inplace(a):
    """Reduce a to upper Hessenberg form by unitary Householder similarity."""
    n = a.shape[0]
    v = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += a[i, k].real * a[i, k].real + a[i, k].imag * a[i, k].imag
        if xnorm2 == 0.0:
            continue
        xnorm = np.sqrt(xnorm2)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] -= alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        # left reflection on rows k+1.., columns k..
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(k + 1, n):
                s += np.conj(v[i]) * a[i, j]
            s *= beta
            for i in range(k + 1, n):
                a[i, j] -= s * v[i]
        # right reflection on columns k+1..
        for i in range(n):
            s = 0.0 + 0.0j
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= beta
            for j in range(k + 1, n):
                a[i, j] -= s * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0 + 0.0j


@njit(cache=True)
def hessenberg_eigvals(h, tol, maxiter):
    """Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR.

    Wilkinson shift, exceptional shift every tenth stalled sweep, deflation
    when a subdiagonal drops below tol * (|h_ii| + |h_jj|). Returns
    (eigs, fail_lo, fail_hi); fail_lo >= 0 marks a block that failed to
    deflate within maxiter sweeps.
    """
    n = h.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    hnorm = 0.0
    for i in range(n):
        for j in range(max(0, i - 1), n):
            hnorm = max(hnorm, abs(h[i, j]))
    ihi = n - 1
    its = 0
    while ihi >= 0:
        l = ihi
        while l > 0:
            thr = tol * (abs(h[l - 1, l - 1]) + abs(h[l, l]))
            if thr == 0.0:
                thr = MACHINE_EPS * hnorm
            if abs(h[l, l - 1]) <= thr:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == ihi:
            eigs[ihi] = h[ihi, ihi]
            ihi -= 1
            its = 0
            continue
        if l == ihi - 1:
            # closed-form 2x2 block
            a = h[l, l]
            b = h[l, ihi]
            c = h[ihi, l]
            d = h[ihi, ihi]
            tr2 = 0.5 * (a + d)
            disc = np.sqrt(tr2 * tr2 - (a * d - b * c))
            eigs[ihi] = tr2 + disc
            eigs[l] = tr2 - disc
            ihi -= 2
            its = 0
            continue
        its += 1
        if its > maxiter:
            return eigs, l, ihi
        if its % 10 == 0:
            sigma = abs(h[ihi, ihi - 1]) + abs(h[ihi - 1, ihi - 2]) + 0.0j
        else:
            a = h[ihi - 1, ihi - 1]
            b = h[ihi - 1, ihi]
            c = h[ihi, ihi - 1]
            d = h[ihi, ihi]
            tr2 = 0.5 * (a + d)
            disc = np.sqrt(tr2 * tr2 - (a * d - b * c))
            r1 = tr2 + disc
            r2 = tr2 - disc
            sigma = r1 if abs(r1 - d) < abs(r2 - d) else r2
        # chase the bulge through the active block
        x = h[l, l] - sigma
        y = h[l + 1, l]
        for k in range(l, ihi):
            ax = abs(x)
            r = np.hypot(ax, abs(y))
            if r == 0.0:
                cr = 1.0
                s = 0.0 + 0.0j
            elif ax == 0.0:
                cr = 0.0
                s = np.conj(y) / abs(y)
            else:
                cr = ax / r
                s = (x / ax) * np.conj(y) / r
            j0 = k - 1 if k - 1 > l else l
            for j in range(j0, ihi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = cr * t1 + s * t2
                h[k + 1, j] = -np.conj(s) * t1 + cr * t2
            i1 = k + 2 if k + 2 < ihi else ihi
            for i in range(l, i1 + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = cr * t1 + np.conj(s) * t2
                h[i, k + 1] = -s * t1 + cr * t2
            if k < ihi - 1:
                x = h[k + 1, k]
                y = h[k + 2, k]
    return eigs, -1, -1


@njit(cache=True)
def hermitian_tridiag(a, d, e):
    """Householder reduction of a Hermitian matrix to real tridiagonal form.

    Fills d (diagonal) and e (subdiagonal moduli). Off-diagonal phases are
    discarded: the unitary diagonal similarity that removes them does not
    change the spectrum. Only the lower triangle of a is referenced.
    """
    n = a.shape[0]
    v = np.empty(n, dtype=np.complex128)
    p = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += a[i, k].real * a[i, k].real + a[i, k].imag * a[i, k].imag
        if xnorm2 == 0.0:
            continue
        xnorm = np.sqrt(xnorm2)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] -= alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        # rank-2 Hermitian update of the trailing block: A -= v w^H + w v^H
        for i in range(k + 1, n):
            s = 0.0 + 0.0j
            for j in range(k + 1, i + 1):
                s += a[i, j] * v[j]
            for j in range(i + 1, n):
                s += np.conj(a[j, i]) * v[j]
            p[i] = beta * s
        kv = 0.0 + 0.0j
        for i in range(k + 1, n):
            kv += np.conj(v[i]) * p[i]
        kv *= 0.5 * beta
        for i in range(k + 1, n):
            p[i] -= kv * v[i]
        for i in range(k + 1, n):
            for j in range(k + 1, i + 1):
                a[i, j] -= v[i] * np.conj(p[j]) + p[i] * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0 + 0.0j
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        e[i] = abs(a[i + 1, i])


@njit(cache=True)
def tridiag_eigvals(d, e, maxiter):
    """Eigenvalues of a real symmetric tridiagonal matrix by implicit QL.

    d: diagonal (overwritten with the eigenvalues, unsorted);
    e: subdiagonal, length n with a trailing scratch slot.
    Returns the index of a non-converged row, or -1 on success.
    """
    n = d.shape[0]
    e[n - 1] = 0.0
    for l in range(n):
        its = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= MACHINE_EPS * dd:
                    break
                m += 1
            if m == l:
                break
            its += 1
            if its > maxiter:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            sg = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sg)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1
