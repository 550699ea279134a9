# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lift scanner; mirrors _scan_py.scan_block."""

DEF MAXDEG = 16


cdef inline long _mod(long a, long p) nogil:
    a %= p
    return a + p if a < 0 else a


cdef long _powmod(long b, long e, long p) nogil:
    cdef long r = 1
    b = _mod(b, p)
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


cdef int _deg(long* a, int n) nogil:
    while n >= 0 and a[n] == 0:
        n -= 1
    return n


cdef int _polymod(long* a, int da, long* b, int db, long p) nogil:
    """a <- a mod b in place; returns the new degree (-1 for zero)."""
    cdef long inv = _powmod(b[db], p - 2, p)
    cdef long c
    cdef int i, shift
    while da >= db:
        c = a[da] * inv % p
        shift = da - db
        for i in range(db + 1):
            a[shift + i] = _mod(a[shift + i] - c * b[i], p)
        da = _deg(a, da - 1)
    return da


cdef long _resultant(long* a0, int m, long* b0, int n, long p) nogil:
    cdef long a[MAXDEG + 1]
    cdef long b[MAXDEG + 1]
    cdef long t[MAXDEG + 1]
    cdef long sign = 1, acc = 1
    cdef int i, k
    for i in range(m + 1):
        a[i] = a0[i]
    for i in range(n + 1):
        b[i] = b0[i]
    while True:
        if n < 0:
            return 0
        if n == 0:
            return _mod(sign * acc % p * _powmod(b[0], m, p), p)
        for i in range(m + 1):
            t[i] = a[i]
        k = _polymod(t, m, b, n, p)
        if k < 0:
            return 0
        if (m * n) & 1:
            sign = -sign
        acc = acc * _powmod(b[n], m - k, p) % p
        for i in range(n + 1):
            a[i] = b[i]
        for i in range(k + 1):
            b[i] = t[i]
        m = n
        n = k


cdef int _linear_multiplicity(long* f0, int d, long p) nogil:
    cdef long f[MAXDEG + 1]
    cdef long qq[MAXDEG + 1]
    cdef long acc, rem
    cdef int i, a, total = 0
    for i in range(d + 1):
        f[i] = f0[i]
    for a in range(p):
        while d > 0:
            acc = 0
            for i in range(d, 0, -1):
                acc = (acc * a + f[i]) % p
                qq[i - 1] = acc
            rem = (acc * a + f[0]) % p
            if rem != 0:
                break
            for i in range(d):
                f[i] = qq[i]
            d -= 1
            total += 1
    return total


cdef bint _splitting_ok(long* coeffs, int q, long p) nogil:
    cdef long f[MAXDEG + 1]
    cdef long df[MAXDEG + 1]
    cdef int i, a, roots = 0, degf, degdf
    cdef long disc, v, s
    for i in range(q + 1):
        f[i] = _mod(coeffs[i], p)
    for i in range(q):
        df[i] = _mod((i + 1) * coeffs[i + 1], p)
    degf = _deg(f, q)
    degdf = _deg(df, q - 1)
    disc = _resultant(f, degf, df, degdf, p)
    if disc == 0:
        return _linear_multiplicity(f, degf, p) == q
    s = -1 if ((q * (q - 1) // 2) & 1) else 1
    if _powmod(s * disc, (p - 1) // 2, p) != 1:
        return False
    for a in range(p):
        v = 0
        for i in range(degf, -1, -1):
            v = (v * a + f[i]) % p
        if v == 0:
            roots += 1
    return roots == 0 or roots == q


def splitting_ok(coeffs, int q, long p):
    cdef long c[MAXDEG + 1]
    cdef int i
    for i in range(q + 1):
        c[i] = coeffs[i]
    return bool(_splitting_ok(c, q, p))


def scan_block(starts, steps, counts, long first, long stop, int q, primes):
    """Survivors among lifts first..stop-1 of the mixed-radix box (a_{q-1} fastest)."""
    if q > MAXDEG - 1:
        raise ValueError("degree too large for the compiled scanner")
    cdef long st[MAXDEG]
    cdef long sp[MAXDEG]
    cdef long cn[MAXDEG]
    cdef long dg[MAXDEG]
    cdef long cur[MAXDEG + 1]
    cdef long pr[64]
    cdef int npr = len(primes)
    cdef long rest, idx
    cdef int j, k
    cdef bint ok
    for j in range(q):
        st[j] = starts[j]
        sp[j] = steps[j]
        cn[j] = counts[j]
    for k in range(npr):
        pr[k] = primes[k]
    rest = first
    for j in range(q - 1, -1, -1):
        dg[j] = rest % cn[j]
        rest //= cn[j]
    for j in range(q):
        cur[j] = st[j] + sp[j] * dg[j]
    cur[q] = 1
    out = []
    for idx in range(first, stop):
        ok = True
        for k in range(npr):
            if not _splitting_ok(cur, q, pr[k]):
                ok = False
                break
        if ok:
            out.append(tuple(cur[j] for j in range(q + 1)))
        j = q - 1
        while j >= 0:
            dg[j] += 1
            if dg[j] < cn[j]:
                cur[j] += sp[j]
                break
            dg[j] = 0
            cur[j] = st[j]
            j -= 1
    return stop - first, out
