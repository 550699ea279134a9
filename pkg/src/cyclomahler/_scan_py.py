"""Pure-Python lift scanner; same contract as the compiled _scan module."""


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        for i in range(db + 1):
            a[shift + i] = (a[shift + i] - c * b[i]) % p
        _trim(a)
    return a


def _resultant(a, b, p):
    sign = 1
    acc = 1
    while True:
        m, n = len(a) - 1, len(b) - 1
        if n < 0:
            return 0
        if n == 0:
            return sign * acc * pow(b[0], m, p) % p
        r = _polymod(a, b, p)
        if not r:
            return 0
        k = len(r) - 1
        if (m * n) & 1:
            sign = -sign
        acc = acc * pow(b[-1], m - k, p) % p
        a, b = b, r


def _linear_multiplicity(f, p):
    """Total multiplicity of linear factors of f over F_p."""
    f = list(f)
    total = 0
    for a in range(p):
        while len(f) > 1:
            # synthetic division by (x - a)
            q = [0] * (len(f) - 1)
            acc = 0
            for i in range(len(f) - 1, 0, -1):
                acc = (acc * a + f[i]) % p
                q[i - 1] = acc
            rem = (acc * a + f[0]) % p
            if rem:
                break
            f = q
            total += 1
    return total


def splitting_ok(coeffs, q, p):
    """Necessary condition mod p for a monic cyclic degree-q polynomial (coeffs low to high, monic)."""
    f = _trim([c % p for c in coeffs])
    df = _trim([(i * c) % p for i, c in enumerate(coeffs)][1:])
    disc = _resultant(f, df, p)
    if disc == 0:
        return _linear_multiplicity(f, p) == q
    if pow(disc * (-1 if (q * (q - 1) // 2) & 1 else 1) % p, (p - 1) // 2, p) != 1:
        return False
    roots = 0
    for a in range(p):
        v = 0
        for c in reversed(f):
            v = (v * a + c) % p
        if v == 0:
            roots += 1
    return roots == 0 or roots == q


def scan_block(starts, steps, counts, first, stop, q, primes):
    """Survivors among lifts first..stop-1 of the mixed-radix box (a_{q-1} fastest).

    Coefficient j takes values starts[j] + steps[j] * t for t < counts[j].
    Returns (number scanned, list of coefficient tuples a_0..a_{q-1}, 1).
    """
    digits = []
    rest = first
    for j in range(q - 1, -1, -1):
        digits.append(rest % counts[j])
        rest //= counts[j]
    digits.reverse()
    cur = [starts[j] + steps[j] * digits[j] for j in range(q)]
    out = []
    for _ in range(first, stop):
        poly = cur + [1]
        if all(splitting_ok(poly, q, p) for p in primes):
            out.append(tuple(poly))
        j = q - 1
        while j >= 0:
            digits[j] += 1
            if digits[j] < counts[j]:
                cur[j] += steps[j]
                break
            digits[j] = 0
            cur[j] = starts[j]
            j -= 1
    return stop - first, out
