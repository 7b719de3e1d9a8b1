#!/usr/bin/env python3
"""Regenerates default_fields.txt.

For each (p, N) with p in {2,3,5,7} and p^N <= 2^24 the chosen polynomial is
the monic degree-N polynomial over F_p with the smallest encoding
sum(c_i * p^i, i < N) that is irreducible and has x as a primitive root.
"""

LIMIT = 1 << 24


def prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def mulmod(a, b, f, p):
    n = len(f) - 1
    res = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    res[i + j] = (res[i + j] + x * y) % p
    for i in range(len(res) - 1, n - 1, -1):
        c = res[i]
        if c:
            for j in range(n + 1):
                res[i - n + j] = (res[i - n + j] - c * f[j]) % p
    return res[:n]


def powmod_x(e, f, p):
    n = len(f) - 1
    result = [1] + [0] * (n - 1)
    base = [0, 1] + [0] * (n - 2) if n > 1 else [(-f[0]) % p]
    while e:
        if e & 1:
            result = mulmod(result, base, f, p)
        base = mulmod(base, base, f, p)
        e >>= 1
    return result


def is_primitive(f, p):
    n = len(f) - 1
    order = p ** n - 1
    one = [1] + [0] * (n - 1)
    if powmod_x(order, f, p) != one:
        return False
    return all(powmod_x(order // r, f, p) != one for r in prime_factors(order))


def main():
    lines = []
    for p in (2, 3, 5, 7):
        n = 1
        while p ** n <= LIMIT:
            for enc in range(p ** n):
                f = [(enc // p ** i) % p for i in range(n)] + [1]
                if f[0] == 0:
                    continue
                if is_primitive(f, p):
                    lines.append(f"{p} {n} " + ",".join(map(str, f)))
                    break
            n += 1
    print("\n".join(lines))


if __name__ == "__main__":
    main()
