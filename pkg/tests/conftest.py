"""Shared helpers for the test suite."""

from spanshare.structures import mask_from_players


def mask(*players, n):
    return mask_from_players(players, n)


def all_antichains(n):
    """Every antichain of subsets of {1..n} (Dedekind-number many)."""
    subsets = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m))
    out = []

    def rec(i, chosen):
        if i == len(subsets):
            out.append(tuple(chosen))
            return
        rec(i + 1, chosen)
        s = subsets[i]
        if all(not (s & ~t == 0 or t & ~s == 0) for t in chosen):
            chosen.append(s)
            rec(i + 1, chosen)
            chosen.pop()

    rec(0, [])
    return out


def lagrange_at_zero(field, points):
    """Interpolate (x, y) pairs at x = 0; independent Shamir oracle."""
    total = 0
    for i, (xi, yi) in enumerate(points):
        num, den = 1, 1
        for j, (xj, _) in enumerate(points):
            if i != j:
                num = field.mul(num, xj)
                den = field.mul(den, field.sub(xj, xi))
        total = field.add(total, field.mul(yi, field.div(num, den)))
    return total
