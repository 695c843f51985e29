"""Random structure-data generators shared by the test modules."""

import itertools

import numpy as np

from ricci_homog.structure import StructureData


def symmetric_gamma(raw):
    """Exactly symmetric cube taking raw[sorted(i, k, l)] everywhere."""
    s = raw.shape[0]
    out = np.empty_like(raw)
    for idx in itertools.product(range(s), repeat=3):
        out[idx] = raw[tuple(sorted(idx))]
    return out


def random_structure(rng, s, *, zero_fraction=0.0):
    while True:
        d = rng.integers(1, 5, size=s)
        if d.sum() >= 3:
            break
    raw = rng.uniform(0.0, 1.0, size=(s, s, s))
    raw[rng.uniform(size=raw.shape) < zero_fraction] = 0.0
    gamma = symmetric_gamma(raw)
    zeta = rng.uniform(0.0, 1.0, size=s)
    b = (2 * d * zeta + gamma.sum(axis=(1, 2))) / d
    return StructureData(d, b, gamma, zeta, label=f"random-s{s}")


def random_maximal(rng, s):
    """Random data with all gamma entries positive, so a > 0."""
    return random_structure(rng, s)


def two_summand(rng, *, d=None, g111=None, g221=None, g222=None, zeta=None):
    """s = 2 data with gamma_11^2 = 0 satisfying the Casimir identity."""
    if d is None:
        while True:
            d = rng.integers(1, 6, size=2)
            if d.sum() >= 3:
                break
    d1, d2 = (int(v) for v in d)
    g111 = rng.uniform(0, 2) if g111 is None else g111
    g221 = rng.uniform(0.05, 2) if g221 is None else g221
    g222 = rng.uniform(0, 2) if g222 is None else g222
    if zeta is None:
        zeta = np.array([rng.uniform(0.01, 1), rng.uniform(0, 1)])
    gamma = np.zeros((2, 2, 2))
    gamma[0, 0, 0] = g111
    gamma[1, 1, 1] = g222
    for p in ((1, 1, 0), (1, 0, 1), (0, 1, 1)):
        gamma[p] = g221
    b = np.array([
        (2 * d1 * zeta[0] + g111 + g221) / d1,
        (2 * d2 * zeta[1] + 2 * g221 + g222) / d2,
    ])
    return StructureData([d1, d2], b, gamma, zeta, label="two-summand")


def two_summand_condition(sd, z):
    """Existence inequality written out directly from the data."""
    d1, d2 = sd.d
    g = sd.gamma
    lhs = (sd.zeta[1] + g[1, 1, 1] / (4 * d2) + g[1, 1, 0] / d2) * z[0]
    rhs = (sd.zeta[0] + g[0, 0, 0] / (4 * d1)) * z[1]
    return lhs > rhs


def two_summand_cases(seed, count, holding):
    """`count` (sd, z) pairs for which the existence condition holds (or fails)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        sd = two_summand(rng)
        z = rng.uniform(0, 1, size=2)
        if rng.uniform() < 0.1:
            z[rng.integers(2)] = 0.0
        if z.max() == 0:
            continue
        if two_summand_condition(sd, z) == holding:
            out.append((sd, z))
    return out


def block_equations(sd, x):
    """Two-summand Ricci coefficients written out for gamma_11^2 = 0."""
    d1, d2 = sd.d
    b1, b2 = sd.b
    g = sd.gamma
    g111, g221, g222 = g[0, 0, 0], g[1, 1, 0], g[1, 1, 1]
    t = x[0] / x[1]
    R1 = b1 / 2 - g111 / (4 * d1) - g221 / (2 * d1) + g221 / (4 * d1) * t * t
    R2 = b2 / 2 - g222 / (4 * d2) - g221 / (2 * d2) * t
    return np.array([R1, R2])


def random_metric(rng, s, spread=2.0):
    return np.exp(rng.uniform(-spread, spread, size=s))


def on_surface(sd, z, x):
    return x * float(np.sum(sd.d * z / x))
