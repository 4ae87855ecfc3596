"""Counter-based random draws.

Every random number used by the package is a pure function of
``(master seed, domain, trial, site coordinates, draw index)``.  The mixing
function is the SplitMix64 finaliser.  Because nothing depends on the order
in which sites are visited, a lazily evaluated sampler and a fully
pre-sampled window see the same configuration, nested windows share their
randomness, and results do not depend on how trials are split across
threads.

Bit-exact recipe (all arithmetic modulo 2**64)::

    mix64(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27; z *= 0x94D049BB133111EB
               z ^= z >> 31
    stream_key(seed, domain, trial) =
        mix64(mix64(mix64(seed) ^ domain * GAMMA) + (trial + 1) * GAMMA)
    site_key(key, c_0, ..., c_m) = fold h <- mix64(h ^ (zigzag(c_i) + GAMMA))
    draw(site, j) = mix64(site + (j + 1) * GAMMA)
    uniform(u) = (u >> 11) * 2**-53
    below(m, u) = ((u >> 11) * m) >> 53          (integer in [0, m))

with GAMMA = 0x9E3779B97F4A7C15 and zigzag(c) = 2c for c >= 0, -2c-1 else.
"""

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

# domain tags keep unrelated uses of one seed apart
DOMAIN_VERTEX = 1
DOMAIN_BOND = 2
DOMAIN_DIAG = 3


def mix64(z):
    z &= MASK
    z ^= z >> 30
    z = (z * _M1) & MASK
    z ^= z >> 27
    z = (z * _M2) & MASK
    return z ^ (z >> 31)


def zigzag(c):
    return (2 * c) if c >= 0 else (-2 * c - 1)


def stream_key(seed, domain, trial):
    k = mix64(mix64(seed & MASK) ^ ((domain * GAMMA) & MASK))
    return mix64(k + (trial + 1) * GAMMA)


def site_key(key, coords):
    h = key
    for c in coords:
        h = mix64(h ^ ((zigzag(c) + GAMMA) & MASK))
    return h


def draw(site, j):
    return mix64(site + (j + 1) * GAMMA)


def uniform(u):
    return (u >> 11) * _INV53


def below(m, u):
    return ((u >> 11) * m) >> 53
