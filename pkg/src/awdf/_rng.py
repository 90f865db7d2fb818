"""Deterministic seed derivation based on the splitmix64 finalizer.

Every stochastic component (tree, forest, fold assignment, split,
repetition) receives its own 64-bit stream seed derived from its parent
seed and a small integer path. Derivation is pure integer arithmetic, so
streams are stable across platforms and numpy versions, and adding trees
or repetitions never perturbs the streams of earlier ones.
"""

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child stream seed from ``seed`` and an integer path.

    Distinct paths give statistically independent splitmix64 streams.
    """
    s = mix64((seed + _GAMMA) & MASK64)
    for p in path:
        s = mix64(s ^ mix64((p + _GAMMA) & MASK64))
    return s


def shuffle_inplace(values, seed: int) -> None:
    """Fisher-Yates shuffle driven by a counter-based splitmix64 stream."""
    n = len(values)
    for i in range(n - 1, 0, -1):
        r = mix64(seed + (n - i) * _GAMMA)
        j = r % (i + 1)
        values[i], values[j] = values[j], values[i]


# Path tags, so call sites read as intent rather than magic numbers.
TAG_TREE = 1
TAG_FOLD_FOREST = 2
TAG_FINAL_FOREST = 3
TAG_FOLD_ASSIGN = 4
TAG_LEVEL = 5
TAG_SLOT = 6
TAG_HOLDOUT = 7
TAG_SPLIT = 8
TAG_FIT = 9
TAG_REPETITION = 10
