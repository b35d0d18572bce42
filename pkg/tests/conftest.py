import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reidrank import benchmark_spec, euclidean_distances, evaluate, generate, l2_normalize


@pytest.fixture(scope="session")
def bench():
    """Cached stock-benchmark instances: seed -> (features, euclidean metric,
    baseline report); pass normalized=True for the L2-normalized variant."""
    cache = {}

    def get(seed: int, normalized: bool = False):
        key = (seed, normalized)
        if key not in cache:
            fs = generate(benchmark_spec(seed))
            if normalized:
                fs = l2_normalize(fs)
            d0 = euclidean_distances(fs)
            cache[key] = (fs, d0, evaluate(d0, fs))
        return cache[key]

    return get
