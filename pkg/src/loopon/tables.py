"""Count tables (walks, polygons, pattern-deficient objects) backed by the count cache."""
from __future__ import annotations

import math
from typing import Sequence

from . import saw
from .cache import CountCache
from .lattice import Lattice


def _origin(lattice: Lattice):
    return (0,) * lattice.d


def _histograms(lattice, kind, Ns, pattern, cap, force):
    x = _origin(lattice)
    if kind == "saw":
        H = saw.saw_histograms(lattice, x, max(Ns), pattern, cap=cap, force=force)
        return {N: [int(c) for c in H[N]] for N in Ns}
    return {N: [int(c) for c in saw.sap_histogram(lattice, x, N, pattern, cap=cap, force=force)] for N in Ns}


def count_rows(kind: str, lattice: Lattice, Ns: Sequence[int], a: float = 0.01, of: str = "saw",
               cache: CountCache | None = None, cap: int | None = saw.DEFAULT_SAW_CAP,
               force: bool = False) -> list[dict]:
    """Rows for ``kind`` in {"saw", "sap", "deficient"}; deficient rows use ``w = ceil(a N)`` and pattern P'."""
    cache = cache or CountCache(enabled=False)
    Ns = sorted(int(N) for N in Ns)
    pattern = saw.pattern_p_prime(lattice)
    obj = of if kind == "deficient" else kind
    if obj not in ("saw", "sap"):
        raise ValueError(f"unknown object kind {obj!r}")
    if kind not in ("saw", "sap", "deficient"):
        raise ValueError(f"unknown count kind {kind!r}")

    totals, deficient = {}, {}
    ws = {N: math.ceil(a * N) for N in Ns}
    missing = []
    for N in Ns:
        t = cache.get(lattice, obj, N)
        dfc = cache.get(lattice, f"deficient-{obj}", N, ws[N], pattern.name) if kind == "deficient" else 0
        if t is None or dfc is None:
            missing.append(N)
        else:
            totals[N], deficient[N] = t, dfc
    if missing:
        hists = _histograms(lattice, obj, missing, pattern if kind == "deficient" else None, cap, force)
        for N, h in hists.items():
            totals[N] = sum(h)
            cache.put(lattice, obj, N, totals[N])
            if kind == "deficient":
                deficient[N] = sum(c for k, c in enumerate(h) if k < ws[N])
                cache.put(lattice, f"deficient-{obj}", N, deficient[N], ws[N], pattern.name)

    rows = []
    for N in Ns:
        if kind == "deficient":
            frac = deficient[N] / totals[N] if totals[N] else float("nan")
            rows.append({"N": N, "w": ws[N], "total": totals[N], "deficient": deficient[N], "fraction": frac})
        else:
            c = totals[N]
            mu_hat = saw.growth_estimates({N: c})[N] if c > 0 and N > 0 else float("nan")
            rows.append({"N": N, "count": c, "mu_hat": mu_hat})
    return rows
