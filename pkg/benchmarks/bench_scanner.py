"""Benchmark the compiled STEP tokenizer against the pure-Python fallback.

Both backends produce identical token streams (see tests/test_step_parity.py);
this script measures what the compiled one buys.  Run:

    python3 benchmarks/bench_scanner.py [--repeats N] [--holes N ...]
"""

from __future__ import annotations

import argparse
import statistics
import time

from fablink.geometry.plategen import generate_plate_step
from fablink.step import SCANNER_BACKEND
from fablink.step._scan_py import scan as scan_py
from fablink.step.parser import parse_step

try:
    from fablink.step._scan_c import scan as scan_c
except ImportError:
    scan_c = None


def _plate(holes: int) -> bytes:
    """A generated plate with ``holes`` through-holes on a grid."""
    grid = []
    side = 40.0 * (1 + holes)
    for k in range(holes):
        grid.append((30.0 + 40.0 * k, side / 2.0, 10.0))
    return generate_plate_step(side, side, 2.0, holes=grid)


def _time(fn, repeats: int) -> float:
    """Median seconds per call."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--holes", type=int, nargs="*", default=[0, 8, 32, 96])
    args = ap.parse_args()

    print(f"active backend: {SCANNER_BACKEND}")
    if scan_c is None:
        print("compiled scanner not built; timing the fallback only")

    header = f"{'fixture':>18} {'tokens':>8} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for holes in args.holes:
        data = _plate(holes)
        text = data.decode("latin-1")
        n_tokens = len(scan_py(text))

        t_py = _time(lambda: scan_py(text), args.repeats)
        row = f"{f'{holes}-hole plate':>18} {n_tokens:>8} {t_py * 1e3:>10.2f}ms"
        if scan_c is not None:
            t_c = _time(lambda: scan_c(text), args.repeats)
            row += f" {t_c * 1e3:>10.2f}ms {t_py / t_c:>7.1f}x"
        print(row)

    # End-to-end effect on a full parse of the largest fixture.
    data = _plate(args.holes[-1])
    t_parse_py = _time(lambda: parse_step(data, scan=scan_py), args.repeats)
    print(f"\nfull parse, python scanner:   {t_parse_py * 1e3:8.2f}ms")
    if scan_c is not None:
        t_parse_c = _time(lambda: parse_step(data, scan=scan_c), args.repeats)
        print(f"full parse, compiled scanner: {t_parse_c * 1e3:8.2f}ms "
              f"({t_parse_py / t_parse_c:.1f}x)")


if __name__ == "__main__":
    main()
