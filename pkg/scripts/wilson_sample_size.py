"""How wide is a Wilson interval at a given trial count?

Prints the half-width next to the plain normal-approximation half-width
``z * sqrt(p(1-p)/n)`` for a range of n, then the smallest n that brings the
Wilson half-width under ``--target``.

    python3 scripts/wilson_sample_size.py --p 0.5 --target 0.1
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from pcbverify.stats import wilson_interval


@dataclass
class Config:
    p: float = 0.5
    z: float = 1.645
    target: float = 0.1
    ns: tuple[int, ...] = (5, 10, 15, 20, 30, 50, 100)


def normal_half_width(p: float, n: int, z: float) -> float:
    return z * math.sqrt(p * (1 - p) / n)


def min_n(cfg: Config, limit: int = 100_000) -> int | None:
    for n in range(1, limit + 1):
        if wilson_interval(cfg.p, n, cfg.z).half_width <= cfg.target:
            return n
    return None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=float, default=Config.p)
    ap.add_argument("--z", type=float, default=Config.z)
    ap.add_argument("--target", type=float, default=Config.target)
    a = ap.parse_args()
    cfg = Config(a.p, a.z, a.target)
    print(f"{'n':>5} {'wilson':>8} {'normal':>8}")
    for n in cfg.ns:
        print(f"{n:>5} {wilson_interval(cfg.p, n, cfg.z).half_width:8.4f} {normal_half_width(cfg.p, n, cfg.z):8.4f}")
    print(f"smallest n with Wilson half-width <= {cfg.target}: {min_n(cfg)}")


if __name__ == "__main__":
    main()
