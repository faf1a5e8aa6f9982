#!/usr/bin/env python3
# Copyright 2026 The Sleepstage Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates tests/data/feature_oracle.json.

Evaluates the 15 per-band statistics with numpy/scipy, independently of the
C++ implementation, on 100 seeded random vectors plus the hand examples.
"""

import json
import pathlib

import numpy as np
from scipy import stats


def features(x):
    x = np.asarray(x, dtype=np.float64)
    q25, med, q75 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    iqr = q75 - q25
    kept = x[(x >= q25 - 1.5 * iqr) & (x <= q75 + 1.5 * iqr)]
    trimmed = kept.mean() if kept.size else x.mean()
    harm = x.size / np.sum(1.0 / np.maximum(np.abs(x), 1e-12))
    lo, hi = x.min(), x.max()
    if hi > lo:
        counts, _ = np.histogram(x, bins=100, range=(lo, hi))
        p = counts[counts > 0] / x.size
        entropy = float(-(p * np.log(p)).sum())
    else:
        entropy = 0.0
    m2 = np.mean((x - x.mean()) ** 2)
    if m2 < 1e-12:
        skew = kurt = 0.0
    else:
        skew = float(stats.skew(x, bias=True))
        kurt = float(stats.kurtosis(x, fisher=True, bias=True))
    return [float(v) for v in (
        x.mean(), harm, trimmed, np.sum(x * x), entropy, lo, med, hi,
        x.std(ddof=1), skew, q25, q75, iqr, skew, kurt)]


def main():
    rng = np.random.default_rng(20261016)
    cases = []
    for i in range(100):
        n = int(rng.integers(4, 200))
        kind = i % 4
        if kind == 0:
            x = rng.normal(0.0, 20.0, n)
        elif kind == 1:
            x = rng.standard_t(3, n) * 5.0 + 2.0   # heavy tails: fences bite
        elif kind == 2:
            x = rng.exponential(3.0, n) - 1.0       # skewed
        else:
            x = rng.uniform(-100.0, 100.0, n)
        cases.append({"input": x.tolist(), "expected": features(x)})
    hand = {
        "ramp": {"input": [1.0, 2.0, 3.0, 4.0],
                 "expected": features([1.0, 2.0, 3.0, 4.0])},
        "constant": {"input": [5.0, 5.0, 5.0, 5.0],
                     "expected": features([5.0, 5.0, 5.0, 5.0])},
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "feature_oracle.json"
    out.write_text(json.dumps({"random": cases, "hand": hand}))
    print(json.dumps(hand, indent=1))


if __name__ == "__main__":
    main()
