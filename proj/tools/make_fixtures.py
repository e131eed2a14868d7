# Copyright 2026 The Authors.
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

"""Regenerates the small JSON fixtures under data/ (deterministic)."""

import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"
rng = random.Random(20260)


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def gauss(n):
    return [rng.gauss(0.0, 1.0) for _ in range(n)]


def psd(n, rank=None):
    rank = rank or n
    b = [gauss(n) for _ in range(rank)]
    return [[sum(b[r][i] * b[r][j] for r in range(rank)) / rank for j in range(n)] for i in range(n)]


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")


dump("identity2.json", {"schema_version": "1", "L": [[1.0, 0.0], [0.0, 1.0]]})
dump("kernel6.json", {"schema_version": "1", "L": psd(6), "k": 2})
dump("qd10.json", {
    "schema_version": "1",
    "quality": [0.5 + rng.random() for _ in range(10)],
    "features": [unit(gauss(6)) for _ in range(10)],
    "k": 2,
})

# Chain SDPP, R = 3 parts, M = 3 labels, D = 4; pairwise factors carry no features.
R, M, D = 3, 3, 4
factors = []
for r in range(R):
    factors.append({"parts": [r], "q": [0.3 + rng.random() for _ in range(M)],
                    "phi": [unit(gauss(D)) for _ in range(M)]})
for r in range(R - 1):
    factors.append({"parts": [r, r + 1], "q": [0.3 + rng.random() for _ in range(M * M)], "phi": []})
dump("chain.json", {"schema_version": "1", "sdpp": {"R": R, "M": M, "D": D, "factors": factors}})

# Conditional training data: N = 6 items, 2 quality features, D = 4.
lines = []
for _ in range(20):
    f = [gauss(2) for _ in range(6)]
    phi = [unit(gauss(4)) for _ in range(6)]
    y = sorted(rng.sample(range(6), rng.randint(1, 3)))
    lines.append(json.dumps({"f": f, "phi": phi, "y": y}))
(OUT / "training.jsonl").write_text("\n".join(lines) + "\n")

experts = [{"L": psd(6)} for _ in range(3)]
pairs = [{"pos": sorted(rng.sample(range(6), 2)), "neg": sorted(rng.sample(range(6), 2))} for _ in range(20)]
dump("mixture.json", {"k": 2, "experts": experts, "pairs": pairs})
