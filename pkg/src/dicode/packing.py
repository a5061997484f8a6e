"""Random-coding codebooks with expurgation, and their property checkers.

The generator draws 2*target_size iid N(0, A') coordinate vectors
(A' < A), removes every vector that violates the requested norm
properties, then greedily removes later vectors that come within
n^(1/4 + a) of an earlier survivor.  Nothing is resampled: whatever
survives is returned, together with a report of what was removed and
why.

Three property profiles:

  "basic"              power cap ||u||_2^2 <= A n and the distance floor
  "fourth-moment"      adds ||u||_4^4 <= B n (B defaults to 3 A^2)
  "norm-concentrated"  adds ||u||_4^4 <= 3 A^2 n and the two-norm band
                       | ||u||_2^2 - A' n | <= sqrt(n) ln n

``verify_packing`` re-checks a finished codebook through an independent
code path, and ``check_projection_property`` tests whether pairs stay
separated even after restriction to coordinate subsets.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InfeasibleError

PROFILES = ("basic", "fourth-moment", "norm-concentrated")
_SCHEMA = 1


@dataclass(frozen=True)
class PackingSpec:
    n: int
    target_size: int
    power_bound: float          # A
    sampling_power: float       # A', the actual coordinate variance
    distance_exponent: float    # a: pairwise floor n^(1/4 + a)
    seed: int = 0
    fourth_moment_bound: float | None = None   # B; None means 3 A^2
    projection_fraction: float | None = None   # mu, for the subset checker
    projection_exponent: float | None = None   # alpha, for the subset checker

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.target_size < 1:
            raise ValueError("target size must be positive")
        if not 0 < self.sampling_power < self.power_bound:
            raise ValueError("need 0 < sampling power < power bound")
        if not 0 < self.distance_exponent < 0.25:
            raise ValueError("distance exponent must lie in (0, 1/4)")

    @property
    def distance_floor(self) -> float:
        return self.n ** (0.25 + self.distance_exponent)

    @property
    def fourth_bound(self) -> float:
        if self.fourth_moment_bound is not None:
            return self.fourth_moment_bound
        return 3.0 * self.power_bound**2

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["schema"] = _SCHEMA
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PackingSpec":
        if data.get("schema") != _SCHEMA:
            raise ValueError(f"unsupported packing schema {data.get('schema')!r}")
        kwargs = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        missing = {"n", "target_size", "power_bound", "sampling_power",
                   "distance_exponent"} - set(kwargs)
        if missing:
            raise ValueError(f"packing spec is missing {sorted(missing)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class ExpurgationReport:
    profile: str
    seed: int
    sampled: int
    requested: int
    removed_power: int
    removed_fourth: int
    removed_band: int
    removed_distance: int
    survivors: int
    distance_floor: float


def generate_expurgated(spec: PackingSpec, profile: str = "basic"):
    """Return (codebook array of shape (S, n), ExpurgationReport).

    Deterministic in spec.seed.  The survivor count S may fall short of
    target_size; that is reported, never hidden.  Raises InfeasibleError
    if fewer than two vectors survive.
    """
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    n = spec.n
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    draws = rng.normal(0.0, math.sqrt(spec.sampling_power), size=(2 * spec.target_size, n))
    s2 = np.sum(draws**2, axis=1)
    keep = s2 <= spec.power_bound * n
    removed_power = int(np.sum(~keep))
    removed_fourth = removed_band = 0
    if profile in ("fourth-moment", "norm-concentrated"):
        bound4 = spec.fourth_bound if profile == "fourth-moment" else 3.0 * spec.power_bound**2
        s4 = np.sum(draws**4, axis=1)
        bad4 = (s4 > bound4 * n) & keep
        removed_fourth = int(np.sum(bad4))
        keep &= ~bad4
    if profile == "norm-concentrated":
        band = math.sqrt(n) * math.log(n)
        off = (np.abs(s2 - spec.sampling_power * n) > band) & keep
        removed_band = int(np.sum(off))
        keep &= ~off
    candidates = draws[keep]
    floor2 = spec.distance_floor**2
    kept = np.empty_like(candidates)
    count = 0
    removed_distance = 0
    for row in candidates:
        if count:
            d2 = np.sum((kept[:count] - row) ** 2, axis=1)
            if float(d2.min()) < floor2:
                removed_distance += 1
                continue
        kept[count] = row
        count += 1
    if count < 2:
        raise InfeasibleError(
            f"expurgation left {count} vector(s); the parameters are too tight"
        )
    report = ExpurgationReport(
        profile=profile,
        seed=spec.seed,
        sampled=int(draws.shape[0]),
        requested=spec.target_size,
        removed_power=removed_power,
        removed_fourth=removed_fourth,
        removed_band=removed_band,
        removed_distance=removed_distance,
        survivors=count,
        distance_floor=spec.distance_floor,
    )
    return kept[:count].copy(), report


def verify_packing(vectors: np.ndarray, spec: PackingSpec, profile: str) -> list[str]:
    """Independent re-check of every claimed property; returns violations.

    Deliberately not a call into the generation filter: per-vector math
    is redone with plain reductions and the pairwise floor is checked
    over the full distance matrix.
    """
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    vectors = np.asarray(vectors, dtype=float)
    n = spec.n
    problems: list[str] = []
    for i, u in enumerate(vectors):
        power = float(u @ u)
        if power > spec.power_bound * n * (1 + 1e-12):
            problems.append(f"vector {i}: squared norm {power:.6g} above A n")
        if profile in ("fourth-moment", "norm-concentrated"):
            bound4 = spec.fourth_bound if profile == "fourth-moment" else 3.0 * spec.power_bound**2
            fourth = float(np.sum(u**4))
            if fourth > bound4 * n * (1 + 1e-12):
                problems.append(f"vector {i}: fourth-power sum {fourth:.6g} above bound")
        if profile == "norm-concentrated":
            if abs(power - spec.sampling_power * n) > math.sqrt(n) * math.log(n) * (1 + 1e-12):
                problems.append(f"vector {i}: squared norm {power:.6g} outside the A' n band")
    floor = spec.distance_floor
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            d = float(np.linalg.norm(vectors[i] - vectors[j]))
            if d < floor * (1 - 1e-12):
                problems.append(f"pair ({i}, {j}): distance {d:.6g} below floor {floor:.6g}")
    return problems


@dataclass(frozen=True)
class ProjectionReport:
    mode: str
    subset_size: int
    threshold: float
    certified: bool
    overall_min: float
    passed: bool
    pair_minima: tuple[tuple[int, int, float], ...]
    subsets_per_pair: int


def check_projection_property(
    vectors: np.ndarray,
    mu: float,
    alpha: float,
    mode: str = "exhaustive",
    sample_count: int = 200,
    seed: int = 0,
) -> ProjectionReport:
    """Distance between projections onto coordinate subsets of size >= mu n.

    Exhaustive mode scans all subsets of size ceil(mu n) (projections
    onto supersets can only be farther apart, so that size is the
    binding one) and certifies the minimum; it is restricted to n <= 16.
    Sampled mode draws random subsets and reports the smallest projected
    distance seen, which upper-bounds the truth but certifies nothing.
    The pass criterion compares against n^alpha.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or len(vectors) < 2:
        raise ValueError("need at least two vectors")
    n = vectors.shape[1]
    if not 0 < mu <= 1:
        raise ValueError("mu must lie in (0, 1]")
    subset = max(1, math.ceil(mu * n - 1e-9))
    threshold = n**alpha
    pair_minima = []
    overall = math.inf
    if mode == "exhaustive":
        if n > 16:
            raise ValueError("exhaustive projection scan is limited to n <= 16")
        combos = list(itertools.combinations(range(n), subset))
        per_pair = len(combos)
        sel = np.array(combos)
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                gaps = (vectors[i] - vectors[j]) ** 2
                best = float(np.sqrt(gaps[sel].sum(axis=1).min()))
                pair_minima.append((i, j, best))
                overall = min(overall, best)
        certified = True
    elif mode == "sampled":
        rng = np.random.Generator(np.random.PCG64(seed))
        per_pair = sample_count
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                gaps = (vectors[i] - vectors[j]) ** 2
                best = math.inf
                for _ in range(sample_count):
                    pick = rng.choice(n, size=subset, replace=False)
                    best = min(best, float(math.sqrt(gaps[pick].sum())))
                pair_minima.append((i, j, best))
                overall = min(overall, best)
        certified = False
    else:
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    return ProjectionReport(
        mode=mode,
        subset_size=subset,
        threshold=threshold,
        certified=certified,
        overall_min=overall,
        passed=overall >= threshold,
        pair_minima=tuple(pair_minima),
        subsets_per_pair=per_pair,
    )


def export_csv(path, vectors: np.ndarray, spec: PackingSpec | None = None,
               profile: str | None = None) -> None:
    """One vector per row; a JSON sidecar records the generating spec."""
    from .harness import write_text_atomic

    rows = "\n".join(",".join(f"{x:.17g}" for x in row) for row in np.asarray(vectors))
    write_text_atomic(path, rows + "\n")
    if spec is not None:
        sidecar = str(path) + ".spec.json"
        payload = spec.to_json_dict()
        if profile is not None:
            payload["profile"] = profile
        write_text_atomic(sidecar, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2:
        raise ValueError("codebook CSV must be rectangular")
    return arr
