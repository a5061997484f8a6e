"""Concatenated Reed-Solomon identification codebooks.

Identities are integers below M = q2^k2.  Encoding walks down the tower:

  index -> k2 base-q2 digits            (outer message)
        -> outer RS over GF(q2), q2 = q1^k1, length n2
        -> each outer symbol, read as k1 base-q1 digits, becomes an
           inner RS message over GF(q1), length n1
        -> each inner symbol index j maps to the amplitude
           -sqrt(A) + 2 sqrt(A) j / (q1 - 1)
        -> n1*n2 coordinates plus zero padding up to n.

Distinct identities differ in at least d2 outer symbols, each of which
forces at least d1 inner coordinates apart by at least one amplitude
step, so the Euclidean distance is at least
sqrt(d1 d2 * 4A / (q1-1)^2).  The planner searches feasible (q1, n1,
k1, k2) for a requested block length and maximizes the DI rate
R = k1 k2 log2(q1) / (n log2 n).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import di_rate
from .errors import InfeasibleError
from .galois import make_extension, make_field, prime_power
from .rs import RSCode

_SCHEMA = 1


def _ceil_at_least(x: float) -> int:
    """Smallest integer d with d >= x, robust to float dust (0.1*600)."""
    return max(1, math.ceil(x - 1e-9))


@dataclass(frozen=True)
class ConcatParams:
    """Fully resolved construction parameters.

    a is the distance exponent margin (distance target n^(1/4+a) in the
    packing view) and b = 1/4 - log(q1)/log(n) records where the inner
    alphabet size actually landed; the planner only accepts
    a < b < 2a.  power_bound is the per-block energy budget A.
    """

    n: int
    a: float
    b: float
    power_bound: float
    eps1: float
    eps2: float
    q1: int
    p: int
    m: int
    n1: int
    k1: int
    n2: int
    k2: int
    padding: int
    field_seed: int
    log2_size: float
    rate: float
    min_euclidean_distance: float
    meets_asymptotic_rate: bool

    @property
    def d1(self) -> int:
        return self.n1 - self.k1 + 1

    @property
    def d2(self) -> int:
        return self.n2 - self.k2 + 1

    @property
    def q2(self) -> int:
        return self.q1**self.k1

    @property
    def size(self) -> int:
        return self.q2**self.k2

    def __post_init__(self):
        if not 0 < self.a < 0.125:
            raise ValueError("a must lie in (0, 1/8)")
        if self.power_bound <= 0:
            raise ValueError("power bound must be positive")
        if not (0 < self.eps1 < 1 and 0 < self.eps2 < 1):
            raise ValueError("distance fractions must lie in (0, 1)")
        pp = prime_power(self.q1)
        if pp is None or pp != (self.p, self.m):
            raise ValueError(f"q1 = {self.q1} is not {self.p}^{self.m}")
        if self.q1 < 2:
            raise ValueError("inner alphabet needs at least two levels")
        if not 1 <= self.n1 <= min(self.q1, self.n):
            raise ValueError("need 1 <= n1 <= min(q1, n)")
        if not 1 <= self.k1 <= self.n1:
            raise ValueError("need 1 <= k1 <= n1")
        if not 1 <= self.n2 <= self.q2:
            raise ValueError("outer length exceeds outer field order")
        if not 1 <= self.k2 <= self.n2:
            raise ValueError("need 1 <= k2 <= n2")
        if self.d1 < self.eps1 * self.n1 - 1e-9:
            raise ValueError("inner distance misses its fraction target")
        if self.d2 < self.eps2 * self.n2 - 1e-9:
            raise ValueError("outer distance misses its fraction target")
        if self.n1 * self.n2 + self.padding != self.n:
            raise ValueError("n1 * n2 + padding must equal n")
        expected = guaranteed_distance(self.d1, self.d2, self.power_bound, self.q1)
        if not math.isclose(self.min_euclidean_distance, expected, rel_tol=1e-12):
            raise ValueError("stored minimum distance disagrees with parameters")

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["schema"] = _SCHEMA
        out["d1"] = self.d1
        out["d2"] = self.d2
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConcatParams":
        if data.get("schema") != _SCHEMA:
            raise ValueError(f"unsupported params schema {data.get('schema')!r}")
        kwargs = {k: data[k] for k in cls.__dataclass_fields__}
        return cls(**kwargs)


def guaranteed_distance(d1: int, d2: int, power_bound: float, q1: int) -> float:
    """sqrt(d1 d2 * 4A / (q1-1)^2): the construction's distance floor."""
    if q1 < 2:
        raise ValueError("inner alphabet needs at least two levels")
    return math.sqrt(d1 * d2 * 4.0 * power_bound / (q1 - 1) ** 2)


class AmplitudeAlphabet:
    """q1 equispaced levels spanning [-sqrt(A), +sqrt(A)]."""

    def __init__(self, q1: int, power_bound: float):
        if q1 < 2:
            raise ValueError("need at least two amplitude levels")
        if power_bound <= 0:
            raise ValueError("power bound must be positive")
        root = math.sqrt(power_bound)
        self.q1 = q1
        self.power_bound = power_bound
        self.levels = -root + 2 * root * np.arange(q1) / (q1 - 1)
        self.spacing = 2 * root / (q1 - 1)

    def level(self, j: int) -> float:
        if not 0 <= j < self.q1:
            raise ValueError(f"level index {j} outside [0, {self.q1})")
        return float(self.levels[j])


def plan_params(
    n: int,
    a: float,
    power_bound: float = 1.0,
    eps1: float = 0.1,
    eps2: float = 0.1,
    field_seed: int = 0,
) -> ConcatParams:
    """Search (q1, n1, k1, k2) maximizing rate under all constraints.

    q1 ranges over prime powers whose implied exponent
    b = 1/4 - log(q1)/log(n) lands strictly inside (a, 2a); for each
    the dimensions are pushed as high as the distance fractions allow,
    subject to the outer length bound n2 <= q2 (enforced here even
    though it only binds at moderate n; violating it would silently
    break injectivity).  Raises InfeasibleError when the search space
    is empty.
    """
    if n < 4:
        raise ValueError("block length too small")
    if not 0 < a < 0.125:
        raise ValueError("a must lie in (0, 1/8)")
    if not (0 < eps1 < 1 and 0 < eps2 < 1):
        raise ValueError("distance fractions must lie in (0, 1)")
    log_n = math.log(n)
    best: ConcatParams | None = None
    q_hi = int(math.floor(n ** (0.25 - a))) + 1
    for q1 in range(2, max(q_hi + 1, 3)):
        pp = prime_power(q1)
        if pp is None:
            continue
        b = 0.25 - math.log(q1) / log_n
        if not a < b < 2 * a:
            continue
        p, m = pp
        for n1 in range(min(q1, n), 0, -1):
            n2 = n // n1
            if n2 < 1:
                continue
            d1_min = _ceil_at_least(eps1 * n1)
            k1 = n1 + 1 - d1_min
            if k1 < 1:
                continue
            if q1**k1 < n2:
                continue  # outer field too small for the outer length
            d2_min = _ceil_at_least(eps2 * n2)
            k2 = n2 + 1 - d2_min
            if k2 < 1:
                continue
            log2_size = k1 * k2 * math.log2(q1)
            rate = di_rate(log2_size, n)
            if best is not None and rate <= best.rate:
                continue
            d1 = n1 - k1 + 1
            d2 = n2 - k2 + 1
            best = ConcatParams(
                n=n,
                a=a,
                b=b,
                power_bound=power_bound,
                eps1=eps1,
                eps2=eps2,
                q1=q1,
                p=p,
                m=m,
                n1=n1,
                k1=k1,
                n2=n2,
                k2=k2,
                padding=n - n1 * n2,
                field_seed=field_seed,
                log2_size=log2_size,
                rate=rate,
                min_euclidean_distance=guaranteed_distance(d1, d2, power_bound, q1),
                meets_asymptotic_rate=rate >= 0.25 - 2 * a,
            )
    if best is None:
        raise InfeasibleError(
            f"no concatenated construction for n={n}, a={a}, eps1={eps1}, eps2={eps2}: "
            "no prime power lands in the allowed alphabet window with a large "
            "enough outer field"
        )
    return best


class ConcatCodebook:
    """Executable form of a parameter set: fields, RS codes, amplitude map."""

    def __init__(self, params: ConcatParams):
        self.params = params
        self.inner_field = make_field(params.p, params.m, params.field_seed)
        self.outer_field = make_extension(self.inner_field, params.k1, params.field_seed)
        self.inner_code = RSCode(self.inner_field, params.n1, params.k1)
        self.outer_code = RSCode(self.outer_field, params.n2, params.k2)
        self.alphabet = AmplitudeAlphabet(params.q1, params.power_bound)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def size(self) -> int:
        return self.params.size

    def encode(self, index: int) -> np.ndarray:
        p = self.params
        if not 0 <= index < self.size:
            raise ValueError("identity index out of range")
        digits = []
        v = index
        q2 = p.q2
        for _ in range(p.k2):
            v, r = divmod(v, q2)
            digits.append(r)
        msg = self.outer_field.digit_rows(digits)  # (k2, k1) inner-field indices
        outer_symbols = self.outer_code.encode_digits(msg)  # (n2, k1)
        inner_blocks = self.inner_code.encode_batch(outer_symbols)  # (n2, n1)
        amps = self.alphabet.levels[inner_blocks]
        if p.padding:
            return np.concatenate([amps.ravel(), np.zeros(p.padding)])
        return amps.ravel()

    # harness protocol
    def codeword(self, index: int) -> np.ndarray:
        return self.encode(index)

    def _min_weight_delta(self) -> np.ndarray:
        """Digit rows (k2, k1) of g(x) = prod_{i<k2-1} (x - point_i).

        g is a message polynomial whose outer codeword vanishes on the
        first k2-1 evaluation points and nowhere else, so it has weight
        exactly d2 = n2 - k2 + 1: the minimum possible.  Adding it to
        any message yields a partner at the outer distance floor.
        """
        cached = getattr(self, "_delta_digits", None)
        if cached is not None:
            return cached
        ext = self.outer_field
        k1, k2 = self.params.k1, self.params.k2
        # poly as digit rows, little-endian in the coefficient index
        poly = ext.digit_rows([1])                      # the constant 1
        for i in range(k2 - 1):
            neg_pt = ext.neg(self.outer_code.point(i))
            shifted = np.vstack([ext.digit_rows([0]), poly])     # x * poly
            scaled = ext.vmul(poly, np.repeat(ext.digit_rows([neg_pt]), len(poly), axis=0))
            poly = ext.vadd(shifted, np.vstack([scaled, ext.digit_rows([0])]))
        if len(poly) < k2:
            poly = np.vstack([poly, np.zeros((k2 - len(poly), k1), dtype=poly.dtype)])
        self._delta_digits = poly
        return poly

    def close_partner(self, index: int) -> int:
        """An identity whose outer codeword differs in exactly d2 symbols.

        The difference is a fixed minimum-weight outer codeword, so these
        pairs sit at the guaranteed distance floor; the harness uses them
        as worst-case impostors.
        """
        p = self.params
        if not 0 <= index < self.size:
            raise ValueError("identity index out of range")
        ext = self.outer_field
        digits = []
        v = index
        for _ in range(p.k2):
            v, r = divmod(v, p.q2)
            digits.append(r)
        msg = ext.digit_rows(digits)
        partner_rows = ext.vadd(msg, self._min_weight_delta())
        partner = 0
        for row in partner_rows[::-1]:
            partner = partner * p.q2 + ext.from_digits(row)
        return partner


_codebook_cache: dict[tuple, ConcatCodebook] = {}


def encode_identity(params: ConcatParams, index: int) -> np.ndarray:
    """Module-level encoder; caches the built codebook per parameter set."""
    key = (params.q1, params.n, params.n1, params.k1, params.n2, params.k2,
           params.power_bound, params.field_seed)
    book = _codebook_cache.get(key)
    if book is None:
        book = _codebook_cache[key] = ConcatCodebook(params)
    return book.encode(index)


def codeword_stats(u: np.ndarray) -> tuple[float, float, float]:
    """(sum of squares, sum of fourth powers, max |coordinate|)."""
    u = np.asarray(u, dtype=float)
    return float(np.sum(u**2)), float(np.sum(u**4)), float(np.max(np.abs(u)))


def write_params_json(path, params: ConcatParams) -> None:
    from .harness import write_text_atomic  # local import to avoid a cycle

    write_text_atomic(path, json.dumps(params.to_json_dict(), indent=2, sort_keys=True) + "\n")


def load_params_json(path) -> ConcatParams:
    with open(path, encoding="utf-8") as fh:
        return ConcatParams.from_json_dict(json.load(fh))


def export_codewords_csv(path, book: ConcatCodebook, indices) -> None:
    """One row per identity: index, then n coordinates at 17 significant digits.

    ``indices`` is an iterable of identities, or an int k meaning the
    first k of them.
    """
    if isinstance(indices, int):
        indices = range(min(indices, book.params.size))
    lines = []
    for idx in indices:
        u = book.encode(int(idx))
        lines.append(",".join([str(int(idx))] + [f"{x:.17g}" for x in u]))
    from .harness import write_text_atomic

    write_text_atomic(path, "\n".join(lines) + "\n")
