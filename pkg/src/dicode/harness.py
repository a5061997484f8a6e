"""Reproducible Monte Carlo experiments over codebooks and channels.

Every random draw comes from a Generator seeded by
SeedSequence((master_seed, purpose_tag, slot, trial)), so trial t of
identity k consumes exactly the same randomness no matter how trials
are partitioned across workers.  Reports therefore depend only on the
configuration, and the canonical serialization (which excludes timing
and worker count) is byte-identical across runs.

Error accounting: a type-I error is a rejected genuine transmission, a
type-II error is an accepted impostor.  Outage verdicts are excluded
from both denominators and reported separately.  On slow-fading trials
whose realized coefficient is exactly zero the two error kinds are also
tallied separately, because in that regime their conditional rates must
sum to one (the verifier sees pure noise either way).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, FastFading, SlowFading, parse_channel, transmit
from .codebook import ConcatCodebook, plan_params
from .decoder import OUTAGE, REJECT, CsiFast, CsiSlow, NoCsi, impostor_moments
from .errors import DegenerateFadingError
from .fading import Constant, FadingDistribution, quantile_abs
from .packing import PackingSpec, generate_expurgated, load_csv

_SCHEMA = 1
_TAG_IDENTITIES = 0
_TAG_TYPE1 = 1
_TAG_TYPE2 = 2
_TAG_PAIRS = 3

# Dotted config keys understood by experiment configs; the CLI help for
# `simulate` is generated from this list and a test keeps them in sync.
CONFIG_KEYS = {
    "seed": "master seed (drawn and echoed if omitted)",
    "workers": "worker count; partitions trials, never changes results",
    "channel.type": "awgn | slow-fading | fast-fading",
    "channel.sigma2": "noise variance per coordinate",
    "channel.fading": "fading law record, e.g. {\"type\": \"rayleigh\", \"scale\": 1.0}",
    "codebook.type": "concat | packing | csv",
    "codebook.n": "block length (concat)",
    "codebook.a": "distance exponent margin in (0, 1/8) (concat)",
    "codebook.power_bound": "energy budget A (concat)",
    "codebook.eps1": "inner distance fraction (concat)",
    "codebook.eps2": "outer distance fraction (concat)",
    "codebook.field_seed": "seed for the modulus searches (concat)",
    "codebook.profile": "basic | fourth-moment | norm-concentrated (packing)",
    "codebook.spec": "packing spec record (packing)",
    "codebook.path": "CSV path, one vector per row (csv)",
    "verifier.mode": "csi-fast | csi-slow | no-csi",
    "verifier.deviation_scale": "multiplier on the threshold deviation term",
    "trials.identities": "distinct identities sampled for type-I trials",
    "trials.per_identity": "genuine transmissions per identity",
    "trials.pairs": "impostor pairs sampled (includes the close pairs)",
    "trials.per_pair": "impostor transmissions per pair",
    "trials.min_distance_pairs": "how many of the pairs differ in one outer symbol",
    "outage_eta": "slow fading only: outage probability budget",
    "allow_degenerate_outage": "admit laws with P(h=0) > eta by forcing radius 0",
}


def write_text_atomic(path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see halves."""
    path = str(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    from .bounds import inv_norm_cdf

    z = inv_norm_cdf(0.5 + confidence / 2)
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    # the interval always contains phat; snap the boundary cases so
    # roundoff cannot push the endpoint past the point estimate
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _gen(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def _uniform_index(rng: np.random.Generator, size: int) -> int:
    """Exact uniform draw from [0, size), rejection on the top bits."""
    bits = (size - 1).bit_length() if size > 1 else 1
    nbytes = (bits + 7) // 8
    shift = nbytes * 8 - bits
    while True:
        val = int.from_bytes(rng.bytes(nbytes), "big") >> shift
        if val < size:
            return val


# ---------------------------------------------------------------------------
# codebook sources


class ArrayCodebook:
    """Explicit list of codewords (packing output or external CSV)."""

    def __init__(self, vectors: np.ndarray):
        self.vectors = np.asarray(vectors, dtype=float)
        if self.vectors.ndim != 2 or len(self.vectors) < 2:
            raise ValueError("codebook needs at least two vectors")
        self._nearest: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return len(self.vectors)

    def codeword(self, index: int) -> np.ndarray:
        return self.vectors[index]

    def close_partner(self, index: int) -> int:
        if self._nearest is None:
            v = self.vectors
            sq = np.sum(v**2, axis=1)
            d2 = sq[:, None] + sq[None, :] - 2 * (v @ v.T)
            np.fill_diagonal(d2, np.inf)
            self._nearest = np.argmin(d2, axis=1)
        return int(self._nearest[index])


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelModel
    codebook: dict
    verifier_mode: str
    identities: int = 50
    per_identity: int = 20
    pairs: int = 100
    per_pair: int = 10
    min_distance_pairs: int = 10
    seed: int = 0
    workers: int = 1
    deviation_scale: float = 1.0
    outage_eta: float | None = None
    allow_degenerate_outage: bool = False

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        known = {"channel", "codebook", "verifier", "trials", "seed", "workers",
                 "outage_eta", "allow_degenerate_outage", "schema"}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        trials = cfg.get("trials", {})
        verifier = cfg.get("verifier", {})
        return cls(
            channel=parse_channel(cfg["channel"]),
            codebook=dict(cfg["codebook"]),
            verifier_mode=verifier.get("mode", "csi-fast"),
            identities=int(trials.get("identities", 50)),
            per_identity=int(trials.get("per_identity", 20)),
            pairs=int(trials.get("pairs", 100)),
            per_pair=int(trials.get("per_pair", 10)),
            min_distance_pairs=int(trials.get("min_distance_pairs", 10)),
            seed=int(cfg.get("seed", 0)),
            workers=int(cfg.get("workers", 1)),
            deviation_scale=float(verifier.get("deviation_scale", 1.0)),
            outage_eta=None if cfg.get("outage_eta") is None else float(cfg["outage_eta"]),
            allow_degenerate_outage=bool(cfg.get("allow_degenerate_outage", False)),
        )

    def to_dict(self) -> dict:
        return {
            "schema": _SCHEMA,
            "channel": self.channel.to_config(),
            "codebook": self.codebook,
            "verifier": {"mode": self.verifier_mode, "deviation_scale": self.deviation_scale},
            "trials": {
                "identities": self.identities,
                "per_identity": self.per_identity,
                "pairs": self.pairs,
                "per_pair": self.per_pair,
                "min_distance_pairs": self.min_distance_pairs,
            },
            "seed": self.seed,
            "workers": self.workers,
            "outage_eta": self.outage_eta,
            "allow_degenerate_outage": self.allow_degenerate_outage,
        }


def build_codebook(cfg: dict):
    """Materialize the codebook a config asks for; returns (book, summary)."""
    kind = cfg.get("type")
    if kind == "concat":
        params = plan_params(
            n=int(cfg["n"]),
            a=float(cfg["a"]),
            power_bound=float(cfg.get("power_bound", 1.0)),
            eps1=float(cfg.get("eps1", 0.1)),
            eps2=float(cfg.get("eps2", 0.1)),
            field_seed=int(cfg.get("field_seed", 0)),
        )
        book = ConcatCodebook(params)
        summary = {"type": "concat", "params": params.to_json_dict(),
                   "size_log2": params.log2_size}
        return book, summary
    if kind == "packing":
        spec = PackingSpec.from_json_dict({**cfg["spec"], "schema": 1})
        profile = cfg.get("profile", "basic")
        vectors, report = generate_expurgated(spec, profile)
        book = ArrayCodebook(vectors)
        summary = {"type": "packing", "spec": spec.to_json_dict(), "profile": profile,
                   "survivors": report.survivors,
                   "removed": {"power": report.removed_power,
                               "fourth": report.removed_fourth,
                               "band": report.removed_band,
                               "distance": report.removed_distance}}
        return book, summary
    if kind == "csv":
        book = ArrayCodebook(load_csv(cfg["path"]))
        return book, {"type": "csv", "path": str(cfg["path"]), "size": book.size}
    raise ValueError(f"unknown codebook type {kind!r}")


def _build_verifier(cfg: ExperimentConfig):
    """Returns (verifier, outage_threshold, degenerate, fading_dist)."""
    model = cfg.channel
    mode = cfg.verifier_mode
    if mode == "csi-fast":
        if isinstance(model, SlowFading):
            raise ValueError("csi-fast expects awgn or fast-fading; use csi-slow")
        return CsiFast(model.sigma2, cfg.deviation_scale), None, False, None
    if mode == "csi-slow":
        if not isinstance(model, SlowFading):
            raise ValueError("csi-slow needs a slow-fading channel")
        if cfg.outage_eta is None:
            raise ValueError("csi-slow needs outage_eta")
        degenerate = False
        try:
            radius = quantile_abs(model.fading, cfg.outage_eta)
        except DegenerateFadingError:
            if not cfg.allow_degenerate_outage:
                raise
            radius = 0.0
            degenerate = True
        return CsiSlow(model.sigma2, radius, cfg.deviation_scale), radius, degenerate, None
    if mode == "no-csi":
        if isinstance(model, SlowFading):
            raise ValueError("the CSI-free verifier targets fast fading (or awgn)")
        dist = model.fading if isinstance(model, FastFading) else Constant(1.0)
        return NoCsi(model.sigma2, dist.moments(), cfg.deviation_scale), None, False, dist
    raise ValueError(f"unknown verifier mode {cfg.verifier_mode!r}")


@dataclass
class TrialReport:
    results: dict
    meta: dict

    def canonical_json(self) -> str:
        return json.dumps(self.results, sort_keys=True, indent=1)

    def full_json(self) -> str:
        return json.dumps({"results": self.results, "meta": self.meta},
                          sort_keys=True, indent=1)

    def identities_csv(self) -> str:
        head = "slot,identity,trials,errors,outages,error_rate,ci_lo,ci_hi"
        rows = [head]
        for r in self.results["type1"]["per_identity"]:
            rows.append(",".join(str(r[k]) for k in
                                 ("slot", "identity", "trials", "errors", "outages",
                                  "error_rate", "ci_lo", "ci_hi")))
        return "\n".join(rows) + "\n"

    def pairs_csv(self) -> str:
        head = "slot,sent,verified,kind,trials,accepts,outages,accept_rate,ci_lo,ci_hi"
        rows = [head]
        for r in self.results["type2"]["per_pair"]:
            rows.append(",".join(str(r[k]) for k in
                                 ("slot", "sent", "verified", "kind", "trials", "accepts",
                                  "outages", "accept_rate", "ci_lo", "ci_hi")))
        return "\n".join(rows) + "\n"


def _rate(successes: int, trials: int):
    if trials <= 0:
        return None, None, None
    lo, hi = wilson_interval(successes, trials)
    return successes / trials, lo, hi


def run_experiment(cfg: ExperimentConfig) -> TrialReport:
    t_start = time.perf_counter()
    if cfg.identities < 1 or cfg.per_identity < 1 or cfg.per_pair < 1:
        raise ValueError("trial counts must be positive")
    if not 0 <= cfg.min_distance_pairs <= cfg.pairs:
        raise ValueError("min_distance_pairs cannot exceed pairs")
    book, book_summary = build_codebook(cfg.codebook)
    verifier, radius, degenerate, nocsi_dist = _build_verifier(cfg)
    if cfg.verifier_mode == "no-csi" and cfg.codebook.get("type") == "concat":
        warnings.warn(
            "CSI-free thresholds were validated for expurgated random codebooks; "
            "concatenated codebooks ride on the same formulas but carry no "
            "norm-concentration guarantee",
            RuntimeWarning,
            stacklevel=2,
        )
    slow = isinstance(cfg.channel, SlowFading)

    rng_ids = _gen(cfg.seed, _TAG_IDENTITIES)
    identity_ids = [_uniform_index(rng_ids, book.size) for _ in range(cfg.identities)]
    codewords = {}
    for idx in identity_ids:
        if idx not in codewords:
            codewords[idx] = np.asarray(book.codeword(idx), dtype=float)

    rng_pairs = _gen(cfg.seed, _TAG_PAIRS)
    pair_list: list[tuple[int, int, str]] = []
    random_pairs = cfg.pairs - cfg.min_distance_pairs
    for _ in range(random_pairs):
        for _attempt in range(200):
            a = identity_ids[_uniform_index(rng_pairs, len(identity_ids))]
            b = identity_ids[_uniform_index(rng_pairs, len(identity_ids))]
            if a != b:
                pair_list.append((a, b, "random"))
                break
        else:
            raise ValueError("could not sample distinct identity pairs")
    for k in range(cfg.min_distance_pairs):
        sent = identity_ids[k % len(identity_ids)]
        pair_list.append((sent, book.close_partner(sent), "close"))
    for sent, ver, _ in pair_list:
        for idx in (sent, ver):
            if idx not in codewords:
                codewords[idx] = np.asarray(book.codeword(idx), dtype=float)

    model = cfg.channel

    def type1_slot(slot: int):
        u = codewords[identity_ids[slot]]
        errors = outages = zero_trials = zero_errors = 0
        for t in range(cfg.per_identity):
            rng = _gen(cfg.seed, _TAG_TYPE1, slot, t)
            y, h = transmit(model, u, rng)
            res = verifier.verify(y, u, h)
            if res.verdict == OUTAGE:
                outages += 1
                continue
            bad = res.verdict == REJECT
            errors += bad
            if slow and h == 0.0:
                zero_trials += 1
                zero_errors += bad
        return errors, outages, zero_trials, zero_errors

    def type2_slot(slot: int):
        sent_idx, ver_idx, _kind = pair_list[slot]
        u_sent = codewords[sent_idx]
        u_ver = codewords[ver_idx]
        accepts = outages = zero_trials = zero_accepts = 0
        for t in range(cfg.per_pair):
            rng = _gen(cfg.seed, _TAG_TYPE2, slot, t)
            y, h = transmit(model, u_sent, rng)
            res = verifier.verify(y, u_ver, h)
            if res.verdict == OUTAGE:
                outages += 1
                continue
            good = res.verdict != REJECT
            accepts += good
            if slow and h == 0.0:
                zero_trials += 1
                zero_accepts += good
        return accepts, outages, zero_trials, zero_accepts

    t1 = _map_slots(type1_slot, cfg.identities, cfg.workers)
    t2 = _map_slots(type2_slot, len(pair_list), cfg.workers)

    per_identity = []
    tot_err = tot_out1 = tot_zero_t1 = tot_zero_err = 0
    for slot, (errors, outages, zt, ze) in enumerate(t1):
        eff = cfg.per_identity - outages
        rate, lo, hi = _rate(errors, eff)
        per_identity.append({
            "slot": slot, "identity": str(identity_ids[slot]),
            "trials": cfg.per_identity, "errors": errors, "outages": outages,
            "error_rate": rate, "ci_lo": lo, "ci_hi": hi,
        })
        tot_err += errors
        tot_out1 += outages
        tot_zero_t1 += zt
        tot_zero_err += ze
    eff1 = cfg.identities * cfg.per_identity - tot_out1
    rate1, lo1, hi1 = _rate(tot_err, eff1)

    per_pair = []
    tot_acc = tot_out2 = tot_zero_t2 = tot_zero_acc = 0
    max_rate = None
    for slot, (accepts, outages, zt, za) in enumerate(t2):
        sent_idx, ver_idx, kind = pair_list[slot]
        eff = cfg.per_pair - outages
        rate, lo, hi = _rate(accepts, eff)
        per_pair.append({
            "slot": slot, "sent": str(sent_idx), "verified": str(ver_idx), "kind": kind,
            "trials": cfg.per_pair, "accepts": accepts, "outages": outages,
            "accept_rate": rate, "ci_lo": lo, "ci_hi": hi,
        })
        if rate is not None and (max_rate is None or rate > max_rate):
            max_rate = rate
        tot_acc += accepts
        tot_out2 += outages
        tot_zero_t2 += zt
        tot_zero_acc += za
    eff2 = len(pair_list) * cfg.per_pair - tot_out2
    rate2, lo2, hi2 = _rate(tot_acc, eff2)

    all_trials = cfg.identities * cfg.per_identity + len(pair_list) * cfg.per_pair
    all_outages = tot_out1 + tot_out2
    out_rate, out_lo, out_hi = _rate(all_outages, all_trials)

    results = {
        "schema": _SCHEMA,
        "config": _canonical_config(cfg),
        "codebook": book_summary,
        "verifier": {
            "mode": cfg.verifier_mode,
            "deviation_scale": cfg.deviation_scale,
            "outage_threshold": radius,
            "degenerate_outage": degenerate,
        },
        "type1": {
            "per_identity": per_identity,
            "pooled": {"trials": cfg.identities * cfg.per_identity, "errors": tot_err,
                       "outages": tot_out1, "error_rate": rate1, "ci_lo": lo1, "ci_hi": hi1},
        },
        "type2": {
            "per_pair": per_pair,
            "pooled": {"trials": len(pair_list) * cfg.per_pair, "accepts": tot_acc,
                       "outages": tot_out2, "accept_rate": rate2, "ci_lo": lo2, "ci_hi": hi2},
            "max_pair_rate": max_rate,
        },
        "outage": {"trials": all_trials, "outages": all_outages,
                   "fraction": out_rate, "ci_lo": out_lo, "ci_hi": out_hi},
    }
    if slow and (tot_zero_t1 or tot_zero_t2):
        z1 = tot_zero_err / tot_zero_t1 if tot_zero_t1 else None
        z2 = tot_zero_acc / tot_zero_t2 if tot_zero_t2 else None
        # conditioned on h = 0 the verifier sees pure noise either way:
        # accept probability p gives error rates 1-p (type I) and p
        # (type II), so their sum must straddle one
        results["zero_fading"] = {
            "type1": {"trials": tot_zero_t1, "errors": tot_zero_err, "error_rate": z1},
            "type2": {"trials": tot_zero_t2, "accepts": tot_zero_acc, "accept_rate": z2},
            "error_sum": (z1 + z2) if (z1 is not None and z2 is not None) else None,
        }
    meta = {
        "wall_clock_s": time.perf_counter() - t_start,
        "workers": cfg.workers,
    }
    return TrialReport(results=results, meta=meta)


def _canonical_config(cfg: ExperimentConfig) -> dict:
    out = cfg.to_dict()
    del out["workers"]  # execution detail; must not affect report bytes
    return out


def _map_slots(fn, count: int, workers: int):
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=min(workers, count)) as ex:
        return list(ex.map(fn, range(count)))


# ---------------------------------------------------------------------------
# moment-formula validation


@dataclass(frozen=True)
class MomentGridConfig:
    distributions: tuple[FadingDistribution, ...]
    modes: tuple[str, ...] = ("csi", "nocsi")
    n: int = 64
    draws: int = 1_000_000
    sigma2: float = 1.0
    pair_count: int = 3
    vector_power: float = 1.0
    seed: int = 0
    chunk: int = 20_000
    tolerance_sigmas: float = 4.0


@dataclass(frozen=True)
class MomentCheckRow:
    case: str
    statistic: str   # genuine | impostor
    quantity: str    # mean | variance
    formula: float
    estimate: float
    std_error: float
    deviation: float
    ok: bool


@dataclass
class MomentReport:
    rows: list[MomentCheckRow]
    draws: int
    elapsed_s: float

    @property
    def failures(self) -> list[MomentCheckRow]:
        return [r for r in self.rows if not r.ok]

    def to_json(self) -> str:
        payload = {
            "schema": _SCHEMA,
            "draws": self.draws,
            "elapsed_s": self.elapsed_s,
            "rows": [asdict_row(r) for r in self.rows],
            "failures": len(self.failures),
        }
        return json.dumps(payload, sort_keys=True, indent=1)


def asdict_row(r: MomentCheckRow) -> dict:
    return {
        "case": r.case, "statistic": r.statistic, "quantity": r.quantity,
        "formula": r.formula, "estimate": r.estimate, "std_error": r.std_error,
        "deviation": r.deviation, "ok": r.ok,
    }


def _mc_statistic_moments(dist, mode, u_center, u_sent, sigma2, draws, chunk, rng):
    """Empirical (mean, var, se_mean, se_var) of the verifier statistic.

    Accumulation is centered on the closed-form mean so the fourth-power
    sums stay small; th_mean is added back before returning.
    """
    n = u_center.size
    m = dist.moments()
    th_mean, _ = impostor_moments(u_center, u_sent, sigma2, m, mode)
    sigma = math.sqrt(sigma2)
    s1 = s2 = s3 = s4 = 0.0
    done = 0
    while done < draws:
        b = min(chunk, draws - done)
        h = np.asarray(dist.sample(rng, (b, n)), dtype=float)
        z = sigma * rng.standard_normal((b, n))
        y = h * u_sent + z
        if mode == "csi":
            w = np.sum((y - h * u_center) ** 2, axis=1) - th_mean
        else:
            w = np.sum((y - m.c * u_center) ** 2, axis=1) - th_mean
        s1 += float(w.sum())
        s2 += float((w * w).sum())
        s3 += float((w**3).sum())
        s4 += float((w**4).sum())
        done += b
    N = draws
    mean_w = s1 / N
    var = s2 / N - mean_w**2
    m4 = s4 / N - 4 * mean_w * s3 / N + 6 * mean_w**2 * s2 / N - 3 * mean_w**4
    se_mean = math.sqrt(max(var, 0.0) / N)
    se_var = math.sqrt(max(m4 - var * var, 0.0) / N)
    return th_mean + mean_w, var, se_mean, se_var


def moment_validation(cfg: MomentGridConfig) -> MomentReport:
    """Monte Carlo check of every closed-form statistic moment in the grid."""
    t0 = time.perf_counter()
    rng_vectors = _gen(cfg.seed, 10)
    vecs = [
        math.sqrt(cfg.vector_power) * rng_vectors.standard_normal(cfg.n)
        for _ in range(max(3, cfg.pair_count))
    ]
    pairs = [(vecs[i % len(vecs)], vecs[(i + 1) % len(vecs)]) for i in range(cfg.pair_count)]
    rows: list[MomentCheckRow] = []
    for dist in cfg.distributions:
        m = dist.moments()
        for mode in cfg.modes:
            for pi, (u_center, u_sent) in enumerate(pairs):
                label = f"{dist.to_config()['type']}/{mode}/pair{pi}"
                for stat_name, sent in (("genuine", u_center), ("impostor", u_sent)):
                    th_mean, th_var = impostor_moments(u_center, sent, cfg.sigma2, m, mode)
                    rng = _gen(cfg.seed, 11, hash_label(label), 0 if stat_name == "genuine" else 1)
                    est_mean, est_var, se_mean, se_var = _mc_statistic_moments(
                        dist, mode, u_center, sent, cfg.sigma2, cfg.draws, cfg.chunk, rng
                    )
                    for quantity, formula, est, se in (
                        ("mean", th_mean, est_mean, se_mean),
                        ("variance", th_var, est_var, se_var),
                    ):
                        dev = abs(est - formula) / se if se > 0 else 0.0
                        rows.append(MomentCheckRow(
                            case=label, statistic=stat_name, quantity=quantity,
                            formula=formula, estimate=est, std_error=se,
                            deviation=dev, ok=dev <= cfg.tolerance_sigmas,
                        ))
    return MomentReport(rows=rows, draws=cfg.draws, elapsed_s=time.perf_counter() - t0)


def hash_label(label: str) -> int:
    """Stable small hash (Python's hash() is salted per process)."""
    h = 0
    for ch in label.encode():
        h = (h * 131 + ch) % (1 << 31)
    return h
