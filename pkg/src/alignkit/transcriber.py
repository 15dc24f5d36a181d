"""Simulated transcription as a noisy character channel.

Real ASR is replaced by a channel that corrupts the true segment text with
per-character substitutions, insertions, and deletions at configured rates.
The channel is a pure function of (params, stream_pos): every draw comes from
a counter-based generator keyed by the channel seed and the caller-supplied
stream position, so hypotheses are reproducible regardless of evaluation
order or thread schedule.

Model improvement ("fine-tuning") is a one-parameter learning curve: the
total error rate decays exponentially toward a floor as retained hours
accumulate, and the sub/ins/del mixture is preserved proportionally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Protocol

import numpy as np

from .errors import ConfigError, DataError

_U64 = 2**64

# Difficulty scaling can push rates past certainty; clamp the total so the
# channel stays a proper distribution over {keep, sub, del}.
_MAX_TOTAL = 0.95


@dataclass(frozen=True)
class NoiseParams:
    """Per-character channel rates plus the substitution/insertion alphabet."""

    sub_rate: float
    ins_rate: float
    del_rate: float
    alphabet: str = "abcdefghijklmnopqrstuvwxyz "
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("sub_rate", "ins_rate", "del_rate"):
            r = getattr(self, name)
            if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 <= r < 1.0):
                raise ConfigError(f"{name} must lie in [0, 1), got {r!r}")
        if self.total_rate >= 1.0:
            raise ConfigError(
                f"rate sum must be < 1, got {self.total_rate:.6g}"
            )
        if (self.sub_rate > 0 or self.ins_rate > 0) and not self.alphabet:
            raise ConfigError("alphabet must be non-empty when sub/ins rates are positive")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ConfigError("alphabet characters must be unique")
        if not (isinstance(self.seed, int) and 0 <= self.seed < _U64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def total_rate(self) -> float:
        return self.sub_rate + self.ins_rate + self.del_rate

    def scaled(self, factor: float) -> NoiseParams:
        """Rates multiplied by `factor`, mixture preserved, total clamped."""
        if not (math.isfinite(factor) and factor >= 0.0):
            raise ConfigError(f"scale factor must be finite and >= 0, got {factor!r}")
        total = self.total_rate * factor
        if total > _MAX_TOTAL:
            factor *= _MAX_TOTAL / total
        return replace(
            self,
            sub_rate=self.sub_rate * factor,
            ins_rate=self.ins_rate * factor,
            del_rate=self.del_rate * factor,
        )


@dataclass(frozen=True)
class LearningCurve:
    """Exponential decay of the total channel error toward a floor.

    rate_after(h) = floor + (initial_total - floor) * 2**(-h / halving_hours)
    """

    initial_rates: NoiseParams
    floor_rate: float = 0.05
    halving_hours: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.floor_rate) and 0.0 <= self.floor_rate < 1.0):
            raise ConfigError(f"floor_rate must lie in [0, 1), got {self.floor_rate!r}")
        if not (math.isfinite(self.halving_hours) and self.halving_hours > 0.0):
            raise ConfigError(f"halving_hours must be positive, got {self.halving_hours!r}")

    def rate_after(self, retained_hours: float) -> float:
        """Total error rate after fine-tuning on `retained_hours` of audio."""
        if retained_hours < 0:
            raise ConfigError(f"retained_hours must be >= 0, got {retained_hours!r}")
        total0 = self.initial_rates.total_rate
        if total0 <= self.floor_rate:
            # Already at or below the floor: fine-tuning cannot help.
            return total0
        excess = total0 - self.floor_rate
        return self.floor_rate + excess * 2.0 ** (-retained_hours / self.halving_hours)


def improved_params(curve: LearningCurve, retained_hours: float) -> NoiseParams:
    """Channel rates after fine-tuning, mixture preserved proportionally."""
    total0 = curve.initial_rates.total_rate
    total = curve.rate_after(retained_hours)
    if total0 <= 0.0:
        return curve.initial_rates
    return curve.initial_rates.scaled(total / total0)


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype="<u4")


def transcribe(true_text: str, params: NoiseParams, stream_pos: int) -> str:
    """Run the channel over `true_text`; deterministic in (seed, stream_pos)."""
    if not true_text:
        raise DataError("cannot transcribe empty text")
    if not (isinstance(stream_pos, int) and 0 <= stream_pos < _U64):
        raise DataError(f"stream_pos must be a 64-bit unsigned integer, got {stream_pos!r}")

    n = len(true_text)
    src = _codes(true_text)
    rng = np.random.Generator(
        np.random.Philox(key=np.array([params.seed, stream_pos], dtype=np.uint64))
    )

    ops = rng.random(n)
    keep = ops >= params.del_rate
    sub = keep & (ops < params.del_rate + params.sub_rate)
    ins = rng.random(n) < params.ins_rate

    alpha = _codes(params.alphabet)
    k = len(alpha)
    base = src.copy()
    sub_pos = np.nonzero(sub)[0]
    if sub_pos.size:
        picks = alpha[rng.integers(0, k, size=sub_pos.size)]
        if k > 1:
            # A substitution must change the character: bump colliding picks
            # to the next alphabet entry.
            clash = picks == src[sub_pos]
            if clash.any():
                idx = np.searchsorted(np.sort(alpha), picks[clash])
                picks[clash] = np.sort(alpha)[(idx + 1) % k]
        base[sub_pos] = picks
    ins_pos = np.nonzero(ins)[0]
    ins_chars = alpha[rng.integers(0, k, size=ins_pos.size)] if ins_pos.size else alpha[:0]

    counts = keep.astype(np.int64) + ins
    total = int(counts.sum())
    if total == 0:
        return ""
    out = np.empty(total, dtype="<u4")
    offs = np.concatenate(([0], np.cumsum(counts)[:-1]))
    kp = np.nonzero(keep)[0]
    out[offs[kp]] = base[kp]
    # Inserted characters land after the slot's own character when kept.
    out[offs[ins_pos] + keep[ins_pos]] = ins_chars
    return out.tobytes().decode("utf-32-le")


@dataclass(frozen=True)
class SimAudio:
    """Stand-in for an audio clip: the words actually spoken, a per-clip
    difficulty multiplier on the channel rates, and a stable stream id.
    Difficulty 0 models a perfectly clean recording."""

    true_text: str
    stream_id: int
    difficulty: float = 1.0

    def __post_init__(self) -> None:
        if not self.true_text:
            raise DataError("SimAudio requires non-empty true_text")
        if not (isinstance(self.stream_id, int) and 0 <= self.stream_id < 2**32):
            raise DataError(f"stream_id must fit in 32 bits, got {self.stream_id!r}")
        if not (math.isfinite(self.difficulty) and self.difficulty >= 0):
            raise DataError(f"difficulty must be >= 0, got {self.difficulty!r}")


class Transcriber(Protocol):
    def transcribe(self, audio: SimAudio) -> str: ...


@dataclass(frozen=True)
class SimulatedTranscriber:
    """Channel-backed transcriber; `stream_salt` decorrelates repeat runs
    over the same clips (e.g. successive refinement passes)."""

    params: NoiseParams
    stream_salt: int = 0

    def __post_init__(self) -> None:
        if not (isinstance(self.stream_salt, int) and 0 <= self.stream_salt < 2**32):
            raise ConfigError(f"stream_salt must fit in 32 bits, got {self.stream_salt!r}")

    def transcribe(self, audio: SimAudio) -> str:
        eff = self.params.scaled(audio.difficulty)
        return transcribe(audio.true_text, eff, audio.stream_id + (self.stream_salt << 32))


@dataclass(frozen=True)
class PerfectTranscriber:
    """Returns the spoken text verbatim; useful as a refinement baseline."""

    def transcribe(self, audio: SimAudio) -> str:
        return audio.true_text


TranscriberFactory = Callable[[float, int], Transcriber]
"""(retained_hours, pass_index) -> transcriber for that pass."""


def learning_curve_transcriber(curve: LearningCurve) -> TranscriberFactory:
    """Factory wiring the learning curve into the refinement loop."""

    def at(retained_hours: float, pass_index: int) -> SimulatedTranscriber:
        return SimulatedTranscriber(
            params=improved_params(curve, retained_hours),
            stream_salt=pass_index,
        )

    return at


def fixed_transcriber(t: Transcriber) -> TranscriberFactory:
    """Factory that ignores retained hours; for baselines and tests."""
    return lambda retained_hours, pass_index: t
