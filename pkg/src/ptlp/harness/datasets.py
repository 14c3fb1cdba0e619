"""Labeled signal collections: UCR-style text files and the two-bump synthetic classes."""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..signal import DiscreteSignal, time_grid

__all__ = [
    "LabeledDataset",
    "load_ucr_tsv",
    "save_ucr_tsv",
    "gen_separability_data",
    "gaussian_bump",
]

_SPLIT = re.compile(r"[\t,]")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    signals: tuple[DiscreteSignal, ...]
    labels: tuple
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "signals", tuple(self.signals))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.signals) != len(self.labels):
            raise ValueError("signals and labels differ in length")
        if len(self.signals) < 2:
            raise ValueError("a dataset needs at least two signals")

    def __len__(self) -> int:
        return len(self.signals)

    @property
    def classes(self) -> list:
        return sorted(set(self.labels), key=str)

    @property
    def ragged(self) -> bool:
        return len({s.size for s in self.signals}) > 1

    def subset(self, index) -> "LabeledDataset":
        index = list(index)
        return LabeledDataset(
            [self.signals[i] for i in index], [self.labels[i] for i in index], self.name
        )

    def equals(self, other: "LabeledDataset") -> bool:
        if self.labels != other.labels or len(self) != len(other):
            return False
        return all(
            np.array_equal(a.positions, b.positions) and np.array_equal(a.values, b.values)
            for a, b in zip(self.signals, other.signals)
        )

    def digest(self) -> str:
        """SHA-256 over labels, positions and values."""
        h = hashlib.sha256()
        for label, sig in zip(self.labels, self.signals):
            h.update(repr(label).encode())
            h.update(np.ascontiguousarray(sig.positions).tobytes())
            h.update(np.ascontiguousarray(sig.values).tobytes())
        return h.hexdigest()


def _parse_label(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        f = float(tok)
    except ValueError:
        return tok
    return int(f) if f.is_integer() else tok


def load_ucr_tsv(path, name: str | None = None) -> LabeledDataset:
    """Read one labeled series per line: label, then values (tab or comma separated).

    Rows may differ in length. Each row becomes a single-channel signal on
    ``time_grid(len(row))``. Integer-looking labels become ints (``"1.0"`` too);
    anything else is kept as a string.
    """
    path = Path(path)
    signals, labels = [], []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            toks = [t.strip() for t in _SPLIT.split(line)]
            toks = [t for t in toks if t != ""]
            if len(toks) < 2:
                raise ValueError(f"{path}:{lineno}: expected a label and at least one value")
            try:
                vals = np.array([float(t) for t in toks[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            labels.append(_parse_label(toks[0]))
            signals.append(DiscreteSignal(time_grid(vals.size), vals))
    if not signals:
        raise ValueError(f"{path}: no data rows")
    return LabeledDataset(signals, labels, name or path.stem)


def save_ucr_tsv(dataset: LabeledDataset, path) -> None:
    """Write single-channel signals as ``label<TAB>v0<TAB>v1...`` (values via repr)."""
    lines = []
    for label, sig in zip(dataset.labels, dataset.signals):
        if sig.channels != 1:
            raise ValueError("the UCR text format holds single-channel signals only")
        lines.append("\t".join([str(label)] + [repr(float(v)) for v in sig.values[:, 0]]))
    Path(path).write_text("\n".join(lines) + "\n")


def gaussian_bump(t: np.ndarray, center: float, width: float) -> np.ndarray:
    """Gaussian profile with peak height 1 at ``center``."""
    return np.exp(-0.5 * ((t - center) / width) ** 2)


def gen_separability_data(
    n_per_class: int,
    noisy: bool = False,
    seed: int | None = 0,
    n_points: int = 256,
) -> LabeledDataset:
    """Two synthetic classes on [0, 1].

    Class 0 carries one positive bump (width 0.01); class 1 a positive and a
    negative bump of width ``0.01 / sqrt(2)`` centred 0.001 either side of the
    location. With ``noisy`` each signal also gets a blip of amplitude +-0.5
    (width ``0.001 * sqrt(5)``) at a fresh location plus N(0, 0.1^2) noise.
    Signals are interleaved 0, 1, 0, 1, ...
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    rng = np.random.default_rng(seed)
    t = time_grid(n_points)
    s0, s1 = 0.01, 0.01 / math.sqrt(2.0)
    se = 0.001 * math.sqrt(5.0)
    signals, labels = [], []
    for _ in range(n_per_class):
        for label in (0, 1):
            x = 0.98 * rng.uniform() + 0.01
            if label == 0:
                f = gaussian_bump(t, x, s0)
            else:
                f = gaussian_bump(t, x + 0.001, s1) - gaussian_bump(t, x - 0.001, s1)
            if noisy:
                alpha = rng.choice([-0.5, 0.5])
                xb = 0.98 * rng.uniform() + 0.01
                f = f + alpha * gaussian_bump(t, xb, se) + 0.1 * rng.standard_normal(n_points)
            signals.append(DiscreteSignal(t, f))
            labels.append(label)
    return LabeledDataset(signals, labels, "separability-noisy" if noisy else "separability")
