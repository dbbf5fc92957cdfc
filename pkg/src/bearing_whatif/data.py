"""Vibration window datasets: ingestion, labeling, normalization.

A :class:`Window` is one fixed-length multichannel acceleration segment;
a :class:`Dataset` is an ordered sequence of them plus channel metadata.
Labeling follows the three-sigma rule on per-window RMS, with a suffix
smoothing pass that extends the trailing anomalous run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import (
    ConfigError,
    EmptyInput,
    InsufficientData,
    MalformedFile,
    ShapeError,
)
from .seeding import rng_for

HEALTHY = 0
ANOMALOUS = 1

#: Lower bound applied to per-channel std so z-scoring never divides by zero.
STD_FLOOR = 1e-8

DATASET_FORMAT_VERSION = "1"
MANIFEST_NAME = "manifest.json"
WINDOWS_NAME = "windows.ndjson"


@dataclass(frozen=True)
class Window:
    """One multichannel acceleration segment.

    ``values`` has shape [channels, timesteps]; ``label`` is ``HEALTHY``,
    ``ANOMALOUS`` or ``None`` when not yet labeled.
    """

    id: int
    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ShapeError(f"window values must be [channels, timesteps], got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ShapeError(f"window {self.id} contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def timesteps(self) -> int:
        return self.values.shape[1]

    def with_label(self, label: int) -> "Window":
        return replace(self, label=label)


@dataclass(frozen=True)
class LabelingStats:
    """Per-channel RMS statistics behind a three-sigma labeling."""

    rms_mean: tuple[float, ...]
    rms_std: tuple[float, ...]

    @property
    def threshold(self) -> tuple[float, ...]:
        return tuple(m + 3.0 * s for m, s in zip(self.rms_mean, self.rms_std))


@dataclass(frozen=True)
class Normalizer:
    """Per-channel z-score parameters (std floored to ``STD_FLOOR``)."""

    mean: tuple[float, ...]
    std: tuple[float, ...]

    def apply(self, window: Window) -> Window:
        mean = np.asarray(self.mean)[:, None]
        std = np.asarray(self.std)[:, None]
        return replace(window, values=(window.values - mean) / std)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Normalize raw values of shape [..., channels, timesteps]."""
        mean = np.asarray(self.mean)[:, None]
        std = np.asarray(self.std)[:, None]
        return (np.asarray(values, dtype=np.float64) - mean) / std

    def invert(self, window: Window) -> Window:
        mean = np.asarray(self.mean)[:, None]
        std = np.asarray(self.std)[:, None]
        return replace(window, values=window.values * std + mean)


@dataclass
class Dataset:
    """Ordered windows plus channel metadata and optional fitted stats."""

    windows: list[Window]
    channel_names: list[str]
    window_len: int
    labeling: LabelingStats | None = None
    normalizer: Normalizer | None = None
    _index: dict[int, int] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        n_channels = len(self.channel_names)
        prev_id = None
        for w in self.windows:
            if w.channels != n_channels or w.timesteps != self.window_len:
                raise ShapeError(
                    f"window {w.id} has shape {w.values.shape}, expected "
                    f"[{n_channels}, {self.window_len}]"
                )
            if prev_id is not None and w.id <= prev_id:
                raise ShapeError(f"window ids must be strictly increasing, saw {w.id} after {prev_id}")
            prev_id = w.id
        if self.labeling is not None and any(w.label is None for w in self.windows):
            raise ShapeError("labeling stats present but some windows are unlabeled")
        self._index = {w.id: i for i, w in enumerate(self.windows)}

    def __len__(self) -> int:
        return len(self.windows)

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    def labels(self) -> list[int | None]:
        return [w.label for w in self.windows]

    def window_by_id(self, window_id: int) -> Window:
        try:
            return self.windows[self._index[window_id]]
        except KeyError:
            raise KeyError(f"no window with id {window_id}") from None

    def values_array(self) -> np.ndarray:
        """Stacked values, shape [n_windows, channels, timesteps]."""
        return np.stack([w.values for w in self.windows])

    def replace_windows(self, windows: list[Window], **changes) -> "Dataset":
        return Dataset(
            windows=windows,
            channel_names=list(self.channel_names),
            window_len=self.window_len,
            labeling=changes.get("labeling", self.labeling),
            normalizer=changes.get("normalizer", self.normalizer),
        )


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters for the synthetic run-to-failure generator."""

    n_windows: int = 400
    window_len: int = 64
    channels: int = 2
    base_amplitude: float = 1.0
    degradation_onset: float = 0.8
    degradation_rate: float = 0.05
    noise_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_windows < 2:
            raise ConfigError("n_windows must be >= 2")
        if self.window_len < 2:
            raise ConfigError("window_len must be >= 2")
        if self.channels < 1:
            raise ConfigError("channels must be >= 1")
        if not 0.0 <= self.degradation_onset <= 1.0:
            raise ConfigError("degradation_onset must lie in [0, 1]")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if self.base_amplitude <= 0:
            raise ConfigError("base_amplitude must be > 0")


# ---------------------------------------------------------------------------
# PRONOSTIA ingestion
# ---------------------------------------------------------------------------

PRONOSTIA_CHANNELS = ["horizontal", "vertical"]
PRONOSTIA_WINDOW_LEN = 2560
_PRONOSTIA_FIELDS = 6  # hour, minute, second, microsecond, horizontal, vertical


def parse_pronostia_file(text: str | IO[str], expected_len: int, window_id: int = 0) -> Window:
    """Parse one PRONOSTIA acceleration file into a two-channel window.

    Rows are comma-separated: four timestamp fields (discarded) followed by
    horizontal and vertical acceleration. The file must contain exactly
    ``expected_len`` rows.
    """
    if hasattr(text, "read"):
        lines = text.read().splitlines()
    else:
        lines = text.splitlines()
    rows = [line for line in lines if line.strip()]
    if len(rows) != expected_len:
        raise MalformedFile(f"expected {expected_len} rows, found {len(rows)}")
    horizontal = np.empty(expected_len)
    vertical = np.empty(expected_len)
    for i, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != _PRONOSTIA_FIELDS:
            raise MalformedFile(f"row {i + 1}: expected {_PRONOSTIA_FIELDS} fields, found {len(parts)}")
        try:
            horizontal[i] = float(parts[4])
            vertical[i] = float(parts[5])
        except ValueError as exc:
            raise MalformedFile(f"row {i + 1}: non-numeric acceleration field") from exc
    return Window(id=window_id, values=np.stack([horizontal, vertical]))


def format_pronostia(window: Window) -> str:
    """Serialize a two-channel window back to the acceleration file layout.

    Timestamp fields are written as zeros; ``repr`` keeps every float
    bit-exact through a parse round trip.
    """
    if window.channels != 2:
        raise ShapeError("PRONOSTIA layout holds exactly two channels")
    lines = [
        f"0,0,0,0,{h!r},{v!r}"
        for h, v in zip(window.values[0], window.values[1])
    ]
    return "\n".join(lines) + "\n"


def ingest_pronostia_dir(directory: str | Path, window_len: int = PRONOSTIA_WINDOW_LEN) -> Dataset:
    """Read every ``acc_*.csv`` file under ``directory`` in lexicographic order."""
    directory = Path(directory)
    files = sorted(directory.glob("acc_*.csv"))
    if not files:
        raise MalformedFile(f"no acc_*.csv files under {directory}")
    windows = []
    for i, path in enumerate(files):
        try:
            windows.append(parse_pronostia_file(path.read_text(), window_len, window_id=i))
        except MalformedFile as exc:
            raise MalformedFile(f"{path.name}: {exc}") from exc
    return Dataset(windows=windows, channel_names=list(PRONOSTIA_CHANNELS), window_len=window_len)


# ---------------------------------------------------------------------------
# Labeling
# ---------------------------------------------------------------------------


def rms(series: Iterable[float] | np.ndarray) -> float:
    """Root mean square: sqrt of the mean squared sample."""
    arr = np.asarray(series, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("rms of an empty series")
    return float(np.sqrt(np.mean(arr * arr)))


def three_sigma_label(ds: Dataset) -> tuple[Dataset, LabelingStats]:
    """Label windows anomalous when any channel RMS exceeds mean + 3 std.

    Statistics use the population std of per-window RMS over the whole
    dataset; comparison is strict, so a zero-spread channel never labels
    anything. Existing labels are ignored and overwritten.
    """
    if len(ds) < 2:
        raise InsufficientData("need at least 2 windows to estimate RMS statistics")
    values = ds.values_array()  # [n, channels, T]
    window_rms = np.sqrt(np.mean(values * values, axis=2))  # [n, channels]
    mean = window_rms.mean(axis=0)
    std = window_rms.std(axis=0)  # population std
    threshold = mean + 3.0 * std
    anomalous = np.any(window_rms > threshold, axis=1)
    stats = LabelingStats(rms_mean=tuple(map(float, mean)), rms_std=tuple(map(float, std)))
    labeled = [w.with_label(ANOMALOUS if a else HEALTHY) for w, a in zip(ds.windows, anomalous)]
    return ds.replace_windows(labeled, labeling=stats), stats


def suffix_smooth_labels(labels: Iterable[int]) -> list[int]:
    """One backward pass over raw labels: a window turns anomalous when
    everything after it already is.

    The last window keeps its raw label (its suffix is empty). The suffix
    test reads the raw input throughout, so a single call extends the
    trailing anomalous run by at most one window.
    """
    raw = list(labels)
    if not raw:
        raise EmptyInput("cannot smooth an empty label vector")
    smoothed = list(raw)
    suffix_all_anomalous = True
    for i in range(len(raw) - 2, -1, -1):
        suffix_all_anomalous = suffix_all_anomalous and raw[i + 1] == ANOMALOUS
        if suffix_all_anomalous:
            smoothed[i] = ANOMALOUS
    return smoothed


def label_dataset(ds: Dataset) -> tuple[Dataset, LabelingStats]:
    """Three-sigma labeling followed by suffix smoothing."""
    labeled, stats = three_sigma_label(ds)
    smoothed = suffix_smooth_labels([w.label for w in labeled.windows])
    windows = [w.with_label(lab) for w, lab in zip(labeled.windows, smoothed)]
    return labeled.replace_windows(windows, labeling=stats), stats


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------


def generate_synthetic_bearing(cfg: SyntheticConfig) -> Dataset:
    """Deterministic sinusoidal run-to-failure data.

    Each window is a sine per channel (phases offset by 90 degrees) with
    additive Gaussian noise; amplitude stays at ``base_amplitude`` until the
    degradation onset, then grows by ``degradation_rate`` per window.
    """
    rng = rng_for(cfg.seed, "synth")
    onset_idx = int(math.floor(cfg.degradation_onset * cfg.n_windows))
    t = np.arange(cfg.window_len)
    cycles = 5.0  # sine periods per window
    base_wave = 2.0 * np.pi * cycles * t / cfg.window_len
    windows = []
    for w in range(cfg.n_windows):
        grown = max(0, w - onset_idx + 1)
        amplitude = cfg.base_amplitude + cfg.degradation_rate * grown
        values = np.empty((cfg.channels, cfg.window_len))
        for c in range(cfg.channels):
            phase = c * np.pi / 2.0
            values[c] = amplitude * np.sin(base_wave + phase)
        values += rng.normal(0.0, cfg.noise_std, size=values.shape) if cfg.noise_std > 0 else 0.0
        windows.append(Window(id=w, values=values))
    names = [f"channel{c}" for c in range(cfg.channels)]
    return Dataset(windows=windows, channel_names=names, window_len=cfg.window_len)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def fit_normalizer(ds: Dataset) -> Normalizer:
    """Per-channel mean/std over every sample of every window."""
    values = ds.values_array()  # [n, channels, T]
    mean = values.mean(axis=(0, 2))
    std = np.maximum(values.std(axis=(0, 2)), STD_FLOOR)
    return Normalizer(mean=tuple(map(float, mean)), std=tuple(map(float, std)))


def apply_normalizer(normalizer: Normalizer, window: Window) -> Window:
    return normalizer.apply(window)


# ---------------------------------------------------------------------------
# Persistence: manifest + newline-delimited window records
# ---------------------------------------------------------------------------


def save_dataset(ds: Dataset, directory: str | Path) -> Path:
    """Write ``manifest.json`` plus ``windows.ndjson`` under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "version": DATASET_FORMAT_VERSION,
        "channels": list(ds.channel_names),
        "window_len": ds.window_len,
        "labeling": None
        if ds.labeling is None
        else {
            "rms_mean": list(ds.labeling.rms_mean),
            "rms_std": list(ds.labeling.rms_std),
            "threshold": list(ds.labeling.threshold),
        },
        "normalizer": None
        if ds.normalizer is None
        else {"mean": list(ds.normalizer.mean), "std": list(ds.normalizer.std)},
        "n_windows": len(ds),
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    with open(directory / WINDOWS_NAME, "w") as fh:
        for w in ds.windows:
            record = {"id": w.id, "label": w.label, "values": w.values.tolist()}
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return directory


def load_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise MalformedFile(f"missing {MANIFEST_NAME} under {directory}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"unreadable manifest: {exc}") from exc
    if manifest.get("version") != DATASET_FORMAT_VERSION:
        raise MalformedFile(f"unsupported dataset format version {manifest.get('version')!r}")
    labeling = None
    if manifest.get("labeling"):
        labeling = LabelingStats(
            rms_mean=tuple(manifest["labeling"]["rms_mean"]),
            rms_std=tuple(manifest["labeling"]["rms_std"]),
        )
    normalizer = None
    if manifest.get("normalizer"):
        normalizer = Normalizer(
            mean=tuple(manifest["normalizer"]["mean"]),
            std=tuple(manifest["normalizer"]["std"]),
        )
    windows = []
    with open(directory / WINDOWS_NAME) as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedFile(f"unreadable window record: {exc}") from exc
            windows.append(
                Window(id=record["id"], values=np.array(record["values"]), label=record["label"])
            )
    return Dataset(
        windows=windows,
        channel_names=list(manifest["channels"]),
        window_len=manifest["window_len"],
        labeling=labeling,
        normalizer=normalizer,
    )
