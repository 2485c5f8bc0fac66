"""Deterministic tick-cost model of the separation and mapping pipelines.

Each pipeline is a fixed list of stages; a stage costs samples x taps ticks.
With zero accelerators every stage serializes. With two accelerators the
separation pipeline runs each low/high filter pair concurrently (the pair
costs its maximum), while the mapping pipeline splits every stage's batch
across the two units (each stage costs half, rounded up). Scheduling never
touches the arithmetic, so outputs are identical across configurations and
are reported with a checksum to prove it.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass

import numpy as np

from . import despike, tfmap
from .swt import iswt_reconstruct, swt_decompose, wavelet_filters
from .tfmap import MorletParams, morlet_kernel, pseudo_frequency

__all__ = [
    "PipelineConfig",
    "Stage",
    "TickReport",
    "benchmark_report",
    "mapping_stages",
    "quantize_microvolts",
    "run_mapping_pipeline",
    "run_pipeline",
    "separation_stages",
]

QUANT_LOW_UV = -100.0
QUANT_LEVELS = 250


@dataclass(frozen=True)
class Stage:
    """One multiply-accumulate batch: n_values samples by taps coefficients.

    Stages sharing a group id may run concurrently on separate accelerators;
    writes lists (memory name, sample count) pairs logged when the stage runs.
    """

    name: str
    n_values: int
    taps: int
    group: str = None
    writes: tuple = ()

    @property
    def cost(self):
        return self.n_values * self.taps


@dataclass(frozen=True)
class PipelineConfig:
    """Accelerator count, quantization switch, and data-vector capacity."""

    accelerators: int = 0
    quantize_input: bool = False
    label: str = ""
    data_capacity: int = 5000

    def __post_init__(self):
        if self.accelerators not in (0, 2):
            raise ValueError(
                f"accelerators must be 0 or 2, got {self.accelerators}"
            )
        if self.data_capacity < 1:
            raise ValueError(
                f"data_capacity must be positive, got {self.data_capacity}"
            )


@dataclass(frozen=True)
class TickReport:
    total_ticks: int
    per_stage_ticks: dict
    per_memory_writes: dict
    output_checksum: int


def quantize_microvolts(x):
    """Snap amplitudes to the 250 stored integer microvolt levels.

    Values are clipped to [-100, 149] and rounded to whole microvolts,
    a 1 uV step across the stored range.
    """
    x = np.asarray(x, dtype=np.float64)
    levels = np.clip(np.rint(x - QUANT_LOW_UV), 0, QUANT_LEVELS - 1)
    return levels + QUANT_LOW_UV


def _checksum(arr):
    return zlib.crc32(np.ascontiguousarray(arr, dtype=np.float64).tobytes())


def _pair_max_ticks(stages, accelerators):
    """Serial sum, except grouped stages cost their max when accelerated."""
    per_stage = {s.name: s.cost for s in stages}
    if accelerators == 0:
        return sum(per_stage.values()), per_stage
    total = 0
    seen_groups = {}
    for s in stages:
        if s.group is None:
            total += s.cost
        else:
            seen_groups.setdefault(s.group, []).append(s.cost)
    for costs in seen_groups.values():
        total += max(costs)
    return total, per_stage

def _split_ticks(stages, accelerators):
    """Every stage's batch divided evenly across the accelerators."""
    divisor = max(1, accelerators)
    per_stage = {s.name: -(-s.cost // divisor) for s in stages}
    return sum(per_stage.values()), per_stage


def _memory_writes(stages):
    writes = {}
    for s in stages:
        for memory, count in s.writes:
            writes[memory] = writes.get(memory, 0) + count
    return writes


def separation_stages(n_samples, filters, levels, mask):
    """Stage list of the separation pipeline for one channel.

    Analysis and synthesis convolutions come in low/high pairs per level,
    masking costs one pass over the detail stack and one over the deepest
    approximation, and each synthesis level ends with a serial combine.
    Memory traffic follows the chain: analysis outputs land in Msa/Msd,
    masked coefficients in Ma/Md with the complement in Mat/Mdt, and the
    final reconstruction is written out externally.
    """
    n = int(n_samples)
    k = filters.length
    stages = []
    for j in range(1, levels + 1):
        stages.append(
            Stage(f"analysis_lo_L{j}", n, k, group=f"analysis_L{j}",
                  writes=(("Msa", n),))
        )
        stages.append(
            Stage(f"analysis_hi_L{j}", n, k, group=f"analysis_L{j}",
                  writes=(("Msd", n),))
        )
    stages.append(
        Stage("mask_details", n * levels, 1, group="mask",
              writes=(("Md", n * levels), ("Mdt", n * levels)))
    )
    stages.append(
        Stage("mask_approx", n, 1, group="mask",
              writes=(("Ma", n), ("Mat", n)))
    )
    for j in range(levels, 0, -1):
        stages.append(
            Stage(f"synthesis_lo_L{j}", n, k, group=f"synthesis_L{j}")
        )
        stages.append(
            Stage(f"synthesis_hi_L{j}", n, k, group=f"synthesis_L{j}")
        )
        combine_writes = (("external", n),) if j == 1 else ()
        stages.append(Stage(f"combine_L{j}", n, 1, writes=combine_writes))
    return stages


def run_pipeline(x, config, filters=None, mask=None, levels=despike.DEFAULT_LEVELS,
                 sample_rate_hz=512.0, target_freq_hz=85.0):
    """Oscillatory reconstruction of one channel plus its tick accounting.

    The numeric path is exactly the separation pipeline; the mask may be
    given explicitly or is placed by the standard detector first (placement
    is not metered). Quantization, when enabled, snaps the input before
    anything runs.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size != config.data_capacity:
        raise ValueError(
            f"input length {x.size} does not match data-vector capacity "
            f"{config.data_capacity}"
        )
    if filters is None:
        filters = wavelet_filters("db4")
    if config.quantize_input:
        x = quantize_microvolts(x)
    coeffs = swt_decompose(x, filters, levels)
    if mask is None:
        center = despike.detect_oscillation_center(
            coeffs, target_freq_hz, sample_rate_hz,
            filter_length=filters.dec_lo.size,
        )
        mask = despike.build_mask(center, target_freq_hz, sample_rate_hz, x.size)
    osc_coeffs, _ = despike.threshold_coeffs(coeffs, mask)
    output = iswt_reconstruct(osc_coeffs, filters)

    stages = separation_stages(x.size, filters, levels, mask)
    total, per_stage = _pair_max_ticks(stages, config.accelerators)
    report = TickReport(
        total_ticks=total,
        per_stage_ticks=per_stage,
        per_memory_writes=_memory_writes(stages),
        output_checksum=_checksum(output),
    )
    return output, report


def mapping_stages(n_samples, params, band_hz):
    """Stage list of the band-energy mapping pipeline for one channel.

    A band-pass FIR, one convolution per scale (each writing a row into Mw),
    the cross-scale energy mean, the wide smoother (Ms), the low-band
    normalization path, and the final division (Mn).
    """
    n = int(n_samples)
    bp_len = tfmap.bandpass_taps(band_hz, params.sample_rate_hz).size
    stages = [Stage("bandpass_band", n, bp_len)]
    for i, a in enumerate(params.scales):
        klen = morlet_kernel(params, a).size
        stages.append(Stage(f"scale_conv_{i}", n, klen, writes=(("Mw", n),)))
    stages.append(Stage("band_energy_mean", n, len(params.scales)))
    stages.append(Stage("smooth_band", n, tfmap.SMOOTH_WIDTH, writes=(("Ms", n),)))
    stages.append(Stage("bandpass_low", n, bp_len))
    stages.append(Stage("square_low", n, 1))
    stages.append(Stage("smooth_low", n, tfmap.SMOOTH_WIDTH, writes=(("Ms", n),)))
    stages.append(Stage("normalize", n, 1, writes=(("Mn", n),)))
    return stages


def _band_from_scales(params):
    freqs = [pseudo_frequency(a, params.sample_rate_hz, params.w0)
             for a in params.scales]
    return (round(min(freqs), 9), round(max(freqs), 9))


def run_mapping_pipeline(x, config, params, band_hz=None):
    """One channel's normalized band-energy row plus its tick accounting.

    The band defaults to the span of the scales' pseudo-frequencies. Ticks
    are structural: they depend on the stage list, never on the data.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size != config.data_capacity:
        raise ValueError(
            f"input length {x.size} does not match data-vector capacity "
            f"{config.data_capacity}"
        )
    if band_hz is None:
        band_hz = _band_from_scales(params)
    params = MorletParams.for_band(
        band_hz, params.sample_rate_hz, w0=params.w0, s=params.s
    )
    if config.quantize_input:
        x = quantize_microvolts(x)
    output = tfmap.map_row(x, band_hz, params)

    stages = mapping_stages(x.size, params, band_hz)
    if config.accelerators == 0:
        total, per_stage = _split_ticks(stages, 1)
    else:
        total, per_stage = _split_ticks(stages, config.accelerators)
    report = TickReport(
        total_ticks=total,
        per_stage_ticks=per_stage,
        per_memory_writes=_memory_writes(stages),
        output_checksum=_checksum(output),
    )
    return output, report


def benchmark_report(configs, workload, repetitions=200, target_freq_hz=85.0,
                     band_hz=(80.0, 90.0)):
    """Tick totals and ratios for each config over a repeated workload.

    Every channel of the workload runs `repetitions` times through both
    pipelines (ticks are data-independent, so repetition multiplies). The
    returned dict carries a CSV table and a text summary, both reproducible
    byte for byte, plus the measured wall-clock seconds of one plain
    software pass over the workload, kept out of the deterministic parts.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("need at least one config")
    fs = workload.sample_rate_hz
    filters = wavelet_filters("db4")
    n = workload.n_samples

    rows = []
    for config in configs:
        sep_total = 0
        map_total = 0
        sep_checksums = []
        map_checksums = []
        for ch in range(workload.n_channels):
            x = workload.data[ch]
            _, sep_report = run_pipeline(
                x, config, filters=filters, sample_rate_hz=fs,
                target_freq_hz=target_freq_hz,
            )
            params = MorletParams.for_band(band_hz, fs)
            _, map_report = run_mapping_pipeline(x, config, params, band_hz)
            sep_total += sep_report.total_ticks * repetitions
            map_total += map_report.total_ticks * repetitions
            sep_checksums.append(sep_report.output_checksum)
            map_checksums.append(map_report.output_checksum)
        rows.append(
            {
                "label": config.label or f"accel{config.accelerators}",
                "accelerators": config.accelerators,
                "separation_ticks": sep_total,
                "mapping_ticks": map_total,
                "separation_checksum": zlib.crc32(
                    b"".join(c.to_bytes(4, "little") for c in sep_checksums)
                ),
                "mapping_checksum": zlib.crc32(
                    b"".join(c.to_bytes(4, "little") for c in map_checksums)
                ),
            }
        )

    start = time.perf_counter()
    for ch in range(workload.n_channels):
        despike.separate(workload.data[ch], target_freq_hz, fs, filters)
    wall_clock_s = time.perf_counter() - start

    csv_lines = [
        "label,accelerators,separation_ticks,mapping_ticks,"
        "separation_checksum,mapping_checksum"
    ]
    for row in rows:
        csv_lines.append(
            "{label},{accelerators},{separation_ticks},{mapping_ticks},"
            "{separation_checksum},{mapping_checksum}".format(**row)
        )

    text_lines = [
        f"workload: {workload.n_channels} channels x {n} samples, "
        f"{repetitions} repetitions per channel",
    ]
    for row in rows:
        text_lines.append(
            "{label}: separation {separation_ticks} ticks, "
            "mapping {mapping_ticks} ticks".format(**row)
        )
    if len(rows) >= 2:
        base = min(rows, key=lambda r: r["accelerators"])
        for row in rows:
            if row is base or row["accelerators"] == base["accelerators"]:
                continue
            sep_ratio = base["separation_ticks"] / row["separation_ticks"]
            map_ratio = base["mapping_ticks"] / row["mapping_ticks"]
            text_lines.append(
                f"speedup {base['label']}/{row['label']}: "
                f"separation {sep_ratio:.4f}, mapping {map_ratio:.4f}"
            )
            text_lines.append(
                "outputs identical: "
                + (
                    "yes"
                    if row["separation_checksum"] == base["separation_checksum"]
                    and row["mapping_checksum"] == base["mapping_checksum"]
                    else "no"
                )
            )
    return {
        "csv": "\n".join(csv_lines) + "\n",
        "text": "\n".join(text_lines) + "\n",
        "wall_clock_s": wall_clock_s,
    }
