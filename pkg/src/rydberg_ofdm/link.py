"""Image-link orchestration: codec selection, probing, and transport.

External codecs are command-line programs driven through two calls:

    <argv...> encode --in <input.pgm> --out <output.bits>
    <argv...> decode --in <input.bits> --out <output.pgm>

Images are binary 8-bit PGM; bit files use the 8-byte count header from
`frameio`. A codec must exit 0 on success and write diagnostics to stderr
on failure. Every descriptor is checked with a round-trip handshake before
it carries real traffic.
"""

import dataclasses
import enum
import json
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baseline_codec import (
    baseline_bits_per_image,
    baseline_decode,
    baseline_encode,
)
from .channel import apply_channel_stream
from .chain import receive_stream, run_chain, transmit_stream
from .constants import TAG_PROBE_BITS
from .errors import CodecError, ConfigError, FramingError
from .frameio import read_bit_file, write_bit_file
from .images import load_image, psnr, save_image, ssim

__all__ = [
    "BASELINE_CODEC_ID",
    "CodecDescriptor",
    "CodecKind",
    "CodecMappingTable",
    "ImageMetrics",
    "MappingEntry",
    "builtin_baseline_descriptor",
    "decode_image",
    "encode_image",
    "handshake",
    "probe_ber",
    "read_mapping_table",
    "run_image_link",
    "select_codec",
    "write_mapping_table",
]

BASELINE_CODEC_ID = "baseline-dct-rep3"
SUBPROCESS_TIMEOUT_S = 300.0
MIN_PROBE_BITS = 10_000


class CodecKind(enum.Enum):
    BUILTIN_BASELINE = "builtin_baseline"
    EXTERNAL_PROCESS = "external_process"


@dataclass(frozen=True)
class CodecDescriptor:
    """How to reach one codec and what stream size it commits to."""

    codec_id: str
    kind: CodecKind
    width: int
    height: int
    bits_per_image: int
    argv: tuple = ()

    def __post_init__(self):
        if not self.codec_id:
            raise ConfigError("codec_id must be nonempty")
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("codec image dimensions must be positive")
        if self.bits_per_image <= 0:
            raise ConfigError("bits_per_image must be positive")
        if self.kind is CodecKind.EXTERNAL_PROCESS and not self.argv:
            raise ConfigError(
                f"external codec {self.codec_id!r} needs a command line"
            )
        object.__setattr__(self, "argv", tuple(self.argv))


def builtin_baseline_descriptor(width=256, height=256):
    return CodecDescriptor(
        codec_id=BASELINE_CODEC_ID,
        kind=CodecKind.BUILTIN_BASELINE,
        width=width,
        height=height,
        bits_per_image=baseline_bits_per_image(width, height),
    )


def _check_image(descriptor, image):
    image = np.asarray(image)
    if image.ndim != 2 or image.dtype != np.uint8:
        raise CodecError("link images must be 2-D uint8 grayscale")
    if image.shape != (descriptor.height, descriptor.width):
        raise CodecError(
            f"codec {descriptor.codec_id!r} is declared for "
            f"{descriptor.width}x{descriptor.height}, got image "
            f"{image.shape[1]}x{image.shape[0]}"
        )
    return image


def _run_codec(descriptor, args):
    cmd = list(descriptor.argv) + args
    try:
        proc = subprocess.run(
            cmd, capture_output=True, timeout=SUBPROCESS_TIMEOUT_S
        )
    except OSError as exc:
        raise CodecError(
            f"codec {descriptor.codec_id!r} could not start: {exc}"
        ) from exc
    except subprocess.TimeoutExpired as exc:
        raise CodecError(
            f"codec {descriptor.codec_id!r} timed out after "
            f"{SUBPROCESS_TIMEOUT_S:.0f}s"
        ) from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace").strip()
        raise CodecError(
            f"codec {descriptor.codec_id!r} exited {proc.returncode}: "
            f"{stderr[-2000:]}"
        )


def encode_image(descriptor, image):
    """Run the descriptor's encoder; returns a 0/1 bit array."""
    image = _check_image(descriptor, image)
    if descriptor.kind is CodecKind.BUILTIN_BASELINE:
        return baseline_encode(image)
    with tempfile.TemporaryDirectory(prefix="rydberg-codec-") as tmp:
        image_path = Path(tmp) / "input.pgm"
        bits_path = Path(tmp) / "output.bits"
        save_image(image_path, image)
        _run_codec(descriptor, ["encode", "--in", str(image_path),
                                "--out", str(bits_path)])
        try:
            return read_bit_file(bits_path)
        except (OSError, FramingError) as exc:
            raise CodecError(
                f"codec {descriptor.codec_id!r} wrote an unreadable bit "
                f"file: {exc}"
            ) from exc


def decode_image(descriptor, bits):
    """Run the descriptor's decoder; returns a uint8 grayscale image."""
    bits = np.asarray(bits)
    if bits.size != descriptor.bits_per_image:
        raise FramingError(
            f"codec {descriptor.codec_id!r} expects "
            f"{descriptor.bits_per_image} bits, got {bits.size}"
        )
    if descriptor.kind is CodecKind.BUILTIN_BASELINE:
        return baseline_decode(bits, descriptor.width, descriptor.height)
    with tempfile.TemporaryDirectory(prefix="rydberg-codec-") as tmp:
        bits_path = Path(tmp) / "input.bits"
        image_path = Path(tmp) / "output.pgm"
        write_bit_file(bits_path, bits)
        _run_codec(descriptor, ["decode", "--in", str(bits_path),
                                "--out", str(image_path)])
        try:
            image = load_image(image_path)
        except (OSError, FramingError) as exc:
            raise CodecError(
                f"codec {descriptor.codec_id!r} wrote an unreadable image: "
                f"{exc}"
            ) from exc
    if image.ndim != 2 or image.shape != (descriptor.height, descriptor.width):
        raise CodecError(
            f"codec {descriptor.codec_id!r} decoded to shape {image.shape}, "
            f"declared {descriptor.height}x{descriptor.width}"
        )
    return image


def handshake(descriptor):
    """Round-trip a synthetic image through the codec before first use.

    Checks the encoder honors the declared stream length and the decoder
    returns an image of the declared size. Raises CodecError on any
    mismatch; lossy reconstruction is fine.
    """
    ramp = np.arange(descriptor.width, dtype=np.float64)
    probe = np.tile(ramp, (descriptor.height, 1))
    probe = np.rint(probe * (255.0 / max(descriptor.width - 1, 1)))
    probe = probe.astype(np.uint8)
    bits = encode_image(descriptor, probe)
    if bits.size != descriptor.bits_per_image:
        raise CodecError(
            f"codec {descriptor.codec_id!r} produced {bits.size} bits, "
            f"declared {descriptor.bits_per_image}"
        )
    decode_image(descriptor, bits)


@dataclass(frozen=True)
class MappingEntry:
    ber_upper_bound: float
    codec_id: str


@dataclass(frozen=True)
class CodecMappingTable:
    """Ordered BER thresholds mapping link quality to a codec choice.

    metadata is free-form JSON (creation info, training BER levels);
    it travels with the table but never affects selection.
    """

    entries: tuple = field(default_factory=tuple)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not isinstance(self.metadata, dict):
            raise ConfigError("mapping table metadata must be a JSON object")
        if not entries:
            raise ConfigError("codec mapping table is empty")
        prev = 0.0
        for i, entry in enumerate(entries):
            if not isinstance(entry, MappingEntry):
                raise ConfigError(f"entries[{i}] is not a mapping entry")
            if not entry.codec_id:
                raise ConfigError(f"entries[{i}].codec_id is empty")
            if not (prev < entry.ber_upper_bound <= 1.0):
                raise ConfigError(
                    f"entries[{i}].ber_upper_bound={entry.ber_upper_bound!r} "
                    "must be strictly increasing and at most 1.0"
                )
            prev = entry.ber_upper_bound
        if entries[-1].ber_upper_bound != 1.0:
            raise ConfigError("last ber_upper_bound must be exactly 1.0")
        ids = [e.codec_id for e in entries]
        if len(set(ids)) != len(ids):
            raise ConfigError("codec ids in the table must be unique")

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "entries": [dataclasses.asdict(e) for e in self.entries],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json_dict(cls, payload):
        if not isinstance(payload, dict):
            raise ConfigError("mapping table: expected a JSON object")
        if payload.get("schema_version") != 1:
            raise ConfigError(
                f"mapping table: unsupported schema_version="
                f"{payload.get('schema_version')!r}"
            )
        raw = payload.get("entries")
        if not isinstance(raw, list):
            raise ConfigError("mapping table: entries must be a list")
        metadata = payload.get("metadata", {})
        if not isinstance(metadata, dict):
            raise ConfigError("mapping table: metadata must be an object")
        entries = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict):
                raise ConfigError(f"mapping table: entries[{i}] not an object")
            try:
                bound = float(item["ber_upper_bound"])
                codec_id = str(item["codec_id"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(
                    f"mapping table: entries[{i}] is malformed: {exc}"
                ) from exc
            entries.append(MappingEntry(bound, codec_id))
        return cls(tuple(entries), metadata=metadata)


def write_mapping_table(path, table):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(table.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_mapping_table(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"mapping table {path}: invalid JSON: {exc}") from exc
    return CodecMappingTable.from_json_dict(payload)


def select_codec(ber_value, table):
    """Pick the first codec whose upper bound admits this BER (inclusive)."""
    ber_value = float(ber_value)
    if not 0.0 <= ber_value <= 1.0:
        raise ValueError(f"ber must be within [0, 1], got {ber_value!r}")
    for entry in table.entries:
        if ber_value <= entry.ber_upper_bound:
            return entry.codec_id
    raise ConfigError("mapping table has no terminal entry")


def probe_ber(config, model, seed=0, n_bits=100_000, min_bits=MIN_PROBE_BITS):
    """Measure link BER with seeded pseudo-random probe traffic.

    The probe seed replaces the channel seed so repeated probes are
    reproducible regardless of the model's own seed.
    """
    if n_bits < min_bits:
        raise ValueError(
            f"n_bits={n_bits} is below the statistical floor {min_bits}"
        )
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
        [seed, TAG_PROBE_BITS])))
    bits = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    probe_model = dataclasses.replace(model, seed=seed)
    return run_chain(bits, config, probe_model, seed=seed)


@dataclass(frozen=True)
class ImageMetrics:
    """Quality and transport accounting for one delivered image."""

    psnr_db: float
    ssim: float
    bits_sent: int
    bit_errors: int
    measured_ber: float

    def to_json_dict(self):
        return {
            "psnr_db": self.psnr_db,
            "ssim": self.ssim,
            "bits_sent": self.bits_sent,
            "bit_errors": self.bit_errors,
            "measured_ber": self.measured_ber,
        }


def run_image_link(image, descriptor, config, model, seed=0):
    """Carry one grayscale image across the simulated link.

    Returns (reconstructed_image, metrics). BER accounting covers codec
    payload bits only; tail padding is excluded.
    """
    image = _check_image(descriptor, image)
    tx_bits = encode_image(descriptor, image)
    if tx_bits.size != descriptor.bits_per_image:
        raise FramingError(
            f"codec {descriptor.codec_id!r} produced {tx_bits.size} bits, "
            f"declared {descriptor.bits_per_image}"
        )
    tx = transmit_stream(tx_bits, config, pad_seed=seed)
    received = apply_channel_stream(tx.samples, model, tx.sample_rate_hz)
    rx_bits, _ = receive_stream(received, config, tx.biases, tx.n_payload_bits)
    reconstructed = decode_image(descriptor, rx_bits)
    errors = int(np.count_nonzero(tx_bits != rx_bits))
    metrics = ImageMetrics(
        psnr_db=psnr(image, reconstructed),
        ssim=ssim(image, reconstructed),
        bits_sent=int(tx_bits.size),
        bit_errors=errors,
        measured_ber=errors / tx_bits.size,
    )
    return reconstructed, metrics
