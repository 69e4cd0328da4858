"""On-disk formats: spectrum CSV, frame dumps, and raw bit streams."""

import json
import struct

import numpy as np

from .errors import FramingError

__all__ = [
    "read_bit_file",
    "read_frame_dump",
    "read_spectrum_csv",
    "write_bit_file",
    "write_frame_dump",
    "write_spectrum_csv",
]

FRAME_MAGIC = b"RYDOFDM1"
SPECTRUM_HEADER = "detuning_rad_per_s,transmission"


def write_spectrum_csv(path, spectrum):
    """Two-column full-precision CSV of one spectrum."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(SPECTRUM_HEADER + "\n")
        for d, t in zip(spectrum.detunings, spectrum.transmission):
            fh.write(f"{float(d)!r},{float(t)!r}\n")


def read_spectrum_csv(path):
    """Read back a spectrum CSV as (detunings, transmission) arrays."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != SPECTRUM_HEADER:
            raise FramingError(f"unexpected spectrum header: {header!r}")
        rows = [line.split(",") for line in fh if line.strip()]
    try:
        if any(len(r) != 2 for r in rows):
            raise ValueError("row is not two columns")
        detunings = np.array([float(r[0]) for r in rows])
        transmission = np.array([float(r[1]) for r in rows])
    except ValueError as exc:
        raise FramingError(f"damaged spectrum row: {exc}") from exc
    return detunings, transmission


def _config_header(config):
    from .config import ofdm_to_json_dict

    return json.dumps(ofdm_to_json_dict(config), sort_keys=True).encode("ascii")


def write_frame_dump(path, samples, config):
    """Binary sample dump: 32-byte length-prefixed JSON header plus f64 LE."""
    header = _config_header(config)
    prefix = FRAME_MAGIC + b" %012d" % len(header)
    if len(prefix) != 21:
        raise FramingError("malformed frame dump prefix")
    prefix = prefix.ljust(32, b" ")
    data = np.ascontiguousarray(np.asarray(samples, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(prefix)
        fh.write(header)
        fh.write(data.tobytes())


def read_frame_dump(path):
    """Read back a frame dump as (samples, config)."""
    from .config import ofdm_from_json_dict

    with open(path, "rb") as fh:
        prefix = fh.read(32)
        if len(prefix) != 32 or not prefix.startswith(FRAME_MAGIC + b" "):
            raise FramingError("not a frame dump: bad magic")
        try:
            header_len = int(prefix[len(FRAME_MAGIC) + 1:].strip())
        except ValueError as exc:
            raise FramingError("not a frame dump: bad header length") from exc
        header = fh.read(header_len)
        if len(header) != header_len:
            raise FramingError("truncated frame dump header")
        payload = fh.read()
    if len(payload) % 8 != 0:
        raise FramingError("frame dump payload is not whole float64 samples")
    try:
        config = ofdm_from_json_dict(json.loads(header.decode("ascii")))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FramingError(f"corrupt frame dump header: {exc}") from exc
    samples = np.frombuffer(payload, dtype="<f8").copy()
    return samples, config


def write_bit_file(path, bits):
    """Raw bit stream: 8-byte little-endian bit count, then MSB-first bytes."""
    bits = np.asarray(bits).astype(np.uint8, copy=False)
    if bits.size and bits.max() > 1:
        raise ValueError("bits must be 0 or 1")
    packed = np.packbits(bits)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", bits.size))
        fh.write(packed.tobytes())


def read_bit_file(path):
    """Read a bit-stream file back to a 0/1 array."""
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) != 8:
            raise FramingError("bit file shorter than its header")
        (n_bits,) = struct.unpack("<Q", header)
        payload = fh.read()
    expected = (n_bits + 7) // 8
    if len(payload) != expected:
        raise FramingError(
            f"bit file payload is {len(payload)} bytes, expected {expected}"
        )
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    return bits[:n_bits]
