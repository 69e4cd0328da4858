"""End-to-end bit transport over the waveform, channel, and receiver.

Payload bits are whitened with a fixed published scrambling sequence before
QAM mapping and unwhitened after demapping. Structured payloads (long runs
of equal bits) would otherwise load every data bin with the same symbol and
concentrate the frame energy into a single time-domain spike, which the
5 dB clipper then destroys; scrambling keeps the waveform statistics
payload-independent. Both ends regenerate the sequence from a constant, so
it carries no configuration.
"""

from dataclasses import dataclass

import numpy as np

from .channel import apply_channel_stream
from .constants import PILOT_SEED, TAG_PAD_BITS, TAG_SCRAMBLE
from .errors import FramingError
from .qam import bits_per_symbol, qam_map
from .receiver import ber, demap_grids, demodulate, ls_estimate
from .waveform import BlockPilots, build_grid, modulate, pilot_mask

__all__ = ["TxStream", "data_bit_capacity", "run_chain", "scramble_mask",
           "transmit_stream", "receive_stream"]


def data_bit_capacity(config, symbol_index):
    """Data bits carried by the symbol at this index."""
    n_data = int((~pilot_mask(config, symbol_index)).sum())
    return n_data * bits_per_symbol(config.qam_order)


@dataclass(frozen=True)
class TxStream:
    """A transmitted multi-frame stream plus the side info the receiver needs."""

    samples: np.ndarray
    biases: np.ndarray
    n_symbols: int
    n_payload_bits: int
    n_pad_bits: int
    sample_rate_hz: float


def _pad_bits(n, seed):
    if n == 0:
        return np.empty(0, dtype=np.uint8)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
        [seed, TAG_PAD_BITS])))
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def scramble_mask(n_bits):
    """First n_bits of the fixed whitening sequence (position 0 = first
    payload bit of a stream)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
        [PILOT_SEED, TAG_SCRAMBLE])))
    return rng.integers(0, 2, size=n_bits, dtype=np.uint8)


def transmit_stream(bits, config, pad_seed=0, start_index=0):
    """Pack bits into consecutive frames, padding the tail symbol.

    Packing stops at the last symbol needed to carry the payload; pad bits
    are seeded pseudo-random filler, recorded so BER accounting can skip them.
    """
    bits = np.asarray(bits).astype(np.uint8, copy=False)
    if bits.size == 0:
        raise ValueError("bits must be nonempty")
    capacities = []
    total = 0
    index = start_index
    while total < bits.size:
        capacities.append(data_bit_capacity(config, index))
        total += capacities[-1]
        index += 1
    n_pad = total - bits.size
    payload = np.concatenate([bits, _pad_bits(n_pad, pad_seed)])
    payload ^= scramble_mask(payload.size)
    frames = []
    biases = []
    cursor = 0
    for offset, capacity in enumerate(capacities):
        chunk = payload[cursor: cursor + capacity]
        cursor += capacity
        symbols = qam_map(chunk, config.qam_order)
        grid = build_grid(symbols, config, start_index + offset)
        frame = modulate(grid, config)
        frames.append(frame.samples)
        biases.append(frame.bias)
    return TxStream(
        samples=np.concatenate(frames),
        biases=np.asarray(biases, dtype=np.float64),
        n_symbols=len(capacities),
        n_payload_bits=int(bits.size),
        n_pad_bits=int(n_pad),
        sample_rate_hz=config.sample_rate.stream_hz,
    )


def receive_stream(samples, config, biases, n_payload_bits, start_index=0):
    """Demodulate a received stream back to payload bits.

    Returns (bits, degenerate_bin_count). Raises a framing error when the
    stream cannot contain the declared payload.
    """
    grids = demodulate(samples, config, biases, start_index=start_index)
    estimates = ls_estimate(grids, config)
    bits, degenerate = demap_grids(grids, estimates, config.qam_order)
    if bits.size < n_payload_bits:
        raise FramingError(
            f"stream carries {bits.size} bits, expected at least {n_payload_bits}"
        )
    payload = bits[:n_payload_bits] ^ scramble_mask(n_payload_bits)
    return payload, degenerate


def run_chain(bits, config, model, seed=0):
    """Transmit bits through the channel and score the received copy."""
    tx = transmit_stream(bits, config, pad_seed=seed)
    received = apply_channel_stream(tx.samples, model, tx.sample_rate_hz)
    rx_bits, degenerate = receive_stream(received, config, tx.biases,
                                         tx.n_payload_bits)
    summary = {
        "n_subcarriers": config.n_subcarriers,
        "qam_order": config.qam_order,
        "pilot_scheme": type(config.pilot_scheme).__name__,
        "sample_rate": config.sample_rate.name,
    }
    return ber(bits, rx_bits, config_summary=summary, seed=seed,
               degenerate_bins=degenerate)
