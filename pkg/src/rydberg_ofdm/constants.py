"""Physical constants and fixed seeds.

HBAR is pinned to the value used throughout the field-conversion formulas;
it is intentionally not configurable so worked examples reproduce exactly.
"""

# Reduced Planck constant, J*s.
HBAR = 1.05457e-34

# Base seed of the published pilot sequence. Pilot values for OFDM symbol k
# are drawn from PCG64 seeded with SeedSequence([PILOT_SEED, k]); receiver
# and transmitter regenerate the identical sequence from this constant.
PILOT_SEED = 0x52594442

# Sub-stream tags used when deriving independent RNG streams from one seed.
TAG_NOISE = 0
TAG_GAIN = 1
TAG_PROBE_BITS = 2
TAG_PAD_BITS = 3
TAG_SCRAMBLE = 4
