'''

.. currentmodule:: risdcf.constants
========================================
constants (:mod:`risdcf.constants`)
========================================

This module contains physical constants and the default scenario
parameters.

The defaults reproduce the reference scenario: a 5.8 GHz link of 1000 m
per hop, Nakagami-m fading with m=2.5, 1 Mbps base rate and 802.11-like
interframe spaces.

'''
from scipy.constants import c, mega, giga


# phy
FREQUENCY_HZ = 5.8*giga
DISTANCE_M = 1000.
NAKAGAMI_M = 2.5
NAKAGAMI_OMEGA = 1.
NOISE_POWER_DBM = -85.
TRANSMIT_POWER_DBM = 0.
NUM_ELEMENTS = 16

# mac, bit counts and microseconds
BASE_RATE_BPS = 1*mega
SIFS_US = 28
DIFS_US = 128
SLOT_US = 50
RRTS_BITS = 208
RCTS_BITS = 160
ACK_BITS = 240
PHY_HEADER_BITS = 128
MAC_HEADER_BITS = 272
PAYLOAD_BITS = 8000

# contention
NUM_HOP1_CONTENDERS = 5     # L
NUM_HOP2_CONTENDERS = 6     # K
NUM_HOPS = 2                # m
MAX_BACKOFF_STAGE = 3       # n
CW_MIN = 32                 # W
TRANSMISSION_PROBABILITY = 0.1
RIS_EFFICIENCY = 0.5
RETRY_LIMIT = 7

# duration field of every frame header
DURATION_FIELD_BITS = 16
DURATION_FIELD_MAX_US = 2**DURATION_FIELD_BITS - 1
ADDRESS_BITS = 48
FCS_BITS = 32
