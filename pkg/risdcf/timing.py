'''
.. currentmodule:: risdcf.timing
========================================
timing (:mod:`risdcf.timing`)
========================================

Frame airtimes and the aggregate success/collision times of a contention
round.

All times are exact :class:`fractions.Fraction` microseconds, so every
sum is bit-stable and regression values never drift.

Timing Classes
================
.. autosummary::
   :toctree: generated/

   MacTimings
   TimingSet

Functions
=============
.. autosummary::
    :toctree: generated/

    frame_airtime
    timing_set_ris
    timing_set_conventional

'''
from fractions import Fraction

from . import constants as const
from .mathFunctions import to_fraction
from .channel import ris_transmission_time

RIS = 'ris'
CONVENTIONAL = 'conventional'
MODES = (RIS, CONVENTIONAL)


class TimingError(ValueError):
    pass


def frame_airtime(bits, rate):
    '''
    Airtime of `bits` at `rate` bits/second, in microseconds.

    Examples
    ----------
    >>> frame_airtime(208, 1e6)
    Fraction(208, 1)
    '''
    if bits < 0:
        raise TimingError('bit count must be >= 0, got %s' % bits)
    if not rate > 0:
        raise TimingError('rate must be positive, got %s' % rate)
    return to_fraction(bits)*10**6/to_fraction(rate)


class MacTimings(object):
    '''
    Frame lengths, interframe spaces, slot time and base rate.

    This is the single source of airtime arithmetic. Defaults are the
    reference scenario (1 Mbps, SIFS 28 us, DIFS 128 us, slot 50 us,
    208/160/240 bit control frames, 400 header bits, 8000 payload bits).

    Parameters
    ------------
    rrts_bits, rcts_bits, ack_bits : int
        control frame lengths
    phy_header_bits, mac_header_bits : int
        header lengths; headers always go at the base rate
    base_rate_bps : number
        conventional link rate
    sifs_us, difs_us, slot_us : number
        interframe spaces and slot time, in microseconds
    payload_bits : int
        payload length E. Zero is accepted as a degenerate case.
    '''
    def __init__(self, rrts_bits=const.RRTS_BITS, rcts_bits=const.RCTS_BITS,
                 ack_bits=const.ACK_BITS,
                 phy_header_bits=const.PHY_HEADER_BITS,
                 mac_header_bits=const.MAC_HEADER_BITS,
                 base_rate_bps=const.BASE_RATE_BPS, sifs_us=const.SIFS_US,
                 difs_us=const.DIFS_US, slot_us=const.SLOT_US,
                 payload_bits=const.PAYLOAD_BITS):
        self.rrts_bits = int(rrts_bits)
        self.rcts_bits = int(rcts_bits)
        self.ack_bits = int(ack_bits)
        self.phy_header_bits = int(phy_header_bits)
        self.mac_header_bits = int(mac_header_bits)
        self.payload_bits = int(payload_bits)
        self.base_rate_bps = to_fraction(base_rate_bps)
        self.sifs_us = to_fraction(sifs_us)
        self.difs_us = to_fraction(difs_us)
        self.slot_us = to_fraction(slot_us)

        for k in self.fields():
            if k == 'payload_bits':
                continue
            if not getattr(self, k) > 0:
                raise TimingError('%s must be positive, got %s' % (k, getattr(self, k)))
        if self.payload_bits < 0:
            raise TimingError('payload_bits must be >= 0, got %s' % self.payload_bits)

    @staticmethod
    def fields():
        return ('rrts_bits', 'rcts_bits', 'ack_bits', 'phy_header_bits',
                'mac_header_bits', 'base_rate_bps', 'sifs_us', 'difs_us',
                'slot_us', 'payload_bits')

    @classmethod
    def from_config(cls, cfg):
        return cls(**dict((k, cfg[k]) for k in cls.fields() if k in cfg))

    def as_dict(self):
        return dict((k, getattr(self, k)) for k in self.fields())

    def copy(self, **changes):
        '''
        returns a new copy, with `changes` applied
        '''
        kw = self.as_dict()
        kw.update(changes)
        return MacTimings(**kw)

    def __eq__(self, other):
        if not isinstance(other, MacTimings):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return (not self.__eq__(other))

    def __repr__(self):
        return 'MacTimings(E=%i bits, %s bps, SIFS=%s, DIFS=%s, slot=%s)' % (
            self.payload_bits, self.base_rate_bps, self.sifs_us, self.difs_us,
            self.slot_us)

    def airtime(self, bits):
        return frame_airtime(bits, self.base_rate_bps)

    @property
    def rrts_us(self):
        return self.airtime(self.rrts_bits)

    @property
    def rcts_us(self):
        return self.airtime(self.rcts_bits)

    @property
    def ack_us(self):
        return self.airtime(self.ack_bits)

    @property
    def header_us(self):
        '''
        H, the PHY plus MAC header airtime
        '''
        return self.airtime(self.phy_header_bits + self.mac_header_bits)

    @property
    def data_us(self):
        '''
        T_data, payload airtime on a conventional link
        '''
        return self.airtime(self.payload_bits)

    def payload_airtime_us(self, eta=None, payload_bits=None):
        '''
        payload airtime, scaled by 1/eta on an RIS link
        '''
        t = self.data_us if payload_bits is None else self.airtime(payload_bits)
        if eta is None or t == 0:
            return t
        return ris_transmission_time(t, eta)

    def data_airtime_us(self, eta=None, payload_bits=None):
        '''
        airtime of a whole DATA frame, H + T_data or H + T_RIS
        '''
        return self.header_us + self.payload_airtime_us(eta, payload_bits)


class TimingSet(object):
    '''
    Aggregate times of the three non-idle outcomes of a contention round.

    Parameters
    ------------
    t_success_us : Fraction
        T_S
    t_collision1_us : Fraction
        T_C1, collision at the first hop
    t_collision2_us : Fraction
        T_C2, collision at the second hop
    mode : ['ris', 'conventional']
    '''
    def __init__(self, t_success_us, t_collision1_us, t_collision2_us, mode):
        if mode not in MODES:
            raise TimingError('mode must be one of %s, got %r' % (MODES, mode))
        self.t_success_us = to_fraction(t_success_us)
        self.t_collision1_us = to_fraction(t_collision1_us)
        self.t_collision2_us = to_fraction(t_collision2_us)
        self.mode = mode

    def __repr__(self):
        return 'TimingSet(%s: T_S=%s, T_C1=%s, T_C2=%s)' % (
            self.mode, self.t_success_us, self.t_collision1_us,
            self.t_collision2_us)

    def __eq__(self, other):
        if not isinstance(other, TimingSet):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return (not self.__eq__(other))

    def as_dict(self):
        return {'mode': self.mode,
                't_success_us': self.t_success_us,
                't_collision1_us': self.t_collision1_us,
                't_collision2_us': self.t_collision2_us}

    def ordered(self):
        '''
        True if T_S > T_C2 >= T_C1 > 0
        '''
        return self.t_success_us > self.t_collision2_us >= \
            self.t_collision1_us > 0

    @property
    def single_hop_success_us(self):
        '''
        success time of one RTS/CTS/DATA/ACK cycle, conventional mode only
        '''
        if self.mode != CONVENTIONAL:
            raise TimingError('single-hop success time is defined on conventional timings')
        return self.t_success_us/2


def timing_set_ris(t, t_ris_us):
    '''
    Success and collision times of an RIS-assisted dual hop.

    T_S = RRTS + SIFS + RRTS + SIFS + RCTS + SIFS + H + T_RIS + SIFS + ACK + DIFS

    T_C1 = RRTS + DIFS

    T_C2 = RRTS + SIFS + RRTS + DIFS

    Parameters
    -----------
    t : :class:`MacTimings`
    t_ris_us : number
        payload airtime over the RIS link

    Examples
    ----------
    >>> timing_set_ris(MacTimings(), 16000)
    TimingSet(ris: T_S=17456, T_C1=336, T_C2=572)
    '''
    t_ris_us = to_fraction(t_ris_us)
    if t_ris_us < 0:
        raise TimingError('t_ris_us must be >= 0, got %s' % t_ris_us)
    t_s = (t.rrts_us + t.sifs_us + t.rrts_us + t.sifs_us + t.rcts_us +
           t.sifs_us + t.header_us + t_ris_us + t.sifs_us + t.ack_us +
           t.difs_us)
    t_c1 = t.rrts_us + t.difs_us
    t_c2 = t.rrts_us + t.sifs_us + t.rrts_us + t.difs_us
    return TimingSet(t_s, t_c1, t_c2, RIS)


def timing_set_conventional(t):
    '''
    Success and collision times of a store-and-forward dual hop.

    T_S = 2*(RRTS + SIFS + RCTS + SIFS + H + T_data + SIFS + ACK + DIFS)

    T_C1 = T_C2 = RRTS + DIFS

    Examples
    ----------
    >>> timing_set_conventional(MacTimings())
    TimingSet(conventional: T_S=18440, T_C1=336, T_C2=336)
    '''
    hop = (t.rrts_us + t.sifs_us + t.rcts_us + t.sifs_us + t.header_us +
           t.data_us + t.sifs_us + t.ack_us + t.difs_us)
    t_c = t.rrts_us + t.difs_us
    return TimingSet(2*hop, t_c, t_c, CONVENTIONAL)


def timing_sets(t, eta):
    '''
    returns (ris, conventional) timing sets for RIS efficiency `eta`
    '''
    return (timing_set_ris(t, t.payload_airtime_us(eta)),
            timing_set_conventional(t))
