'''
.. currentmodule:: risdcf.frame
========================================
frame (:mod:`risdcf.frame`)
========================================

Bit-exact MAC frames and the NAV durations they advertise.

Four frame variants are used. R-RTS and R-CTS reserve both the channel
and, when a relay reflects, its RIS. R-RTS carries a destination
address next to the usual receiver and transmitter addresses, so a
relay knows where to steer the reflection.

Layouts, most significant bit first::

    RRts  FC(16) Dur(16) RA(48) DA(48) TA(48)                      FCS(32) = 208
    RCts  FC(16) Dur(16) RA(48) SA(48)                             FCS(32) = 160
    Ack   FC(16) Dur(16) RA(48) TA(48) pad(80)                     FCS(32) = 240
    Data  PHY(128) FC(16) Dur(16) RA(48) DA(48) TA(48) Seq(16)
          rsv(48) payload                                          FCS(32)

The Data PHY header is a 32-bit sync word, the 32-bit payload length
and 64 reserved bits, so a Data frame is 128 + 272 + payload bits. The
FCS is CRC-32 over every preceding bit.

Frame Class
================
.. autosummary::
   :toctree: generated/

   Frame

Functions
=============
.. autosummary::
    :toctree: generated/

    encode_frame
    decode_frame
    nav_duration
    advertised_duration
    duration_field

'''
import math
import zlib
from fractions import Fraction
from warnings import warn

import numpy as npy

from . import constants as const

RRTS = 'RRts'
RCTS = 'RCts'
DATA = 'Data'
ACK = 'Ack'
VARIANTS = (RRTS, RCTS, DATA, ACK)

# frame control, type and subtype per variant
_TYPE_CONTROL = 1
_TYPE_DATA = 2
_fc_codes = {RRTS: (_TYPE_CONTROL, 0xB),
             RCTS: (_TYPE_CONTROL, 0xC),
             ACK: (_TYPE_CONTROL, 0xD),
             DATA: (_TYPE_DATA, 0x0)}
_fc_variants = dict((v, k) for k, v in _fc_codes.items())

FLAG_RELAYED = 0x01

SYNC_WORD = 0xA5A5A5A5
PHY_HEADER_BYTES = 16
ACK_PAD_BYTES = 10
MAX_ADDRESS = 2**const.ADDRESS_BITS - 1
MAX_SEQUENCE = 2**12 - 1

FRAME_BITS = {RRTS: const.RRTS_BITS, RCTS: const.RCTS_BITS, ACK: const.ACK_BITS}
DATA_OVERHEAD_BITS = const.PHY_HEADER_BITS + const.MAC_HEADER_BITS


class FrameEncodingError(ValueError):
    pass


class FrameFormatError(ValueError):
    pass


class FrameCorruptionError(FrameFormatError):
    pass


class DurationClampWarning(UserWarning):
    pass


class Frame(object):
    '''
    A MAC frame.

    Use the class methods :func:`rrts`, :func:`rcts`, :func:`data` and
    :func:`ack` rather than the initializer.

    Attributes
    ------------
    variant : ['RRts', 'RCts', 'Data', 'Ack']
    duration_us : int
        NAV advertisement, 16 bits
    receiver_addr : int
        RA, the next hop
    destination_addr : int or None
        DA, the final destination (RRts and Data)
    transmitter_addr : int or None
        TA (RRts, Data and Ack)
    sender_addr : int or None
        SA (RCts)
    payload_bits : int
        payload length (Data)
    relayed : bool
        set on an R-RTS forwarded by a reflecting relay
    sequence : int
        sequence number (Data)
    '''
    def __init__(self, variant, duration_us=0, receiver_addr=0,
                 destination_addr=None, transmitter_addr=None,
                 sender_addr=None, payload_bits=0, relayed=False, sequence=0):
        if variant not in VARIANTS:
            raise FrameEncodingError('unknown frame variant %r' % variant)
        self.variant = variant
        self.duration_us = int(duration_us)
        self.receiver_addr = receiver_addr
        self.destination_addr = destination_addr
        self.transmitter_addr = transmitter_addr
        self.sender_addr = sender_addr
        self.payload_bits = int(payload_bits)
        self.relayed = bool(relayed)
        self.sequence = int(sequence)

    @classmethod
    def rrts(cls, ra, da, ta, duration_us, relayed=False):
        return cls(RRTS, duration_us, ra, destination_addr=da,
                   transmitter_addr=ta, relayed=relayed)

    @classmethod
    def rcts(cls, ra, sa, duration_us):
        return cls(RCTS, duration_us, ra, sender_addr=sa)

    @classmethod
    def data(cls, ra, da, ta, payload_bits, duration_us, sequence=0):
        return cls(DATA, duration_us, ra, destination_addr=da,
                   transmitter_addr=ta, payload_bits=payload_bits,
                   sequence=sequence)

    @classmethod
    def ack(cls, ra, ta, duration_us=0):
        return cls(ACK, duration_us, ra, transmitter_addr=ta)

    def _key(self):
        return (self.variant, self.duration_us, self.receiver_addr,
                self.destination_addr, self.transmitter_addr,
                self.sender_addr, self.payload_bits, self.relayed,
                self.sequence)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self._key() == other._key()

    def __ne__(self, other):
        return (not self.__eq__(other))

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return 'Frame(%s, dur=%i, %s)' % (self.variant, self.duration_us,
                                         self.addresses_str())

    def __len__(self):
        return self.num_bits

    @property
    def num_bits(self):
        '''
        encoded length in bits
        '''
        if self.variant == DATA:
            return DATA_OVERHEAD_BITS + self.payload_bits
        return FRAME_BITS[self.variant]

    @property
    def same_address(self):
        '''
        True if the next hop is the final destination, DA = RA
        '''
        return self.destination_addr == self.receiver_addr

    @property
    def origin_addr(self):
        '''
        the address identifying who sent this frame, TA or SA
        '''
        if self.variant == RCTS:
            return self.sender_addr
        return self.transmitter_addr

    def addresses_str(self):
        out = ['RA=%x' % self.receiver_addr]
        if self.destination_addr is not None:
            out.append('DA=%x' % self.destination_addr)
        if self.transmitter_addr is not None:
            out.append('TA=%x' % self.transmitter_addr)
        if self.sender_addr is not None:
            out.append('SA=%x' % self.sender_addr)
        return ','.join(out)

    @property
    def fcs(self):
        '''
        CRC-32 over all header bits of the encoding
        '''
        bits = encode_frame(self)
        return _bits_2_int(bits[-const.FCS_BITS:])


## bit helpers
def _int_2_bytes(value, nbytes, name):
    if value is None or value < 0 or value >= 2**(8*nbytes):
        raise FrameEncodingError('%s=%r does not fit in %i bits' % (name, value, 8*nbytes))
    return int(value).to_bytes(nbytes, 'big')


def _bytes_2_bits(b):
    return npy.unpackbits(npy.frombuffer(b, dtype=npy.uint8))


def _bits_2_int(bits):
    return int.from_bytes(npy.packbits(bits).tobytes(), 'big')


def _crc32(bits):
    return zlib.crc32(npy.packbits(bits).tobytes()) & 0xffffffff


def _address_bytes(addr, name):
    return _int_2_bytes(addr, const.ADDRESS_BITS//8, name)


def encode_frame(f):
    '''
    Encodes a frame into its bit sequence.

    Parameters
    -----------
    f : :class:`Frame`

    Returns
    --------
    bits : numpy.ndarray of uint8
        one bit per element, most significant bit first

    Examples
    ----------
    >>> len(encode_frame(Frame.rrts(2, 3, 1, 424)))
    208
    '''
    if not 0 <= f.duration_us <= const.DURATION_FIELD_MAX_US:
        raise FrameEncodingError('duration %i us overflows the 16-bit field' % f.duration_us)
    ftype, subtype = _fc_codes[f.variant]
    flags = FLAG_RELAYED if (f.relayed and f.variant == RRTS) else 0
    fc = bytes([(ftype << 4) | subtype, flags])
    head = fc + _int_2_bytes(f.duration_us, 2, 'duration_us') + \
        _address_bytes(f.receiver_addr, 'receiver_addr')

    if f.variant == RRTS:
        head += _address_bytes(f.destination_addr, 'destination_addr') + \
            _address_bytes(f.transmitter_addr, 'transmitter_addr')
    elif f.variant == RCTS:
        head += _address_bytes(f.sender_addr, 'sender_addr')
    elif f.variant == ACK:
        head += _address_bytes(f.transmitter_addr, 'transmitter_addr') + \
            bytes(ACK_PAD_BYTES)
    else:
        if f.payload_bits < 0:
            raise FrameEncodingError('payload_bits must be >= 0')
        if not 0 <= f.sequence <= MAX_SEQUENCE:
            raise FrameEncodingError('sequence %i does not fit in 12 bits' % f.sequence)
        phy = _int_2_bytes(SYNC_WORD, 4, 'sync') + \
            _int_2_bytes(f.payload_bits, 4, 'payload_bits') + bytes(8)
        head = phy + head + \
            _address_bytes(f.destination_addr, 'destination_addr') + \
            _address_bytes(f.transmitter_addr, 'transmitter_addr') + \
            _int_2_bytes(f.sequence << 4, 2, 'sequence') + bytes(6)

    bits = _bytes_2_bits(head)
    if f.variant == DATA:
        bits = npy.concatenate([bits, npy.zeros(f.payload_bits, dtype=npy.uint8)])
    fcs = _bytes_2_bits(_crc32(bits).to_bytes(4, 'big'))
    return npy.concatenate([bits, fcs])


def _field(bits, start, nbits):
    return _bits_2_int(bits[start:start + nbits]), start + nbits


def decode_frame(bits):
    '''
    Decodes a bit sequence into a :class:`Frame`.

    The variant follows from the length (208, 160, 240 or at least 400
    bits). The FCS is checked before any field is interpreted.

    Raises
    --------
    FrameFormatError
        unknown length, non-binary values or inconsistent fields
    FrameCorruptionError
        FCS mismatch
    '''
    bits = npy.asarray(bits)
    if bits.ndim != 1:
        raise FrameFormatError('expected a flat bit sequence')
    if len(bits) and not npy.isin(bits, (0, 1)).all():
        raise FrameFormatError('bit sequence holds values other than 0 and 1')
    bits = bits.astype(npy.uint8)

    n = len(bits)
    lengths = dict((v, k) for k, v in FRAME_BITS.items())
    if n in lengths:
        variant = lengths[n]
    elif n >= DATA_OVERHEAD_BITS:
        variant = DATA
    else:
        raise FrameFormatError('no frame variant is %i bits long' % n)

    body, fcs_bits = bits[:-const.FCS_BITS], bits[-const.FCS_BITS:]
    if _crc32(body) != _bits_2_int(fcs_bits):
        raise FrameCorruptionError('FCS mismatch on a %i-bit %s frame' % (n, variant))

    pos = 0
    if variant == DATA:
        sync, pos = _field(bits, pos, 32)
        length, pos = _field(bits, pos, 32)
        pos = const.PHY_HEADER_BITS
        if sync != SYNC_WORD:
            raise FrameFormatError('bad PHY sync word %#x' % sync)
        if length != n - DATA_OVERHEAD_BITS:
            raise FrameFormatError('PHY length %i disagrees with frame length %i' % (length, n))

    ftype_sub, pos = _field(bits, pos, 8)
    flags, pos = _field(bits, pos, 8)
    code = (ftype_sub >> 4 & 0x3, ftype_sub & 0xf)
    if ftype_sub >> 6 != 0 or _fc_variants.get(code) != variant:
        raise FrameFormatError('frame control %#x does not match a %i-bit %s frame'
                               % (ftype_sub, n, variant))
    duration, pos = _field(bits, pos, 16)
    ra, pos = _field(bits, pos, const.ADDRESS_BITS)

    if variant == RRTS:
        da, pos = _field(bits, pos, const.ADDRESS_BITS)
        ta, pos = _field(bits, pos, const.ADDRESS_BITS)
        return Frame.rrts(ra, da, ta, duration, relayed=bool(flags & FLAG_RELAYED))
    if variant == RCTS:
        sa, pos = _field(bits, pos, const.ADDRESS_BITS)
        return Frame.rcts(ra, sa, duration)
    if variant == ACK:
        ta, pos = _field(bits, pos, const.ADDRESS_BITS)
        return Frame.ack(ra, ta, duration)
    da, pos = _field(bits, pos, const.ADDRESS_BITS)
    ta, pos = _field(bits, pos, const.ADDRESS_BITS)
    seq, pos = _field(bits, pos, 16)
    return Frame.data(ra, da, ta, n - DATA_OVERHEAD_BITS, duration,
                      sequence=seq >> 4)


def duration_field(us):
    '''
    Converts a duration to the 16-bit field value.

    Durations round up to whole microseconds. Values above 65535 us are
    clamped with a :class:`DurationClampWarning`.
    '''
    value = int(math.ceil(Fraction(us)))
    if value < 0:
        raise FrameEncodingError('negative duration %s' % us)
    if value > const.DURATION_FIELD_MAX_US:
        warn('duration %i us clamped to %i us' % (value, const.DURATION_FIELD_MAX_US),
             DurationClampWarning)
        value = const.DURATION_FIELD_MAX_US
    return value


def nav_duration(observed, timings):
    '''
    NAV set by a node that overhears `observed`.

    ==========================  =========================
    R-RTS, DA = RA              RRTS + SIFS
    R-RTS, DA != RA             RRTS + RCTS + 2 SIFS
    R-CTS                       its duration field (DATA + 2 SIFS)
    DATA                        ACK + SIFS
    ==========================  =========================

    All durations count from the end of the overheard frame.

    Parameters
    -----------
    observed : :class:`Frame`
    timings : :class:`~risdcf.timing.MacTimings`

    Examples
    ----------
    >>> nav_duration(Frame.rrts(2, 2, 1, 0), MacTimings())
    Fraction(236, 1)
    '''
    t = timings
    if observed.variant == RRTS:
        if observed.same_address:
            return t.rrts_us + t.sifs_us
        return t.rrts_us + t.rcts_us + 2*t.sifs_us
    if observed.variant == DATA:
        return t.ack_us + t.sifs_us
    return Fraction(observed.duration_us)


def advertised_duration(variant, timings, same_address=True, eta=None,
                        payload_bits=None):
    '''
    Duration field a sender writes into a new frame.

    R-RTS and DATA follow the NAV table. An R-CTS covers the DATA that
    follows it. When the DATA travels over an RIS (`eta` given) the R-CTS
    also covers the ACK; the reflecting relay holds its link for exactly
    this duration.

    Returns
    --------
    duration : Fraction
        microseconds, before conversion by :func:`duration_field`
    '''
    t = timings
    if variant == RRTS:
        if same_address:
            return t.rrts_us + t.sifs_us
        return t.rrts_us + t.rcts_us + 2*t.sifs_us
    if variant == RCTS:
        data = t.data_airtime_us(eta, payload_bits)
        if eta is None:
            return data + 2*t.sifs_us
        return t.sifs_us + data + t.sifs_us + t.ack_us
    if variant == DATA:
        return t.ack_us + t.sifs_us
    if variant == ACK:
        return Fraction(0)
    raise FrameEncodingError('unknown frame variant %r' % variant)
