'''
.. currentmodule:: risdcf.mathFunctions
=============================================
mathFunctions (:mod:`risdcf.mathFunctions`)
=============================================


Provides commonly used mathematical functions.

Power Conversion
--------------------------------
.. autosummary::
        :toctree: generated/

        db_2_power
        power_2_db
        dbm_2_watts

Complex Component Conversion
---------------------------------
.. autosummary::
        :toctree: generated/

        magphase_2_complex
        wrap_phase

Rates and Exact Arithmetic
---------------------------------
.. autosummary::
        :toctree: generated/

        log2_1p
        to_fraction

'''
from fractions import Fraction
from numbers import Rational

import numpy as npy
from numpy import pi

LOG_OF_ZERO = -300


## power conversions
def db_2_power(input):
    '''
    converts db to a linear power ratio.

    returns:
            10**((z)/10.)
    '''
    return 10**(npy.asarray(input, dtype=float)/10.)


def power_2_db(input, zero_nan=True):
    '''
    converts a linear power ratio to db

     db is given by
            10*log10(z)

    zero and negative inputs map to LOG_OF_ZERO when `zero_nan` is True
    '''
    with npy.errstate(divide='ignore', invalid='ignore'):
        out = 10*npy.log10(input)
    if zero_nan:
        try:
            out[~npy.isfinite(out)] = LOG_OF_ZERO
        except (TypeError, IndexError):
            # input is a number not array-like
            if not npy.isfinite(out):
                return LOG_OF_ZERO
    return out


def dbm_2_watts(input):
    '''
    converts power in dBm to watts.

    Examples
    ---------
    >>> dbm_2_watts(30)
    1.0
    '''
    return db_2_power(input)*1e-3


## complex
def magphase_2_complex(mag, rad):
    '''
    converts linear magnitude and phase (in radians) arrays into a
    complex array
    '''
    return npy.asarray(mag)*npy.exp(1j*npy.asarray(rad))


def wrap_phase(rad):
    '''
    wraps phase (in radians) into [0, 2*pi)
    '''
    return npy.mod(rad, 2*pi)


## rates
def log2_1p(x):
    '''
    log2(1+x), accurate for the tiny SNRs of long double-path-loss links
    '''
    return npy.log1p(x)/npy.log(2)


def to_fraction(x):
    '''
    Converts a number to an exact :class:`fractions.Fraction`.

    Floats are converted exactly (binary value), integers and fractions
    pass through.

    Examples
    ---------
    >>> to_fraction(0.5)
    Fraction(1, 2)
    '''
    if isinstance(x, Rational):
        return Fraction(x)
    x = float(x)
    if not npy.isfinite(x):
        raise ValueError('cannot convert %r to an exact fraction' % x)
    return Fraction(x)
