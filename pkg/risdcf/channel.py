'''
.. currentmodule:: risdcf.channel
========================================
channel (:mod:`risdcf.channel`)
========================================

Link-level channel model for conventional and RIS-assisted hops.

Signals are abstracted to SNR. A conventional hop is a single Friis
path with Nakagami-m fading. An RIS-assisted hop reflects the signal off
N passive elements, each contributing a source-to-RIS and a
RIS-to-destination fading coefficient, so the path loss enters twice and
the coherent combination contributes an N**2 gain.

Most of the functionality is provided by the :class:`ChannelParams` and
:class:`ChannelRealization` classes and the SNR / rate functions below.

Channel Classes
================
.. autosummary::
   :toctree: generated/

   ChannelParams
   ChannelRealization

Functions
=============
.. autosummary::
    :toctree: generated/

    path_loss_amplitude
    sample_nakagami_magnitude
    nakagami_moments
    snr_conventional
    snr_ris_general
    snr_ris_matched
    snr_conventional_db
    snr_ris_matched_db
    ergodic_rate
    ris_efficiency
    ris_transmission_time
    use_ris_link

'''
import numpy as npy
from numpy import pi
from scipy.special import gammaln

from . import constants as const
from . import mathFunctions as mf
from .util import spawn_rng

ERGODIC_MODES = ('conventional', 'ris-matched', 'ris-random')

# samples drawn per stream and per pass in ergodic_rate
CHUNK_SIZE = 2**18

# stream keys for spawn_rng
_DIRECT_STREAM = 0
_SR_STREAM = 1
_RD_STREAM = 2
_PHASE_STREAM = 3


class ChannelParameterError(ValueError):
    pass


class ChannelParams(object):
    '''
    Physical parameters of one link scenario.

    All hops share one node-to-node distance. Powers are given in dBm
    and converted to watts once, at construction.

    Parameters
    ------------
    frequency_hz : number
        carrier frequency in Hz
    distance_m : number
        node-to-node distance in meters
    nakagami_m : number
        Nakagami shape parameter, >= 0.5
    nakagami_omega : number
        Nakagami spread (mean power of the fading coefficient)
    noise_power_dbm : number
        total in-band noise power, N0
    transmit_power_dbm : number
        average transmit power, Ps
    num_elements : int
        number of RIS elements, N

    Examples
    ----------
    >>> p = ChannelParams()
    >>> p.wavelength_m
    0.05168...
    >>> p.copy(num_elements=64)
    '''
    def __init__(self, frequency_hz=const.FREQUENCY_HZ,
                 distance_m=const.DISTANCE_M,
                 nakagami_m=const.NAKAGAMI_M,
                 nakagami_omega=const.NAKAGAMI_OMEGA,
                 noise_power_dbm=const.NOISE_POWER_DBM,
                 transmit_power_dbm=const.TRANSMIT_POWER_DBM,
                 num_elements=const.NUM_ELEMENTS):
        self.frequency_hz = float(frequency_hz)
        self.distance_m = float(distance_m)
        self.nakagami_m = float(nakagami_m)
        self.nakagami_omega = float(nakagami_omega)
        self.noise_power_dbm = float(noise_power_dbm)
        self.transmit_power_dbm = float(transmit_power_dbm)
        self.num_elements = int(num_elements)
        self._validate()

        self.transmit_power_w = float(mf.dbm_2_watts(self.transmit_power_dbm))
        self.noise_power_w = float(mf.dbm_2_watts(self.noise_power_dbm))

    def _validate(self):
        if not self.frequency_hz > 0:
            raise ChannelParameterError('frequency_hz must be positive, got %s' % self.frequency_hz)
        if not self.distance_m > 0:
            raise ChannelParameterError('distance_m must be positive, got %s' % self.distance_m)
        if not self.nakagami_m >= 0.5:
            raise ChannelParameterError('nakagami_m must be >= 0.5, got %s' % self.nakagami_m)
        if not self.nakagami_omega > 0:
            raise ChannelParameterError('nakagami_omega must be positive, got %s' % self.nakagami_omega)
        if self.num_elements < 1:
            raise ChannelParameterError('num_elements must be >= 1, got %s' % self.num_elements)
        if npy.isnan(self.noise_power_dbm) or npy.isinf(self.noise_power_dbm):
            raise ChannelParameterError('noise_power_dbm must be finite')
        if npy.isnan(self.transmit_power_dbm):
            raise ChannelParameterError('transmit_power_dbm must be a number')
        far_field = 10*self.num_elements*self.wavelength_m
        if self.distance_m < far_field:
            raise ChannelParameterError(
                'distance_m=%s violates the far-field condition d >= 10*N*lambda = %s'
                % (self.distance_m, far_field))

    def __str__(self):
        return '%.4g GHz, %g m, m=%g, Ps=%g dBm, N0=%g dBm, N=%i' % (
            self.frequency_hz/1e9, self.distance_m, self.nakagami_m,
            self.transmit_power_dbm, self.noise_power_dbm, self.num_elements)

    def __repr__(self):
        return 'ChannelParams(%s)' % self.__str__()

    def __eq__(self, other):
        if not isinstance(other, ChannelParams):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return (not self.__eq__(other))

    @classmethod
    def from_config(cls, cfg):
        '''
        Builds channel parameters from a mapping holding the config keys.
        '''
        return cls(**dict((k, cfg[k]) for k in cls.fields() if k in cfg))

    @staticmethod
    def fields():
        return ('frequency_hz', 'distance_m', 'nakagami_m', 'nakagami_omega',
                'noise_power_dbm', 'transmit_power_dbm', 'num_elements')

    def as_dict(self):
        return dict((k, getattr(self, k)) for k in self.fields())

    def copy(self, **changes):
        '''
        returns a new copy, with `changes` applied
        '''
        kw = self.as_dict()
        kw.update(changes)
        return ChannelParams(**kw)

    @property
    def wavelength_m(self):
        '''
        wavelength, c/f, in meters
        '''
        return const.c/self.frequency_hz

    @property
    def path_loss_amplitude(self):
        '''
        Friis amplitude factor of one hop, lambda/(4*pi*d)
        '''
        return path_loss_amplitude(self.wavelength_m, self.distance_m)

    @property
    def snr_scale(self):
        '''
        Ps/N0 as a linear ratio
        '''
        return self.transmit_power_w/self.noise_power_w


class ChannelRealization(object):
    '''
    One fading realization of a conventional hop and an N-element RIS hop.

    Parameters
    ------------
    direct_gain : number
        fading magnitude of the conventional link
    sr_gains, rd_gains : array-like
        per-element fading magnitudes, source-to-RIS and RIS-to-destination
    sr_phases, rd_phases : array-like
        per-element channel phases in radians
    ris_phases : array-like
        phase shift applied by each element, in radians

    Phases are wrapped into [0, 2*pi).
    '''
    def __init__(self, direct_gain, sr_gains, rd_gains, sr_phases,
                 rd_phases, ris_phases):
        self.direct_gain = float(direct_gain)
        self.sr_gains = npy.array(sr_gains, dtype=float).ravel()
        self.rd_gains = npy.array(rd_gains, dtype=float).ravel()
        self.sr_phases = mf.wrap_phase(npy.array(sr_phases, dtype=float).ravel())
        self.rd_phases = mf.wrap_phase(npy.array(rd_phases, dtype=float).ravel())
        self.ris_phases = mf.wrap_phase(npy.array(ris_phases, dtype=float).ravel())

        n = len(self.sr_gains)
        for name in ('rd_gains', 'sr_phases', 'rd_phases', 'ris_phases'):
            if len(getattr(self, name)) != n:
                raise ChannelParameterError(
                    '%s has length %i, expected %i' % (name, len(getattr(self, name)), n))
        gains = npy.r_[self.direct_gain, self.sr_gains, self.rd_gains]
        if not npy.isfinite(gains).all() or (gains < 0).any():
            raise ChannelParameterError('fading gains must be finite and >= 0')

    def __len__(self):
        return len(self.sr_gains)

    def __repr__(self):
        return 'ChannelRealization(N=%i, direct_gain=%.4g)' % (len(self), self.direct_gain)

    @classmethod
    def random(cls, params, rng=None, ris_phases=None):
        '''
        Draws a realization for `params`.

        Gains are Nakagami-m, channel phases are uniform. RIS phases are
        uniform unless given.

        Parameters
        -----------
        params : :class:`ChannelParams`
        rng : :class:`numpy.random.Generator`, int or None
            random source or seed
        ris_phases : array-like or None
        '''
        rng = npy.random.default_rng(rng)
        n = params.num_elements
        m, omega = params.nakagami_m, params.nakagami_omega
        direct = sample_nakagami_magnitude(m, omega, rng)
        sr = sample_nakagami_magnitude(m, omega, rng, size=n)
        rd = sample_nakagami_magnitude(m, omega, rng, size=n)
        phi = rng.uniform(0, 2*pi, n)
        omega_ph = rng.uniform(0, 2*pi, n)
        if ris_phases is None:
            ris_phases = rng.uniform(0, 2*pi, n)
        return cls(direct, sr, rd, phi, omega_ph, ris_phases)

    @property
    def composite_phases(self):
        '''
        phi_n + omega_n + theta_n for every element
        '''
        return self.sr_phases + self.rd_phases + self.ris_phases


def path_loss_amplitude(wavelength, distance):
    '''
    Friis free-space amplitude factor, sqrt(L) = lambda/(4*pi*d).

    Parameters
    -----------
    wavelength : number
        wavelength in meters
    distance : number
        distance in meters

    Examples
    ----------
    >>> path_loss_amplitude(4*pi, 1)
    1.0
    '''
    if not (wavelength > 0 and distance > 0):
        raise ChannelParameterError(
            'wavelength and distance must be positive, got %s, %s' % (wavelength, distance))
    return wavelength/(4*pi*distance)


def sample_nakagami_magnitude(m, omega, rng=None, size=None):
    '''
    Draws Nakagami-m fading magnitudes.

    A draw is the square root of a Gamma(m, omega/m) variate.

    Parameters
    -----------
    m : number
        shape, >= 0.5
    omega : number
        spread, > 0
    rng : :class:`numpy.random.Generator`, int or None
        random source or seed
    size : int, tuple or None
        output shape; a float is returned for None
    '''
    if not m >= 0.5:
        raise ChannelParameterError('nakagami m must be >= 0.5, got %s' % m)
    if not omega > 0:
        raise ChannelParameterError('nakagami omega must be positive, got %s' % omega)
    rng = npy.random.default_rng(rng)
    out = npy.sqrt(rng.gamma(m, omega/float(m), size))
    if size is None:
        return float(out)
    return out


def nakagami_moments(m, omega):
    '''
    Mean and second moment of the Nakagami-m magnitude.

    Returns
    --------
    mean, second_moment : float
        Gamma(m+1/2)/Gamma(m)*sqrt(omega/m) and omega
    '''
    mean = npy.exp(gammaln(m + .5) - gammaln(m))*npy.sqrt(omega/float(m))
    return float(mean), float(omega)


def snr_conventional(params, direct_gain):
    '''
    SNR of a conventional hop.

    gamma_C = Ps/N0 * (lambda/(4*pi*d))**2 * |h|**2

    `direct_gain` may be an array.
    '''
    g = npy.asarray(direct_gain, dtype=float)
    if (g < 0).any():
        raise ChannelParameterError('direct_gain must be >= 0')
    out = params.snr_scale*params.path_loss_amplitude**2*g**2
    return float(out) if out.ndim == 0 else out


def snr_ris_general(params, real):
    '''
    SNR of an RIS-assisted hop for arbitrary RIS phases.

    gamma_R = Ps/N0 * (lambda/(4*pi*d))**4
              * |sum_n |h_SR,n| |h_RD,n| exp(j(phi_n + omega_n + theta_n))|**2

    Parameters
    -----------
    params : :class:`ChannelParams`
    real : :class:`ChannelRealization`
    '''
    _check_realization(params, real)
    s = npy.sum(mf.magphase_2_complex(real.sr_gains*real.rd_gains,
                                      real.composite_phases))
    return float(params.snr_scale*params.path_loss_amplitude**4*abs(s)**2)


def snr_ris_matched(params, real):
    '''
    SNR of an RIS-assisted hop with ideal phase matching.

    gamma_R = Ps/N0 * (lambda/(4*pi*d))**4 * (sum_n |h_SR,n| |h_RD,n|)**2
    '''
    _check_realization(params, real)
    s = npy.sum(real.sr_gains*real.rd_gains)
    return float(params.snr_scale*params.path_loss_amplitude**4*s**2)


def snr_conventional_db(params, direct_gain):
    '''
    :func:`snr_conventional` in dB
    '''
    return mf.power_2_db(snr_conventional(params, direct_gain))


def snr_ris_matched_db(params, real):
    '''
    :func:`snr_ris_matched` in dB
    '''
    return mf.power_2_db(snr_ris_matched(params, real))


def _check_realization(params, real):
    if len(real) == 0:
        raise ChannelParameterError('realization has no RIS elements')
    if len(real) != params.num_elements:
        raise ChannelParameterError(
            'realization has %i elements, params expect %i' % (len(real), params.num_elements))


def ergodic_rate(params, mode='conventional', num_samples=10**5, seed=0,
                 return_stderr=False):
    '''
    Monte-Carlo ergodic achievable rate, E[log2(1+gamma)], in bits/s/Hz.

    Every link and every RIS element draws from its own random stream,
    keyed on `seed`. Element n therefore sees the same fading sequence
    whatever N is, and the conventional link sees the same sequence in
    every call. This couples estimates across N and across modes.

    Parameters
    -----------
    params : :class:`ChannelParams`
    mode : ['conventional', 'ris-matched', 'ris-random']
        'ris-random' applies uniform random RIS phases
    num_samples : int
        number of independent realizations
    seed : int
    return_stderr : bool
        also return the standard error of the estimate

    Returns
    --------
    rate : float
    stderr : float, only if `return_stderr`
    '''
    if mode not in ERGODIC_MODES:
        raise ValueError('mode must be one of %s, got %r' % (ERGODIC_MODES, mode))
    num_samples = int(num_samples)
    if num_samples < 1:
        raise ValueError('num_samples must be >= 1')

    m, omega = params.nakagami_m, params.nakagami_omega
    n_el = params.num_elements
    if mode == 'conventional':
        direct = spawn_rng(seed, _DIRECT_STREAM)
    else:
        sr = [spawn_rng(seed, _SR_STREAM, k) for k in range(n_el)]
        rd = [spawn_rng(seed, _RD_STREAM, k) for k in range(n_el)]
        if mode == 'ris-random':
            ph = [spawn_rng(seed, _PHASE_STREAM, k) for k in range(n_el)]

    scale_c = params.snr_scale*params.path_loss_amplitude**2
    scale_r = params.snr_scale*params.path_loss_amplitude**4

    total, total_sq = 0., 0.
    remaining = num_samples
    while remaining > 0:
        size = min(CHUNK_SIZE, remaining)
        remaining -= size
        if mode == 'conventional':
            g = sample_nakagami_magnitude(m, omega, direct, size)
            snr = scale_c*g**2
        elif mode == 'ris-matched':
            acc = npy.zeros(size)
            for k in range(n_el):
                acc += sample_nakagami_magnitude(m, omega, sr[k], size) * \
                    sample_nakagami_magnitude(m, omega, rd[k], size)
            snr = scale_r*acc**2
        else:
            acc = npy.zeros(size, dtype=complex)
            for k in range(n_el):
                a = sample_nakagami_magnitude(m, omega, sr[k], size) * \
                    sample_nakagami_magnitude(m, omega, rd[k], size)
                acc += mf.magphase_2_complex(a, ph[k].uniform(0, 2*pi, size))
            snr = scale_r*abs(acc)**2
        rate = mf.log2_1p(snr)
        total += rate.sum()
        total_sq += (rate**2).sum()

    mean = total/num_samples
    if not return_stderr:
        return float(mean)
    if num_samples < 2:
        return float(mean), float('nan')
    var = max(total_sq/num_samples - mean**2, 0.)*num_samples/(num_samples - 1.)
    return float(mean), float(npy.sqrt(var/num_samples))


def ris_efficiency(params, num_samples=10**5, seed=0, ris_mode='ris-matched'):
    '''
    RIS efficiency, eta = E[log2(1+gamma_R)] / E[log2(1+gamma_C)].

    Both rates are estimated from the same seed. Passing
    `ris_mode='conventional'` makes the numerator reuse the conventional
    draws, which gives eta = 1 exactly.

    Parameters
    -----------
    params : :class:`ChannelParams`
    num_samples : int
    seed : int
    ris_mode : ['ris-matched', 'ris-random', 'conventional']

    Examples
    ----------
    >>> ris_efficiency(ChannelParams(), 1000, seed=1, ris_mode='conventional')
    1.0
    '''
    rate_c = ergodic_rate(params, 'conventional', num_samples, seed)
    if rate_c == 0:
        raise ZeroDivisionError(
            'conventional ergodic rate is 0 for %s; eta is undefined' % params)
    rate_r = ergodic_rate(params, ris_mode, num_samples, seed)
    return rate_r/rate_c


def ris_transmission_time(t_data, eta):
    '''
    Payload airtime over an RIS link, T_RIS = T_data/eta.

    The result is an exact :class:`fractions.Fraction` of microseconds.

    Parameters
    -----------
    t_data : number
        conventional payload airtime in microseconds
    eta : number
        RIS efficiency, > 0

    Examples
    ----------
    >>> ris_transmission_time(8000, 0.5)
    Fraction(16000, 1)
    '''
    if not eta > 0:
        raise ChannelParameterError('eta must be positive, got %s' % eta)
    if not t_data > 0:
        raise ChannelParameterError('t_data must be positive, got %s' % t_data)
    return mf.to_fraction(t_data)/mf.to_fraction(eta)


def use_ris_link(eta, eta_threshold=0.):
    '''
    Adaptive link switching: True if the RIS link should carry the data.

    A relay reflects only when the RIS efficiency reaches the threshold.
    '''
    return eta > 0 and eta >= eta_threshold
