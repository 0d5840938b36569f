'''
.. currentmodule:: risdcf.analytic
========================================
analytic (:mod:`risdcf.analytic`)
========================================

Closed-form saturation throughput of the dual-hop and m-hop access model.

Contention runs in two stages. L first-hop contenders (the source
among them) compete for the relay, then the relay's reservation competes
with K-1 contenders around the next receiver. Every node transmits in an
idle slot with the same probability p. A round is either an idle slot,
a first-hop collision, a second-hop collision or a success. Throughput
is the expected payload per round divided by the expected round length.

Classes
================
.. autosummary::
   :toctree: generated/

   ContentionConfig
   ContentionProbabilities
   ThroughputResult

Functions
=============
.. autosummary::
    :toctree: generated/

    contention_probabilities
    dual_hop_throughput
    throughput_gain
    bianchi_transmission_probability
    bianchi_fixed_point
    multihop_success_time
    multihop_collision_time
    multihop_throughput
    optimal_transmission_probability

'''
from collections import OrderedDict

import numpy as npy
from scipy.optimize import minimize_scalar

from . import constants as const
from .timing import RIS, CONVENTIONAL, MODES, TimingError, timing_sets


class ContentionConfigError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


class ContentionConfig(object):
    '''
    Contention parameters of the access model.

    Parameters
    ------------
    p : float
        per-slot transmission probability, in [0, 1]
    L : int
        first-hop contenders, source included
    K : int
        second-hop contenders, relay included
    m_hops : int
        number of hops
    '''
    def __init__(self, p=const.TRANSMISSION_PROBABILITY,
                 L=const.NUM_HOP1_CONTENDERS, K=const.NUM_HOP2_CONTENDERS,
                 m_hops=const.NUM_HOPS):
        self.p = float(p)
        self.L = int(L)
        self.K = int(K)
        self.m_hops = int(m_hops)
        if not 0 <= self.p <= 1:
            raise ContentionConfigError('p must be in [0, 1], got %s' % self.p)
        for k in ('L', 'K', 'm_hops'):
            if getattr(self, k) < 1:
                raise ContentionConfigError('%s must be >= 1, got %s' % (k, getattr(self, k)))

    def __repr__(self):
        return 'ContentionConfig(p=%g, L=%i, K=%i, m_hops=%i)' % (
            self.p, self.L, self.K, self.m_hops)

    def copy(self, **changes):
        kw = dict(p=self.p, L=self.L, K=self.K, m_hops=self.m_hops)
        kw.update(changes)
        return ContentionConfig(**kw)


class ContentionProbabilities(object):
    '''
    Outcome probabilities of one contention round.

    p_i, p_s1, p_c1 : idle, success and collision at the first hop
    p_s2, p_c2 : success and collision of the second-hop reservation
    '''
    names = ('p_i', 'p_s1', 'p_c1', 'p_s2', 'p_c2')

    def __init__(self, p_i, p_s1, p_c1, p_s2, p_c2):
        self.p_i = float(p_i)
        self.p_s1 = float(p_s1)
        self.p_c1 = float(p_c1)
        self.p_s2 = float(p_s2)
        self.p_c2 = float(p_c2)

    def __repr__(self):
        return 'ContentionProbabilities(%s)' % ', '.join(
            '%s=%.6g' % (k, getattr(self, k)) for k in self.names)

    def as_dict(self):
        return OrderedDict((k, getattr(self, k)) for k in self.names)

    def hop_success(self, i):
        return self.p_s1 if i == 1 else self.p_s2

    def hop_collision(self, i):
        return self.p_c1 if i == 1 else self.p_c2


class ThroughputResult(object):
    '''
    Saturation throughput with its per-term breakdown.

    Attributes
    ------------
    throughput_bps : float
    probabilities : :class:`ContentionProbabilities`
    denominator_terms_us : OrderedDict
        expected time per round spent idle, in each hop's collisions and
        in success
    mode : ['ris', 'conventional']
    hops : int
    numerator_bits : float
        expected payload delivered per round
    '''
    def __init__(self, throughput_bps, probabilities, denominator_terms_us,
                 mode, hops=2, numerator_bits=None):
        self.throughput_bps = float(throughput_bps)
        self.probabilities = probabilities
        self.denominator_terms_us = denominator_terms_us
        self.mode = mode
        self.hops = hops
        self.numerator_bits = numerator_bits

    def __repr__(self):
        return 'ThroughputResult(%s, m=%i, %.6g Mbps)' % (
            self.mode, self.hops, self.throughput_mbps)

    @property
    def throughput_mbps(self):
        return self.throughput_bps/1e6

    @property
    def denominator_us(self):
        return sum(self.denominator_terms_us.values())


def contention_probabilities(cfg):
    '''
    Outcome probabilities of one round for a :class:`ContentionConfig`.

    P_I = (1-p)**L, P_S1 = L*p*(1-p)**(L-1), P_C1 = 1 - P_S1 - P_I,
    P_S2 = (1-p)**(K-1), P_C2 = 1 - P_S2

    Examples
    ----------
    >>> contention_probabilities(ContentionConfig(0.1, 5, 6))
    ContentionProbabilities(p_i=0.59049, p_s1=0.32805, p_c1=0.08146, p_s2=0.59049, p_c2=0.40951)
    '''
    p, L, K = cfg.p, cfg.L, cfg.K
    p_i = (1 - p)**L
    p_s1 = L*p*(1 - p)**(L - 1)
    p_c1 = 1 - p_s1 - p_i
    p_s2 = (1 - p)**(K - 1)
    p_c2 = 1 - p_s2
    return ContentionProbabilities(p_i, p_s1, max(p_c1, 0.), p_s2, p_c2)


def _saturation_throughput(probs, success_us, collision_us, t, mode):
    '''
    S = prod(P_Si)*E / (P_I*sigma + sum_j prod_{i<j}(P_Si)*P_Cj*T_Cj + prod(P_Si)*T_S)

    `collision_us` holds T_Cj for hops 1..m. Terms are summed in hop
    order so that equal inputs always give equal bits.
    '''
    terms = OrderedDict()
    terms['idle'] = probs.p_i*float(t.slot_us)
    reach = 1.
    for j, t_c in enumerate(collision_us, 1):
        terms['collision_hop%i' % j] = reach*probs.hop_collision(j)*float(t_c)
        reach = reach*probs.hop_success(j)
    terms['success'] = reach*float(success_us)

    numerator = reach*t.payload_bits
    denominator = 0.
    for v in terms.values():
        denominator += v
    # bits per microsecond
    s = numerator/denominator
    return ThroughputResult(s*1e6, probs, terms, mode, len(collision_us),
                            numerator)


def dual_hop_throughput(probs, times, t):
    '''
    Saturation throughput of a dual hop.

    S = P_S1*P_S2*E / (P_I*sigma + P_C1*T_C1 + P_S1*P_C2*T_C2 + P_S1*P_S2*T_S)

    Parameters
    -----------
    probs : :class:`ContentionProbabilities`
    times : :class:`~risdcf.timing.TimingSet`
        RIS or conventional times; the mode is taken from here
    t : :class:`~risdcf.timing.MacTimings`

    Examples
    ----------
    >>> t = MacTimings()
    >>> probs = contention_probabilities(ContentionConfig(0.1, 5, 6))
    >>> dual_hop_throughput(probs, timing_set_ris(t, 16000), t)
    ThroughputResult(ris, m=2, 0.440859 Mbps)
    '''
    return _saturation_throughput(
        probs, times.t_success_us,
        (times.t_collision1_us, times.t_collision2_us), t, times.mode)


def throughput_gain(s_ris, s_conv):
    '''
    Throughput gain, kappa = S_R/S_C.

    Accepts numbers or :class:`ThroughputResult` objects.
    '''
    s_ris = getattr(s_ris, 'throughput_bps', s_ris)
    s_conv = getattr(s_conv, 'throughput_bps', s_conv)
    if s_conv == 0:
        raise ZeroDivisionError('conventional throughput is 0; gain is undefined')
    return s_ris/float(s_conv)


def _bianchi_map(tau, W, n, contenders):
    q = 1 - (1 - tau)**(contenders - 1)
    geometric = sum((2*q)**i for i in range(n))
    return 2./(1 + W + q*W*geometric), q


def bianchi_fixed_point(W=const.CW_MIN, n=const.MAX_BACKOFF_STAGE,
                        contenders=const.NUM_HOP1_CONTENDERS, damping=.5,
                        tol=1e-9, max_iter=10**4):
    '''
    Solves the binary exponential backoff fixed point.

    tau = 2(1-2q) / ((1-2q)(W+1) + qW(1-(2q)**n)),
    q = 1 - (1-tau)**(contenders-1)

    The first equation is evaluated in its geometric-sum form,
    2/(1 + W + qW*sum_{i<n}(2q)**i), which has no singularity at q = 1/2.

    Parameters
    -----------
    W : int
        initial contention window
    n : int
        maximum backoff stage
    contenders : int
        stations sharing the channel
    damping : float
        step fraction of the damped iteration, in (0, 1]
    tol : float
        stop when |delta tau| < tol
    max_iter : int

    Returns
    --------
    tau, q : float
        transmission and conditional collision probabilities
    '''
    if W < 1:
        raise ValueError('W must be >= 1, got %s' % W)
    if n < 0:
        raise ValueError('n must be >= 0, got %s' % n)
    if contenders < 1:
        raise ValueError('contenders must be >= 1, got %s' % contenders)
    if not 0 < damping <= 1:
        raise ValueError('damping must be in (0, 1], got %s' % damping)

    tau = 2./(W + 1)
    for k in range(max_iter):
        target, q = _bianchi_map(tau, W, n, contenders)
        step = damping*(target - tau)
        tau = min(max(tau + step, 0.), 1.)
        if abs(step) < tol:
            return tau, 1 - (1 - tau)**(contenders - 1)
    target, q = _bianchi_map(tau, W, n, contenders)
    raise ConvergenceError(
        'backoff fixed point did not converge after %i iterations '
        '(W=%s, n=%s, contenders=%s): tau=%.12g, residual=%.3g'
        % (max_iter, W, n, contenders, tau, target - tau))


def bianchi_transmission_probability(W=const.CW_MIN, n=const.MAX_BACKOFF_STAGE,
                                     contenders=const.NUM_HOP1_CONTENDERS,
                                     **kwargs):
    '''
    Maps a backoff window (W, n) to a per-slot transmission probability.

    Returns the tau of :func:`bianchi_fixed_point`.

    Examples
    ----------
    >>> bianchi_transmission_probability(32, 3, 1)
    0.0606...
    '''
    return bianchi_fixed_point(W, n, contenders, **kwargs)[0]


def bianchi_residual(tau, W, n, contenders):
    '''
    residual of the window equation at `tau`, tau - f(tau)
    '''
    return tau - _bianchi_map(tau, W, n, contenders)[0]


def multihop_success_time(m_hops, times_ris, times_conv, mode=RIS):
    '''
    End-to-end success time of an m-hop path.

    In RIS mode hops pair up into reflected dual hops; an odd last hop
    goes as one conventional cycle, T_S^C/2. In conventional mode every
    hop is one such cycle.

    Examples
    ----------
    >>> t = MacTimings()
    >>> ris, conv = timing_sets(t, 0.5)
    >>> multihop_success_time(3, ris, conv)
    Fraction(26676, 1)
    '''
    if m_hops < 1:
        raise ValueError('m_hops must be >= 1, got %s' % m_hops)
    single = times_conv.single_hop_success_us
    if mode == CONVENTIONAL:
        return m_hops*single
    if mode != RIS:
        raise TimingError('mode must be one of %s, got %r' % (MODES, mode))
    pairs, odd = divmod(m_hops, 2)
    return pairs*times_ris.t_success_us + odd*single


def multihop_collision_time(i, mode, t):
    '''
    Time lost to a collision during hop `i`.

    RIS mode alternates between a first-hop collision (odd i,
    RRTS + DIFS) and a collision of the forwarded reservation (even i,
    RRTS + SIFS + RRTS + DIFS). Conventional hops always lose RRTS + DIFS.

    Parameters
    -----------
    i : int
        hop index, from 1
    mode : ['ris', 'conventional']
    t : :class:`~risdcf.timing.MacTimings`
    '''
    if i < 1:
        raise ValueError('hop index must be >= 1, got %s' % i)
    if mode == CONVENTIONAL or i % 2 == 1:
        if mode not in MODES:
            raise TimingError('mode must be one of %s, got %r' % (MODES, mode))
        return t.rrts_us + t.difs_us
    return t.rrts_us + t.sifs_us + t.rrts_us + t.difs_us


def multihop_throughput(cfg, timings, mode, eta=const.RIS_EFFICIENCY):
    '''
    Saturation throughput of an m-hop path.

    Hop 1 succeeds with P_S1, every later hop with P_S2. A collision at
    hop j costs T_Cj and is reached with probability prod_{i<j} P_Si.

    Parameters
    -----------
    cfg : :class:`ContentionConfig`
    timings : :class:`~risdcf.timing.MacTimings`
    mode : ['ris', 'conventional']
    eta : float
        RIS efficiency, scales the payload airtime of reflected hops

    Examples
    ----------
    >>> multihop_throughput(ContentionConfig(m_hops=2), MacTimings(), 'ris')
    ThroughputResult(ris, m=2, 0.440859 Mbps)
    '''
    probs = contention_probabilities(cfg)
    times_ris, times_conv = timing_sets(timings, eta)
    success = multihop_success_time(cfg.m_hops, times_ris, times_conv, mode)
    collisions = [multihop_collision_time(i, mode, timings)
                  for i in range(1, cfg.m_hops + 1)]
    return _saturation_throughput(probs, success, collisions, timings, mode)


def optimal_transmission_probability(cfg, timings, mode, eta=const.RIS_EFFICIENCY):
    '''
    Transmission probability that maximizes the m-hop throughput.

    Searches p in (0, 1) with bounded scalar minimization; the p of `cfg`
    is ignored.

    Returns
    --------
    p_opt, throughput_bps : float
    '''
    def neg_throughput(p):
        return -multihop_throughput(cfg.copy(p=p), timings, mode, eta).throughput_bps

    res = minimize_scalar(neg_throughput, bounds=(0., 1.), method='bounded',
                          options={'xatol': 1e-8})
    return float(res.x), float(-res.fun)
