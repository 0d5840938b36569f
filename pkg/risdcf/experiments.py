'''
.. currentmodule:: risdcf.experiments
========================================
experiments (:mod:`risdcf.experiments`)
========================================

Configuration driven experiments producing result tables.

A scenario expands an :class:`~risdcf.io.config.ExperimentConfig` into
sweep points. Every point is a set of configuration changes; its row
echoes the full effective configuration followed by the outputs. Rows
come out in sweep order whether points run in one process or in a
:class:`multiprocessing.Pool`.

Scenarios
------------
gain_vs_power
    RIS efficiency and throughput gain over transmit power, for each
    element count
throughput_vs_LK
    RIS-assisted and conventional throughput over the contender counts
payload_sweep
    throughput over the payload length
window_sweep
    throughput over the initial backoff window, mapped to a transmission
    probability by the backoff fixed point
tau_sweep
    throughput over the transmission probability, with the maximizing
    probability of each mode
hops_sweep
    throughput and success time over the number of hops
sim_vs_analytic
    simulated against analytic throughput, see :func:`compare_report`

Functions
=============
.. autosummary::
    :toctree: generated/

    run_scenario
    sweep_points
    eta_table
    analytic_row
    simulate_row
    compare_report

'''
import itertools
import logging
import multiprocessing
import warnings
from collections import OrderedDict

import numpy as npy
import pandas as pd

from .analytic import (contention_probabilities, multihop_throughput,
                       multihop_success_time, throughput_gain,
                       optimal_transmission_probability,
                       bianchi_transmission_probability)
from .channel import ergodic_rate, use_ris_link
from .io.config import AUTO, SCENARIOS
from .io.csv import results_frame
from .protocol import BackoffMode, EXPONENTIAL
from .simulation import run_simulation, measure_event_fractions
from .timing import RIS, CONVENTIONAL, timing_sets

logger = logging.getLogger(__name__)

COMPARE_KEYS = ('p', 'mode')


class RisEfficiencyWarning(UserWarning):
    pass


class JoinError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ''


def _gain(s_ris, s_conv):
    '''
    kappa, nan when the conventional throughput is 0
    '''
    try:
        return throughput_gain(s_ris, s_conv)
    except ZeroDivisionError:
        return float('nan')


def _throughputs(cfg, eta):
    '''
    OrderedDict of S_R, S_C and kappa for `cfg` at efficiency `eta`
    '''
    contention = cfg.contention()
    timings = cfg.timings()
    s_r = multihop_throughput(contention, timings, RIS, eta)
    s_c = multihop_throughput(contention, timings, CONVENTIONAL, eta)
    out = OrderedDict()
    out['s_ris_mbps'] = s_r.throughput_mbps
    out['s_conv_mbps'] = s_c.throughput_mbps
    out['kappa'] = _gain(s_r, s_c)
    return out


def _eta_points(cfg):
    '''
    (changes, eta) per RIS size: one per element count when eta is
    estimated, else just the configured eta
    '''
    if cfg['eta'] != AUTO:
        return [({}, cfg['eta'])]
    out = []
    for n in cfg['elements']:
        changes = {'num_elements': n}
        out.append((changes, cfg.copy(**changes).eta_value()))
    return out


## scenario point evaluators, each returns OrderedDict of outputs
def _gain_vs_power(cfg, eta):
    params = cfg.channel_params()
    rate_c = ergodic_rate(params, 'conventional', cfg['eta_samples'], cfg['seed'])
    rate_r = ergodic_rate(params, 'ris-matched', cfg['eta_samples'], cfg['seed'])
    out = OrderedDict()
    out['rate_conventional'] = rate_c
    out['rate_ris'] = rate_r
    if not (rate_c > 0 and rate_r > 0):
        # eta is undefined once either rate underflows to 0
        warnings.warn('ergodic rate underflows to 0 at %s; eta is undefined' % params,
                      RisEfficiencyWarning)
        s_c = multihop_throughput(cfg.contention(), cfg.timings(), CONVENTIONAL)
        out['eta'] = float('nan')
        out['s_ris_mbps'] = float('nan')
        out['s_conv_mbps'] = s_c.throughput_mbps
        out['kappa'] = float('nan')
        return out
    eta = rate_r/rate_c
    out['eta'] = eta
    out.update(_throughputs(cfg, eta))
    if out['kappa'] < 1:
        warnings.warn('eta=%.3g at %s gives kappa=%.3g < 1'
                      % (eta, params, out['kappa']), RisEfficiencyWarning)
    return out


def _throughput_vs_LK(cfg, eta):
    out = OrderedDict(eta=eta)
    out.update(_throughputs(cfg, eta))
    s_r, s_c = out['s_ris_mbps'], out['s_conv_mbps']
    out['winner'] = RIS if s_r > s_c else (CONVENTIONAL if s_c > s_r else 'tie')
    return out


def _payload_sweep(cfg, eta):
    out = OrderedDict(eta=eta)
    out.update(_throughputs(cfg, eta))
    return out


def _window_sweep(cfg, eta):
    p = bianchi_transmission_probability(cfg['cw_min'], cfg['max_stage'], cfg['L'])
    out = OrderedDict(eta=eta)
    out['p_mapped'] = p
    out['p_mapping'] = 'bianchi(W=%i, n=%i, contenders=L)' % (cfg['cw_min'],
                                                              cfg['max_stage'])
    out.update(_throughputs(cfg.copy(p=p), eta))
    return out


def _tau_sweep(cfg, eta):
    out = OrderedDict(eta=eta)
    out.update(_throughputs(cfg, eta))
    contention, timings = cfg.contention(), cfg.timings()
    for mode, name in ((RIS, 'ris'), (CONVENTIONAL, 'conv')):
        p_opt, s_opt = optimal_transmission_probability(contention, timings, mode, eta)
        out['p_opt_%s' % name] = p_opt
        out['s_opt_%s_mbps' % name] = s_opt/1e6
    return out


def _hops_sweep(cfg, eta):
    times_ris, times_conv = timing_sets(cfg.timings(), eta)
    m = cfg['m_hops']
    out = OrderedDict(eta=eta)
    out['t_success_ris_us'] = multihop_success_time(m, times_ris, times_conv, RIS)
    out['t_success_conv_us'] = multihop_success_time(m, times_ris, times_conv,
                                                     CONVENTIONAL)
    out.update(_throughputs(cfg, eta))
    return out


def _sim_vs_analytic(cfg, eta):
    '''
    one row per mode; both throughputs in Mbps
    '''
    rows = []
    for mode in (RIS, CONVENTIONAL):
        ris = mode == RIS
        sim_eta = eta if ris else None
        s_a = multihop_throughput(cfg.contention(), cfg.timings(), mode, eta)
        metrics = run_simulation(
            cfg.copy(ris=ris).topology(), cfg.timings(),
            BackoffMode.p_persistent(cfg['p']), sim_eta,
            max_slots=cfg['max_slots'], duration_us=cfg['duration_us'],
            seed=cfg['seed'], retry_limit=cfg['retry_limit'])
        out = OrderedDict(mode=mode)
        out['eta'] = eta
        out['s_analytic_mbps'] = s_a.throughput_mbps
        out['s_sim_mbps'] = metrics.throughput_bps/1e6
        out['rounds'] = metrics.rounds
        out['success_count'] = metrics.success_count
        rows.append(out)
    return rows


_evaluators = {
    'gain_vs_power': _gain_vs_power,
    'throughput_vs_LK': _throughput_vs_LK,
    'payload_sweep': _payload_sweep,
    'window_sweep': _window_sweep,
    'tau_sweep': _tau_sweep,
    'hops_sweep': _hops_sweep,
    'sim_vs_analytic': _sim_vs_analytic,
}


def sweep_points(cfg, scenario=None):
    '''
    Expands a configuration into sweep points.

    Parameters
    -----------
    cfg : :class:`~risdcf.io.config.ExperimentConfig`
    scenario : str
        default is the configured scenario

    Returns
    --------
    points : list of (changes, eta)
        configuration changes and the RIS efficiency of each point
    '''
    scenario = cfg['scenario'] if scenario is None else scenario
    if scenario not in SCENARIOS:
        raise ValueError('unknown scenario %r' % scenario)

    if scenario == 'gain_vs_power':
        return [({'num_elements': n, 'transmit_power_dbm': ps}, None)
                for n, ps in itertools.product(cfg['elements'],
                                               cfg['power_range_dbm'])]

    eta = cfg['eta']
    if eta == AUTO:
        eta = cfg.eta_value()
    if scenario == 'throughput_vs_LK':
        return [({'L': L, 'K': K}, eta)
                for L, K in itertools.product(cfg['L_range'], cfg['K_range'])]
    if scenario == 'sim_vs_analytic':
        return [({'p': p}, eta) for p in cfg['sim_p_range']]

    key, values = {'payload_sweep': ('payload_bits', cfg['payload_range']),
                   'window_sweep': ('cw_min', cfg['cw_range']),
                   'tau_sweep': ('p', cfg['p_range']),
                   'hops_sweep': ('m_hops', cfg['hops_range'])}[scenario]
    points = []
    for changes, eta in _eta_points(cfg):
        for v in values:
            point = dict(changes)
            point[key] = v
            points.append((point, eta))
    return points


def _describe(changes):
    return ', '.join('%s=%s' % kv for kv in sorted(changes.items()))


def _evaluate(task):
    '''
    rows of one sweep point; module level so a Pool can pickle it
    '''
    scenario, index, cfg, changes, eta = task
    logger.info('%s point %i: %s', scenario, index, _describe(changes))
    try:
        point_cfg = cfg.copy(**changes)
        outputs = _evaluators[scenario](point_cfg, eta)
    except Exception as e:
        msg = '%s point %i (%s): %s' % (scenario, index, _describe(changes), e)
        try:
            err = type(e)(msg)
        except Exception:
            err = RuntimeError(msg)
        raise err from e

    if isinstance(outputs, dict):
        outputs = [outputs]
    rows = []
    for out in outputs:
        row = OrderedDict([('scenario', scenario), ('point', index)])
        row.update((k, v) for k, v in point_cfg.as_dict().items() if k != 'scenario')
        row.update(out)
        rows.append(row)
    return rows


def run_scenario(cfg, scenario=None):
    '''
    Runs a sweep scenario.

    Parameters
    -----------
    cfg : :class:`~risdcf.io.config.ExperimentConfig`
    scenario : str
        default is the configured scenario

    Returns
    --------
    table : :class:`pandas.DataFrame`
        one row per sweep point (two, one per mode, for
        sim_vs_analytic): the sweep index, the effective configuration,
        then the outputs

    Examples
    ----------
    >>> cfg = load_config(overrides={'hops_range': '2:4:1'})
    >>> run_scenario(cfg, 'hops_sweep')['t_success_ris_us'].tolist()
    [17456.0, 26676.0, 34912.0]
    '''
    scenario = cfg['scenario'] if scenario is None else scenario
    points = sweep_points(cfg, scenario)
    tasks = [(scenario, k, cfg, changes, eta)
             for k, (changes, eta) in enumerate(points)]
    jobs = min(cfg['jobs'], len(tasks))
    logger.info('%s: %i points, %i jobs', scenario, len(tasks), jobs)

    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            results = list(pool.imap(_evaluate, tasks))
    else:
        results = [_evaluate(t) for t in tasks]
    rows = [row for rows in results for row in rows]
    df = results_frame(rows)
    if scenario == 'sim_vs_analytic':
        df = _with_errors(df, cfg['tolerance'])
    return df


def _relative_error(reference, value):
    reference = npy.asarray(reference, dtype=float)
    value = npy.asarray(value, dtype=float)
    with npy.errstate(divide='ignore', invalid='ignore'):
        err = npy.abs(value - reference)/npy.abs(reference)
    # 0/0 is agreement
    err[(reference == 0) & (value == 0)] = 0.
    return err


def _with_errors(df, tolerance):
    df = df.copy()
    df['rel_error'] = _relative_error(df['s_analytic_mbps'], df['s_sim_mbps'])
    df['tolerance'] = tolerance
    df['pass'] = df['rel_error'] <= tolerance
    return df


def compare_report(analytic, simulated, keys=COMPARE_KEYS, value='throughput_mbps',
                   tolerance=0.05):
    '''
    Joins analytic and simulated results point by point.

    Parameters
    -----------
    analytic, simulated : :class:`pandas.DataFrame` or list of dict
        both hold the `keys` columns and a `value` column
    keys : sequence of str
        sweep keys to join on
    value : str
        compared column
    tolerance : float or str
        allowed relative error, or the name of a tolerance column of
        `simulated`

    Returns
    --------
    report : :class:`pandas.DataFrame`
        keys, analytic and simulated values, rel_error, tolerance and a
        boolean pass column

    Raises
    --------
    JoinError
        a key present on one side only
    '''
    a = results_frame(analytic)
    s = results_frame(simulated)
    keys = list(keys)
    for name, df in (('analytic', a), ('simulated', s)):
        missing = [k for k in keys + [value] if k not in df.columns]
        if missing:
            raise JoinError('%s results lack columns %s' % (name, missing))
    if isinstance(tolerance, str):
        s = s[keys + [value, tolerance]].rename(columns={tolerance: 'tolerance'})
    else:
        s = s[keys + [value]].assign(tolerance=float(tolerance))
    merged = pd.merge(a[keys + [value]], s, on=keys, how='outer',
                      suffixes=('_analytic', '_sim'), indicator=True,
                      sort=False)
    unmatched = merged[merged['_merge'] != 'both']
    if len(unmatched):
        raise JoinError('sweep keys without a counterpart: %s' %
                        unmatched[keys + ['_merge']].to_dict('records'))
    report = merged.drop(columns='_merge')
    report['rel_error'] = _relative_error(report[value + '_analytic'],
                                          report[value + '_sim'])
    report['pass'] = report['rel_error'] <= report['tolerance']
    return report


def eta_table(cfg):
    '''
    Ergodic rates and RIS efficiency for every element count and power.

    Returns
    --------
    table : :class:`pandas.DataFrame`
        num_elements, transmit_power_dbm, the conventional, phase matched
        and random phase rates with their standard errors, eta and the
        random phase efficiency
    '''
    rows = []
    samples, seed = cfg['eta_samples'], cfg['seed']
    for n, ps in itertools.product(cfg['elements'], cfg['power_range_dbm']):
        params = cfg.channel_params().copy(num_elements=n, transmit_power_dbm=ps)
        row = OrderedDict([('num_elements', n), ('transmit_power_dbm', ps)])
        for mode, name in (('conventional', 'conventional'),
                           ('ris-matched', 'ris_matched'),
                           ('ris-random', 'ris_random')):
            rate, err = ergodic_rate(params, mode, samples, seed, return_stderr=True)
            row['rate_%s' % name] = rate
            row['stderr_%s' % name] = err
        rate_c = row['rate_conventional']
        row['eta'] = row['rate_ris_matched']/rate_c if rate_c else float('nan')
        row['eta_random'] = row['rate_ris_random']/rate_c if rate_c else float('nan')
        logger.info('eta(N=%i, Ps=%g dBm) = %.6g', n, ps, row['eta'])
        rows.append(row)
    return results_frame(rows)


def analytic_row(cfg):
    '''
    One row with the timing terms, outcome probabilities and throughputs
    of the configured scenario point.
    '''
    eta = cfg.eta_value()
    timings = cfg.timings()
    contention = cfg.contention()
    times_ris, times_conv = timing_sets(timings, eta)
    row = OrderedDict(cfg.as_dict())
    row['eta'] = eta
    for prefix, ts in (('ris', times_ris), ('conv', times_conv)):
        row['t_success_%s_us' % prefix] = ts.t_success_us
        row['t_collision1_%s_us' % prefix] = ts.t_collision1_us
        row['t_collision2_%s_us' % prefix] = ts.t_collision2_us
    row.update(contention_probabilities(contention).as_dict())
    dual = contention.copy(m_hops=2)
    s_r = multihop_throughput(dual, timings, RIS, eta)
    s_c = multihop_throughput(dual, timings, CONVENTIONAL, eta)
    row['s_ris_mbps'] = s_r.throughput_mbps
    row['s_conv_mbps'] = s_c.throughput_mbps
    row['kappa'] = _gain(s_r, s_c)
    m_r = multihop_throughput(contention, timings, RIS, eta)
    m_c = multihop_throughput(contention, timings, CONVENTIONAL, eta)
    row['s_ris_m_mbps'] = m_r.throughput_mbps
    row['s_conv_m_mbps'] = m_c.throughput_mbps
    row['kappa_m'] = _gain(m_r, m_c)
    return results_frame([row])


def simulate_row(cfg):
    '''
    One simulation run of the configured topology.

    The RIS is used when `ris` is set and the efficiency reaches
    `eta_threshold`. The row holds the configuration, the run metrics,
    the measured outcome fractions and the analytic throughput of the
    mode that ran.
    '''
    eta = cfg.eta_value()
    ris = cfg['ris'] and use_ris_link(eta, cfg['eta_threshold'])
    metrics = run_simulation(
        cfg.topology(), cfg.timings(), cfg.backoff_mode(), eta if ris else None,
        max_slots=cfg['max_slots'], duration_us=cfg['duration_us'],
        seed=cfg['seed'], trace=cfg['trace'], eta_threshold=cfg['eta_threshold'],
        retry_limit=cfg['retry_limit'])
    mode = RIS if ris else CONVENTIONAL

    row = OrderedDict(cfg.as_dict())
    row['eta'] = eta
    row['mode'] = mode
    row.update(metrics.as_dict())
    row['throughput_mbps'] = metrics.throughput_bps/1e6
    if metrics.rounds:
        for k, v in measure_event_fractions(metrics).as_dict().items():
            row['measured_%s' % k] = v
    contention = cfg.contention()
    if cfg['backoff'] == EXPONENTIAL:
        contention = contention.copy(p=bianchi_transmission_probability(
            cfg['cw_min'], cfg['max_stage'], cfg['L']))
    row['s_analytic_mbps'] = multihop_throughput(
        contention, cfg.timings(), mode, eta).throughput_mbps
    return results_frame([row])
