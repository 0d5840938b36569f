'''
.. module:: risdcf.io.config
========================================
config (:mod:`risdcf.io.config`)
========================================

Experiment configuration.

A configuration file is flat ``key = value`` text, with no section
header. Keys are case sensitive and ``#`` or ``;`` start a comment. Sweep
ranges are written ``start:stop:step`` (stop included) or as a comma
separated list::

    # first-hop contention
    L = 5
    K = 6
    p_range = 0:0.5:0.05
    eta = auto          ; estimate from the channel

Every key can also be given as a command line flag of the same name,
``--L 8``; flags win over the file. Unset keys take the reference
scenario defaults listed in :data:`SCHEMA`.

.. autosummary::
    :toctree: generated/

    ExperimentConfig
    load_config
    add_arguments
    overrides_from_args
'''
import configparser
import logging
import re
from collections import OrderedDict, namedtuple

import numpy as npy

from .. import constants as const
from ..analytic import ContentionConfig
from ..channel import ChannelParams, ris_efficiency
from ..protocol import BackoffMode, P_PERSISTENT, EXPONENTIAL
from ..timing import MacTimings
from ..topology import Topology
from ..util import get_fid, parse_range, is_monotone

logger = logging.getLogger(__name__)

SCENARIOS = ('gain_vs_power', 'throughput_vs_LK', 'payload_sweep',
             'window_sweep', 'tau_sweep', 'hops_sweep', 'sim_vs_analytic')
BACKOFF_KINDS = (P_PERSISTENT, EXPONENTIAL)
AUTO = 'auto'

# configparser needs a section; files don't carry one
_SECTION = 'risdcf'


class ConfigError(ValueError):
    '''
    A configuration value that cannot be parsed or fails validation.

    Attributes
    ------------
    key : str or None
    line : int or None
        line number in `source`, when the value came from a file
    source : str or None
        file name or ``--flag``
    '''
    def __init__(self, message, key=None, line=None, source=None):
        self.message = message
        self.key = key
        self.line = line
        self.source = source
        super(ConfigError, self).__init__(self.__str__())

    def __str__(self):
        where = ''
        if self.source is not None and self.line is not None:
            where = '%s:%i: ' % (self.source, self.line)
        elif self.source is not None:
            where = '%s: ' % self.source
        key = '' if self.key is None else '%s: ' % self.key
        return '%s%s%s' % (where, key, self.message)

    def __reduce__(self):
        return (ConfigError, (self.message, self.key, self.line, self.source))


## value parsers
def _int(text):
    if isinstance(text, (int, npy.integer)):
        return int(text)
    v = float(text)
    if v != int(v):
        raise ValueError('%r is not an integer' % text)
    return int(v)


def _float(text):
    v = float(text)
    if npy.isnan(v):
        raise ValueError('nan is not allowed')
    return v


def _bool(text):
    if isinstance(text, bool):
        return text
    try:
        return configparser.ConfigParser.BOOLEAN_STATES[str(text).strip().lower()]
    except KeyError:
        raise ValueError('%r is not a boolean' % text)


def _str(text):
    return str(text).strip()


def _optional(parse):
    def parse_optional(text):
        if text is None or str(text).strip().lower() in ('', 'none'):
            return None
        return parse(text)
    return parse_optional


def _eta(text):
    if str(text).strip().lower() == AUTO:
        return AUTO
    return _float(text)


def _range(kind):
    def parse(text):
        if isinstance(text, (list, tuple)):
            values = [kind(v) for v in text]
        else:
            values = parse_range(str(text), kind)
        if not values:
            raise ValueError('range %r is empty' % (text,))
        if not is_monotone(values):
            raise ValueError('range %r is not strictly monotone' % (text,))
        return values
    return parse


## validators, each returns an error message or None
def _positive(v):
    if not v > 0:
        return 'must be positive, got %s' % v


def _nonnegative(v):
    if not v >= 0:
        return 'must be >= 0, got %s' % v


def _at_least(n):
    def check(v):
        if v < n:
            return 'must be >= %s, got %s' % (n, v)
    return check


def _unit_interval(v):
    if not 0 <= v <= 1:
        return 'must be in [0, 1], got %s' % v


def _one_of(choices):
    def check(v):
        if v not in choices:
            return 'must be one of %s, got %r' % (', '.join(choices), v)
    return check


def _each(check):
    def check_all(values):
        for v in values:
            msg = check(v)
            if msg:
                return msg
    return check_all


def _optional_check(check):
    def check_optional(v):
        if v is not None:
            return check(v)
    return check_optional


def _eta_check(v):
    if v != AUTO and not (v > 0 and npy.isfinite(v)):
        return 'must be a positive number or auto, got %s' % v


Option = namedtuple('Option', 'key parse default check help')

_options = [
    # general
    Option('scenario', _str, 'throughput_vs_LK', _one_of(SCENARIOS),
           'sweep scenario'),
    Option('seed', _int, 0, _nonnegative, 'seed of every random stream'),
    Option('output', _optional(_str), None, None,
           'CSV output file, stdout if unset'),
    Option('jobs', _int, 1, _at_least(1), 'sweep points evaluated in parallel'),
    Option('trace', _optional(_str), None, None,
           'event trace file of a simulation run'),
    # channel
    Option('frequency_hz', _float, const.FREQUENCY_HZ, _positive, 'carrier frequency'),
    Option('distance_m', _float, const.DISTANCE_M, _positive, 'node-to-node distance'),
    Option('nakagami_m', _float, const.NAKAGAMI_M, _at_least(0.5),
           'Nakagami shape parameter'),
    Option('nakagami_omega', _float, const.NAKAGAMI_OMEGA, _positive,
           'Nakagami spread'),
    Option('noise_power_dbm', _float, const.NOISE_POWER_DBM, None, 'noise power N0'),
    Option('transmit_power_dbm', _float, const.TRANSMIT_POWER_DBM, None,
           'transmit power Ps'),
    Option('num_elements', _int, const.NUM_ELEMENTS, _at_least(1), 'RIS elements N'),
    # timings
    Option('rrts_bits', _int, const.RRTS_BITS, _positive, 'R-RTS length'),
    Option('rcts_bits', _int, const.RCTS_BITS, _positive, 'R-CTS length'),
    Option('ack_bits', _int, const.ACK_BITS, _positive, 'ACK length'),
    Option('phy_header_bits', _int, const.PHY_HEADER_BITS, _positive, 'PHY header length'),
    Option('mac_header_bits', _int, const.MAC_HEADER_BITS, _positive, 'MAC header length'),
    Option('base_rate_bps', _float, const.BASE_RATE_BPS, _positive, 'base rate'),
    Option('sifs_us', _float, const.SIFS_US, _positive, 'SIFS'),
    Option('difs_us', _float, const.DIFS_US, _positive, 'DIFS'),
    Option('slot_us', _float, const.SLOT_US, _positive, 'slot time'),
    Option('payload_bits', _int, const.PAYLOAD_BITS, _nonnegative, 'payload length E'),
    # contention
    Option('p', _float, const.TRANSMISSION_PROBABILITY, _unit_interval,
           'per-slot transmission probability'),
    Option('L', _int, const.NUM_HOP1_CONTENDERS, _at_least(1), 'first-hop contenders'),
    Option('K', _int, const.NUM_HOP2_CONTENDERS, _at_least(1), 'later-hop contenders'),
    Option('m_hops', _int, const.NUM_HOPS, _at_least(1), 'relay hops'),
    Option('cw_min', _int, const.CW_MIN, _at_least(1), 'initial backoff window W'),
    Option('max_stage', _int, const.MAX_BACKOFF_STAGE, _nonnegative,
           'maximum backoff stage n'),
    Option('retry_limit', _int, const.RETRY_LIMIT, _nonnegative, 'retransmissions'),
    Option('backoff', _str, P_PERSISTENT, _one_of(BACKOFF_KINDS),
           'simulated backoff rule'),
    # efficiency
    Option('eta', _eta, const.RIS_EFFICIENCY, _eta_check,
           'RIS efficiency, or auto to estimate it from the channel'),
    Option('eta_threshold', _float, 0., _nonnegative,
           'lowest efficiency at which relays reflect'),
    Option('eta_samples', _int, 10**5, _at_least(1),
           'Monte-Carlo samples per efficiency estimate'),
    # simulation
    Option('max_slots', _optional(_int), 200000, _optional_check(_at_least(1)),
           'contention rounds per simulation run'),
    Option('duration_us', _optional(_float), None, _optional_check(_positive),
           'simulated time per run'),
    Option('tolerance', _float, 0.05, _positive,
           'relative error allowed by compare'),
    Option('interferer_traffic', _bool, False, None,
           'interferers run full exchanges'),
    Option('ris', _bool, True, None, 'relays carry an RIS'),
    # sweep ranges
    Option('power_range_dbm', _range(float), [0., 10., 20., 30., 40., 50., 60.],
           None, 'transmit powers of gain_vs_power and eta'),
    Option('elements', _range(int), [4, 8, 16], _each(_at_least(1)),
           'RIS element counts'),
    Option('L_range', _range(int), [2, 6, 10, 14, 18, 22, 26, 30], _each(_at_least(1)),
           'L values of throughput_vs_LK'),
    Option('K_range', _range(int), [2, 6, 10, 14, 18, 22, 26, 30], _each(_at_least(1)),
           'K values of throughput_vs_LK'),
    Option('payload_range', _range(int), [2000, 4000, 8000, 12000, 16000],
           _each(_nonnegative), 'payload lengths of payload_sweep'),
    Option('cw_range', _range(int), [8, 16, 32, 64, 128, 256], _each(_at_least(1)),
           'initial windows of window_sweep'),
    Option('p_range', _range(float), [0., .05, .1, .15, .2, .25, .3, .35, .4, .45, .5],
           _each(_unit_interval), 'transmission probabilities of tau_sweep'),
    Option('hops_range', _range(int), [1, 2, 3, 4, 5, 6, 7, 8], _each(_at_least(1)),
           'hop counts of hops_sweep'),
    Option('sim_p_range', _range(float), [.05, .1, .2], _each(_unit_interval),
           'transmission probabilities of sim_vs_analytic'),
]

#: key -> :class:`Option`, in column order
SCHEMA = OrderedDict((o.key, o) for o in _options)

RANGE_KEYS = tuple(k for k, o in SCHEMA.items() if isinstance(o.default, list))


def format_value(value):
    '''
    text form of a configuration value, as echoed in result rows
    '''
    if isinstance(value, list):
        return ','.join('%g' % v for v in value)
    return value


def parse_value(key, text, line=None, source=None):
    '''
    Parses and validates one value.

    Raises
    --------
    ConfigError
        unknown key, unparseable or out of range value
    '''
    try:
        opt = SCHEMA[key]
    except KeyError:
        raise ConfigError('unknown key', key, line, source)
    try:
        value = opt.parse(text)
    except (TypeError, ValueError) as e:
        raise ConfigError('cannot parse %r: %s' % (text, e), key, line, source)
    if opt.check is not None:
        msg = opt.check(value)
        if msg:
            raise ConfigError(msg, key, line, source)
    return value


class ExperimentConfig(object):
    '''
    A validated experiment configuration.

    Values are read with item access, ``cfg['L']``. Construction checks
    every value and every parameter object the values make.

    Parameters
    ------------
    values : dict
        parsed values; missing keys take their defaults
    sources : dict
        key -> (line, source) of where each value came from, for error
        messages

    Examples
    ----------
    >>> cfg = ExperimentConfig()
    >>> cfg['L'], cfg['K']
    (5, 6)
    >>> cfg.copy(L=8).contention()
    ContentionConfig(p=0.1, L=8, K=6, m_hops=2)
    '''
    def __init__(self, values=None, sources=None):
        self.sources = dict(sources or {})
        self.values = OrderedDict((k, o.default) for k, o in SCHEMA.items())
        for k, v in (values or {}).items():
            line, source = self.sources.get(k, (None, None))
            self.values[k] = parse_value(k, v, line, source)
        self._validate()

    def _validate(self):
        for k, opt in SCHEMA.items():
            if opt.check is None:
                continue
            msg = opt.check(self.values[k])
            if msg:
                line, source = self.sources.get(k, (None, None))
                raise ConfigError(msg, k, line, source)
        for build in (self.channel_params, self.timings, self.contention,
                      self.backoff_mode):
            try:
                build()
            except ValueError as e:
                raise ConfigError(str(e))

    def __getitem__(self, key):
        return self.values[key]

    def __contains__(self, key):
        return key in self.values

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.values == other.values

    def __ne__(self, other):
        return (not self.__eq__(other))

    def __repr__(self):
        changed = ['%s=%r' % (k, v) for k, v in self.values.items()
                   if v != SCHEMA[k].default]
        return 'ExperimentConfig(%s)' % ', '.join(changed)

    def copy(self, **changes):
        '''
        returns a new copy, with `changes` applied and validated
        '''
        values = OrderedDict(self.values)
        values.update(changes)
        return ExperimentConfig(values, self.sources)

    def as_dict(self):
        '''
        effective configuration in schema order, ranges as text
        '''
        return OrderedDict((k, format_value(v)) for k, v in self.values.items())

    def channel_params(self):
        return ChannelParams.from_config(self.values)

    def timings(self):
        return MacTimings.from_config(self.values)

    def contention(self):
        v = self.values
        return ContentionConfig(v['p'], v['L'], v['K'], v['m_hops'])

    def backoff_mode(self):
        v = self.values
        if v['backoff'] == EXPONENTIAL:
            return BackoffMode.exponential(v['cw_min'], v['max_stage'])
        return BackoffMode.p_persistent(v['p'])

    def topology(self):
        v = self.values
        return Topology.chain(v['m_hops'], v['L'], v['K'], v['ris'],
                              v['interferer_traffic'])

    def eta_value(self, params=None):
        '''
        The RIS efficiency, estimated by Monte Carlo when set to auto.

        Parameters
        -----------
        params : :class:`~risdcf.channel.ChannelParams`
            channel to estimate from, default :meth:`channel_params`
        '''
        eta = self.values['eta']
        if eta != AUTO:
            return eta
        params = self.channel_params() if params is None else params
        eta = ris_efficiency(params, self.values['eta_samples'], self.values['seed'])
        logger.info('estimated eta=%.6g for %s', eta, params)
        return eta


_key_re = re.compile(r'^\s*([^=\s#;]+)\s*=')


def _line_numbers(text):
    '''
    key -> line number of its first assignment in `text`
    '''
    out = {}
    for k, line in enumerate(text.splitlines(), 1):
        match = _key_re.match(line)
        if match is not None:
            out.setdefault(match.group(1), k)
    return out


def load_config(path=None, overrides=None):
    '''
    Loads and validates an experiment configuration.

    Parameters
    -----------
    path : str, file or None
        configuration file; None gives the defaults
    overrides : dict
        key -> value or text from the command line; these win over the
        file

    Returns
    --------
    cfg : :class:`ExperimentConfig`

    Raises
    --------
    ConfigError
        naming the key and the line or flag of the bad value

    Examples
    ----------
    >>> load_config()['cw_min']
    32
    >>> load_config('sweep.cfg', {'L': '8'})
    '''
    values, sources = {}, {}
    if path is not None:
        fid = get_fid(path)
        name = getattr(fid, 'name', '<config>')
        try:
            text = fid.read()
        finally:
            if fid is not path:
                fid.close()
        lines = _line_numbers(text)

        parser = configparser.ConfigParser(
            delimiters=('=',), comment_prefixes=('#', ';'),
            inline_comment_prefixes=('#', ';'), interpolation=None,
            default_section='__defaults__')
        parser.optionxform = str
        try:
            parser.read_string('[%s]\n%s' % (_SECTION, text), source=name)
        except configparser.DuplicateOptionError as e:
            raise ConfigError('set more than once', e.option, e.lineno - 1, name)
        except configparser.ParsingError as e:
            line, content = e.errors[0]
            raise ConfigError('not a key = value line: %s' % content.strip(),
                              None, line - 1, name)
        except configparser.Error as e:
            raise ConfigError(str(e).split('\n')[0], None, None, name)
        if parser.sections() != [_SECTION]:
            raise ConfigError('section headers are not supported', None,
                              None, name)

        for k, text_value in parser.items(_SECTION):
            line = lines.get(k)
            values[k] = parse_value(k, text_value, line, name)
            sources[k] = (line, name)
        logger.info('read %i keys from %s', len(values), name)

    for k, v in (overrides or {}).items():
        flag = '--%s' % k
        values[k] = parse_value(k, v, None, flag)
        sources[k] = (None, flag)

    return ExperimentConfig(values, sources)


def add_arguments(parser):
    '''
    Adds one ``--key`` flag per configuration key to an argparse parser.

    Flags keep their text; :func:`load_config` parses it.
    '''
    group = parser.add_argument_group('configuration keys')
    for k, opt in SCHEMA.items():
        default = format_value(opt.default)
        group.add_argument('--%s' % k, dest=k, default=None, metavar='VALUE',
                           help='%s (default: %s)' % (opt.help, default))
    return parser


def overrides_from_args(args):
    '''
    key -> text of every configuration flag given on the command line
    '''
    return OrderedDict((k, getattr(args, k)) for k in SCHEMA
                       if getattr(args, k, None) is not None)
