#!/usr/bin/env python
'''
Command line runner of risdcf experiments.

    risdcf_experiment.py eta -c sweep.cfg --elements 4,8,16
    risdcf_experiment.py analytic --p 0.2
    risdcf_experiment.py simulate --max_slots 100000 --trace run.tsv
    risdcf_experiment.py sweep --scenario hops_sweep --output hops.csv
    risdcf_experiment.py compare --sim_p_range 0.05,0.1 --jobs 2

Exit status is 0 on success and 2 when a compared point misses its
tolerance. It is 1 when the configuration or a parameter is invalid, a
file cannot be read or written, or a computation fails: no fixed point,
a stalled simulation or results that cannot be joined.
'''
import argparse
import logging
import sys

from risdcf.experiments import (run_scenario, eta_table, analytic_row,
                                simulate_row, compare_report, COMPARE_KEYS, JoinError)
from risdcf.analytic import ConvergenceError
from risdcf.simulation import DeadlockError
from risdcf.io.config import load_config, add_arguments, overrides_from_args
from risdcf.io.csv import write_results

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_COMPARE_FAILED = 2


def build_parser():
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument('-c', '--config', default=None, metavar='FILE',
                        help='key = value configuration file')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v logs progress, -vv debug detail')
    add_arguments(common)

    parser = argparse.ArgumentParser(
        prog='risdcf_experiment',
        description='RIS-assisted relay MAC experiments, written as csv.',
        allow_abbrev=False)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True
    for name, text in (('eta', 'ergodic rates and RIS efficiency'),
                       ('analytic', 'closed-form throughput of one point'),
                       ('simulate', 'one simulation run'),
                       ('sweep', 'run the configured scenario'),
                       ('compare', 'simulation against the analytic model')):
        sub.add_parser(name, parents=[common], help=text, allow_abbrev=False)
    return parser


def _split_comparison(df):
    keys = list(COMPARE_KEYS)
    analytic = df[keys + ['s_analytic_mbps']].rename(
        columns={'s_analytic_mbps': 'throughput_mbps'})
    simulated = df[keys + ['s_sim_mbps']].rename(
        columns={'s_sim_mbps': 'throughput_mbps'})
    return analytic, simulated


def run(args):
    '''
    runs a parsed command, returns the exit status
    '''
    cfg = load_config(args.config, overrides_from_args(args))
    logger.info('configuration: %r', cfg)
    status = EXIT_OK
    if args.command == 'eta':
        df = eta_table(cfg)
    elif args.command == 'analytic':
        df = analytic_row(cfg)
    elif args.command == 'simulate':
        df = simulate_row(cfg)
    elif args.command == 'sweep':
        df = run_scenario(cfg)
    else:
        analytic, simulated = _split_comparison(
            run_scenario(cfg, 'sim_vs_analytic'))
        df = compare_report(analytic, simulated, tolerance=cfg['tolerance'])
        failed = df[~df['pass']]
        for row in failed.to_dict('records'):
            logger.error('p=%s %s: relative error %.4g exceeds %.4g',
                         row['p'], row['mode'], row['rel_error'], row['tolerance'])
        if len(failed):
            status = EXIT_COMPARE_FAILED
    write_results(df, cfg['output'])
    return status


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)
    try:
        return run(args)
    except (ValueError, OSError, ZeroDivisionError, ConvergenceError, DeadlockError,
            JoinError) as e:
        logger.error('%s', e)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
