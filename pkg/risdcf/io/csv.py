'''
.. module:: risdcf.io.csv
========================================
csv (:mod:`risdcf.io.csv`)
========================================

Functions for reading and writing result tables as csv files.

Columns keep the order of the rows they are built from. Floating point
values are printed with 9 significant digits, so a table written twice
from the same rows gives the same bytes.

.. autosummary::
    :toctree: generated/

    results_frame
    write_results
    read_results
'''
import sys
from fractions import Fraction

import numpy as npy
import pandas as pd

from ..util import get_fid

FLOAT_FORMAT = '%.9g'


def _plain(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, npy.generic):
        return value.item()
    return value


def results_frame(rows):
    '''
    Builds a :class:`pandas.DataFrame` from result rows.

    Parameters
    -----------
    rows : list of dict or DataFrame
        column order is taken from the first row; exact fractions become
        floats

    Returns
    --------
    df : :class:`pandas.DataFrame`
    '''
    if isinstance(rows, pd.DataFrame):
        df = rows.copy()
        for c in df.columns:
            if df[c].dtype == object:
                df[c] = [_plain(v) for v in df[c]]
        return df
    rows = list(rows)
    if not rows:
        return pd.DataFrame()
    columns = list(rows[0].keys())
    for row in rows[1:]:
        columns.extend(k for k in row if k not in columns)
    data = [[_plain(row.get(c)) for c in columns] for row in rows]
    return pd.DataFrame(data, columns=columns)


def write_results(rows, file=None):
    '''
    Writes result rows to a csv file.

    Parameters
    -----------
    rows : list of dict or DataFrame
    file : str, file or None
        None writes to stdout

    Returns
    --------
    df : :class:`pandas.DataFrame`
        the table that was written

    Examples
    -----------
    >>> write_results([{'p': 0.1, 'throughput_mbps': 0.440859}], 'out.csv')
    '''
    df = results_frame(rows)
    fid = sys.stdout if file is None else get_fid(file, 'w', newline='')
    try:
        df.to_csv(fid, index=False, float_format=FLOAT_FORMAT,
                  lineterminator='\n')
    finally:
        if fid is not file and fid is not sys.stdout:
            fid.close()
    return df


def read_results(file):
    '''
    Reads a csv file written by :func:`write_results`.

    Returns
    --------
    df : :class:`pandas.DataFrame`
    '''
    return pd.read_csv(file)
