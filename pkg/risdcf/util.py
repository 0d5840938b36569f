"""

.. currentmodule:: risdcf.util
========================================
util (:mod:`risdcf.util`)
========================================

Holds utility functions that are general conveniences.


General
------------
.. autosummary::
   :toctree: generated/

   get_fid
   parse_range
   is_monotone
   spawn_rng

"""
import re

import numpy as npy

# globals
basestring = (str, bytes)

_range_re = re.compile(r'^\s*([^:]+):([^:]+):([^:]+)\s*$')


def get_fid(file, *args, **kwargs):
    '''
    Returns a file object, given a filename or file object

    Useful when you want to allow the arguments of a function to
    be either files or filenames

    Parameters
    -------------
    file : str/unicode or file-object
        file to open
    \\*args, \\*\\*kwargs : arguments and keyword arguments to `open()`

    '''
    if isinstance(file, basestring):
        return open(file, *args, **kwargs)
    else:
        return file


def parse_range(text, kind=float):
    '''
    Parses a sweep range.

    Two forms are accepted, an inclusive `start:stop:step` triple or a
    comma separated list.

    Parameters
    -----------
    text : str
        the range text
    kind : callable
        converter applied to every value (`int` or `float`)

    Returns
    --------
    values : list

    Examples
    -----------
    >>> parse_range('2:4:1', int)
    [2, 3, 4]
    >>> parse_range('4,8,16', int)
    [4, 8, 16]
    '''
    match = _range_re.match(text)
    if match is None:
        return [kind(k) for k in text.split(',') if k.strip()]

    start, stop, step = [kind(k) for k in match.groups()]
    if step == 0:
        raise ValueError('range step must be nonzero in %r' % text)
    n = int(npy.floor((stop - start)/float(step) + 1e-9)) + 1
    if n < 1:
        return []
    values = [start + k*step for k in range(n)]
    if kind is float:
        # keep printed values free of accumulated error
        values = [float(npy.round(v, 12)) for v in values]
    return values


def is_monotone(values):
    '''
    True if `values` is strictly increasing or strictly decreasing.

    A single value counts as monotone.
    '''
    d = npy.diff(npy.asarray(values, dtype=float))
    return bool((d > 0).all() or (d < 0).all())


def spawn_rng(seed, *key):
    '''
    Returns an independent :class:`numpy.random.Generator` for a stream key.

    Streams with the same `seed` and `key` always produce the same draws,
    regardless of how many other streams exist. This gives common random
    numbers across runs that use a different number of streams.

    Examples
    -----------
    >>> g = spawn_rng(1, 0, 3)
    '''
    ss = npy.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return npy.random.default_rng(ss)

