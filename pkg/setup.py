#!/usr/bin/env python

from setuptools import setup, find_packages


with open('risdcf/__init__.py') as fid:
    for line in fid:
        if line.startswith('__version__'):
            VERSION = line.strip().split()[-1][1:-1]
            break

LONG_DESCRIPTION = """
	risdcf models relay channel access with reconfigurable intelligent surfaces:
	RIS link efficiency, closed-form saturation throughput of RIS-assisted and
	conventional multi-hop relaying, and a discrete-event simulation of the
	reservation protocol.
"""
setup(name='risdcf',
	version=VERSION,
	license='new BSD',
	description='Throughput analysis and simulation of RIS-assisted relay MAC',
	long_description=LONG_DESCRIPTION,
	packages=find_packages(),
	install_requires = [
		'numpy>=1.17',
		'scipy',
		'pandas>=1.5',
		'simpy>=4',
		],
	tests_require = ['nose', 'coverage'],
	entry_points = {
		'console_scripts': [
			'risdcf_experiment = risdcf.programs.risdcf_experiment:main',
			],
		},
	package_dir={'risdcf':'risdcf'},
	include_package_data = True,
	data_files = [("", ["LICENSE.txt"])],
	)
