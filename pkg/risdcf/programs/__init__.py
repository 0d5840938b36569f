'''
Command line programs. :mod:`risdcf_experiment` is installed as the
``risdcf_experiment`` console script.
'''
