"""
Utils package initialization.
Number theory, summation, random streams, validation and report helpers.
"""
from gl3lab.utils.validators import *
from gl3lab.utils.number_theory import *
from gl3lab.utils.summation import *
from gl3lab.utils.rng import *
from gl3lab.utils.modular import ramanujan_tau, ramanujan_tau_at_primes
from gl3lab.utils.reports import ReportWriter, write_csv, write_json
