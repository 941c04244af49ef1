"""Numerical experiments on moments of Dirichlet L-functions to a prime modulus."""

__version__ = "0.1.0"

from .characters import PrimeModulus, build_modulus
from .lfunctions import CriticalPoint, l_all, l_reference, l_truncated
from .mollifier import MollifierParams, make_params
from .moments import lemma21_check, lemma22_check, moment, normalizer
from .twisted import TwistPair, twisted_main

__all__ = [
    "PrimeModulus", "build_modulus", "CriticalPoint", "l_all", "l_reference", "l_truncated",
    "MollifierParams", "make_params", "lemma21_check", "lemma22_check", "moment",
    "normalizer", "TwistPair", "twisted_main",
]
