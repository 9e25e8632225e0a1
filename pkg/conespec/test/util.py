# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import json
from functools import lru_cache
from pkgutil import get_data

from conespec.crosssection import RoundSphere, eigensolve


def find_data(name):
	"""
	Retrieves the raw contents of a file in the test data directory.
	"""
	return get_data("conespec.test", "testdata/{0}".format(name))


def find_config(name):
	"""
	Retrieves the text of a run configuration from the test data directory.
	"""
	rawdata = find_data("{0}.json".format(name))
	return rawdata.decode("utf-8")


def load_config(name):
	return json.loads(find_config(name))


@lru_cache(maxsize=None)
def free_spectrum(count=400):
	"""
	The angular spectrum of the unit S^2 with a = 0: the cone is R^3.
	"""
	return eigensolve(RoundSphere(2, 1.0, 0.0), 3, count)


@lru_cache(maxsize=None)
def potential_spectrum(a, count=400):
	"""
	The angular spectrum of the unit S^2 with the constant potential a.
	"""
	return eigensolve(RoundSphere(2, 1.0, a), 3, count)


@lru_cache(maxsize=None)
def sphere_spectrum(n, count=400):
	"""
	The angular spectrum of the unit S^(n-1) section of R^n.
	"""
	return eigensolve(RoundSphere(n - 1, 1.0, 0.0), n, count)
