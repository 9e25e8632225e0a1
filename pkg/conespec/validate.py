# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Exceptions raised by conespec, and tools for validating run configurations.
"""
import copy
import math
from conespec import constants as C


class ConeError(Exception):
	"""
	Base class of every error raised by conespec.
	"""
	pass


class DomainError(ConeError, ValueError):
	"""
	Raised when a mathematical precondition of an operation is violated.
	"""
	pass


class PositivityViolation(DomainError):
	"""
	Raised when L + (n-2)^2/4 fails to be strictly positive on the section.
	"""

	def __init__(self, mu0, shift):
		self.mu0 = mu0
		self.shift = shift
		super().__init__("angular operator is not strictly positive: "
				"mu0 = {0!r}, mu0 + (n-2)^2/4 = {1!r}".format(mu0, mu0 + shift))


class InadmissiblePair(DomainError):
	"""
	Raised when an exponent pair lies outside the admissible set requested.
	"""
	pass


class NumericalFailure(ConeError, ArithmeticError):
	"""
	Base class for numerical-budget failures.
	"""
	pass


class ConvergenceFailure(NumericalFailure):
	pass


class TailEstimateExceeded(NumericalFailure):
	pass


class QuadratureBudgetExceeded(NumericalFailure):
	pass


class UnresolvedOscillation(NumericalFailure):
	pass


class ShootingNonconvergence(NumericalFailure):
	pass


class IntegratorFailure(NumericalFailure):
	pass


class TruncationMismatch(NumericalFailure):
	pass


class WindowTooShort(NumericalFailure):
	pass


class CoverFailure(NumericalFailure):
	pass


class Inconclusive(NumericalFailure):
	pass


class InvalidConfig(ConeError, ValueError):
	"""
	Raised to indicate that a run configuration is not valid.
	"""
	pass


class CorruptBundle(InvalidConfig):
	"""
	Raised to indicate that a spectrum bundle or kernel grid is not valid.
	"""
	pass


class TailWarning(UserWarning):
	"""
	Issued when a truncated integral or series leaves a visible tail.
	"""
	pass


def exit_code(exc):
	"""
	Returns the process exit code that reports the given exception.
	"""
	if isinstance(exc, InvalidConfig):
		return C.EXIT_USAGE
	if isinstance(exc, DomainError):
		return C.EXIT_DOMAIN
	if isinstance(exc, NumericalFailure):
		return C.EXIT_NUMERICAL
	return C.EXIT_USAGE


def _parse_exponent(value):
	"""
	Internal function.

	Exponents may be written as numbers or as the string "inf".
	"""
	if isinstance(value, str):
		if value.strip().lower() in ("inf", "infinity"):
			return math.inf
		raise InvalidConfig("bad exponent: {0!r}".format(value))
	if not isinstance(value, (int, float)) or isinstance(value, bool):
		raise InvalidConfig("bad exponent: {0!r}".format(value))
	return float(value)


def _check_positive_list(config, key):
	values = config[key]
	if not isinstance(values, list) or not values:
		raise InvalidConfig("{0} must be a non-empty list".format(key))
	for value in values:
		if not isinstance(value, (int, float)) or isinstance(value, bool):
			raise InvalidConfig("{0} holds a non-number: {1!r}".format(
				key, value))


def _is_number(value):
	return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_harmonic(harmonic):
	"""
	Raises InvalidConfig unless harmonic is an [l, m, c] triple with
	|m| <= l.
	"""
	if (not isinstance(harmonic, list) or len(harmonic) != 3
			or not all(_is_number(x) for x in harmonic)):
		raise InvalidConfig("potential harmonics are [l, m, c] triples, not "
				"{0!r}".format(harmonic))
	l, m, _ = harmonic
	if l != int(l) or m != int(m) or l < 0 or abs(m) > l:
		raise InvalidConfig("harmonic {0!r} needs integers with 0 <= |m| <= "
				"l".format(harmonic))


def check_section(section, n):
	"""
	Raises InvalidConfig unless section describes a known cross-section.
	"""
	if not isinstance(section, dict):
		raise InvalidConfig("section must be an object, not "
				"{0!r}".format(section))

	kind = section.get("kind")
	if kind not in C.SECTION_KINDS:
		raise InvalidConfig("unknown section kind {0!r}; known kinds are "
				"{1}".format(kind, ", ".join(C.SECTION_KINDS)))

	if kind == C.ROUND_SPHERE:
		dim = section.get("dim", n - 1)
		if not isinstance(dim, int) or dim < 2:
			raise InvalidConfig("round_sphere needs dim >= 2, not "
					"{0!r}".format(dim))
		if dim != n - 1:
			raise InvalidConfig("round_sphere of dim {0} cannot be the "
					"section of a cone of dimension {1}".format(dim, n))
		if not section.get("radius", 1.0) > 0:
			raise InvalidConfig("round_sphere radius must be positive")

	elif kind == C.GALERKIN_SPHERE2:
		if n != 3:
			raise InvalidConfig("galerkin_sphere2 is the section of a "
					"three-dimensional cone, not n={0}".format(n))
		degree = section.get("max_degree", C.GALERKIN_DEGREE)
		if not isinstance(degree, int) or degree < 1:
			raise InvalidConfig("bad max_degree: {0!r}".format(degree))
		magnetic = section.get("magnetic", {"kind": C.MAGNETIC_NONE})
		if not isinstance(magnetic, dict):
			raise InvalidConfig("magnetic must be an object, not "
					"{0!r}".format(magnetic))
		if magnetic.get("kind") not in (C.MAGNETIC_NONE,
				C.MAGNETIC_ROTATIONAL, C.MAGNETIC_GRADIENT):
			raise InvalidConfig("unknown magnetic kind {0!r}".format(
				magnetic.get("kind")))
		potential = section.get("a", 0.0)
		if isinstance(potential, dict):
			harmonics = potential.get("harmonics", [])
			if not isinstance(harmonics, list):
				raise InvalidConfig("potential harmonics must be a list, not "
						"{0!r}".format(harmonics))
			for harmonic in harmonics:
				_check_harmonic(harmonic)

	elif kind == C.FLAT_TORUS:
		if n != 3:
			raise InvalidConfig("flat_torus is the section of a "
					"three-dimensional cone, not n={0}".format(n))
		radii = section.get("radii")
		if (not isinstance(radii, list) or len(radii) != 2
				or min(radii) <= 0):
			raise InvalidConfig("flat_torus needs two positive radii, not "
					"{0!r}".format(radii))
		flux = section.get("flux", [0.0, 0.0])
		if (not isinstance(flux, list) or len(flux) != 2
				or not all(_is_number(f) for f in flux)):
			raise InvalidConfig("flat_torus needs two flux numbers, not "
					"{0!r}".format(flux))

	elif kind == C.SPHEROID:
		if (not section.get("equatorial", 0) > 0
				or not section.get("polar", 0) > 0):
			raise InvalidConfig("spheroid needs positive equatorial and "
					"polar semi-axes")


def check_config(config):
	"""
	Returns config with every default filled in, if it is a valid run
	configuration.

	Raises InvalidConfig if any problems are detected.
	"""
	if not isinstance(config, dict):
		raise InvalidConfig("config must be a JSON object, not "
				"{0!r}".format(config))

	unknown = set(config) - set(C.DEFAULTS) - set(C.NON_SEMANTIC_KEYS)
	if unknown:
		raise InvalidConfig("unknown config keys: {0}".format(
			", ".join(sorted(unknown))))

	res = copy.deepcopy(C.DEFAULTS)
	res.update(copy.deepcopy(config))

	tolerances = dict(C.DEFAULT_TOLERANCES)
	tolerances.update(config.get("tolerances", {}))
	for key, value in tolerances.items():
		if key not in C.DEFAULT_TOLERANCES:
			raise InvalidConfig("unknown tolerance {0!r}".format(key))
		if not isinstance(value, (int, float)) or not value > 0:
			raise InvalidConfig("tolerance {0} must be positive, not "
					"{1!r}".format(key, value))
	res["tolerances"] = tolerances

	n = res["n"]
	if not isinstance(n, int) or n < 3:
		raise InvalidConfig("cone dimension n must be an integer >= 3, not "
				"{0!r}".format(n))

	check_section(res["section"], n)

	if not isinstance(res["count"], int) or res["count"] < 1:
		raise InvalidConfig("count must be a positive integer")

	for key in ("lambdas", "radii", "times", "epsilons", "exponents"):
		_check_positive_list(res, key)
		if min(res[key]) <= 0:
			raise InvalidConfig("{0} must all be positive".format(key))
	_check_positive_list(res, "angles")
	_check_positive_list(res, "offsets")

	pairs = []
	for item in res["pairs"]:
		if not isinstance(item, list) or len(item) != 3:
			raise InvalidConfig("pairs hold [q, p, s] triples, not "
					"{0!r}".format(item))
		q, p = _parse_exponent(item[0]), _parse_exponent(item[1])
		if not 2 <= q <= math.inf or not 2 <= p <= math.inf:
			raise InvalidConfig("exponents must lie in [2, inf]: "
					"{0!r}".format(item))
		pairs.append((q, p, float(item[2])))
	res["pair_values"] = pairs

	for key in ("band", "ensemble", "seed"):
		if not isinstance(res[key], int):
			raise InvalidConfig("{0} must be an integer".format(key))

	if not res["window"] > 0:
		raise InvalidConfig("window must be positive")

	return res
