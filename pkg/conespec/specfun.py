# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Real-order Bessel and Hankel functions.

Every other module evaluates J_nu through bessel_j, so the branch choice made
here decides the accuracy of the whole package:

  - r <= C.SERIES_RADIUS: the power series, summed term by term through the
    ratio of consecutive terms.
  - r > C.SERIES_RADIUS and r >= nu: the phase form
    J_nu(r) = r^(-1/2) (e^(ir) j+ + e^(-ir) j-), with j+ and j- read off the
    exponentially scaled Hankel functions.
  - r > C.SERIES_RADIUS and r < nu: inside the turning point the phase form
    cancels two huge numbers, and the series cancels for r near nu, so the
    value comes from scipy's uniform large-order expansion.
"""
import logging
from collections import defaultdict
from math import factorial

import numpy as np
from scipy import special

from conespec import constants as C
from conespec.util import Record
from conespec.validate import DomainError


log = logging.getLogger(__name__)


class BesselEval(Record):
	"""
	One evaluation of J_nu(r), tagged with the branch that produced it.
	"""

	__slots__ = [
			'order',
			'argument',
			'value',
			'method',
		]

	def __init__(self, order, argument, value, method):
		assert order >= 0
		assert argument >= 0
		assert method in (C.METHOD_SERIES, C.METHOD_ASYMPTOTIC,
				C.METHOD_UNIFORM)

		self.order = float(order)
		self.argument = float(argument)
		self.value = float(value)
		self.method = method


class PhaseDecomposition(Record):
	"""
	The pair (j+, j-) with J_nu(r) = r^(-1/2) (e^(ir) j+ + e^(-ir) j-).
	"""

	__slots__ = [
			'order',
			'argument',
			'j_plus',
			'j_minus',
		]

	def __init__(self, order, argument, j_plus, j_minus):
		assert order >= 0
		assert argument >= 1

		self.order = float(order)
		self.argument = float(argument)
		self.j_plus = complex(j_plus)
		self.j_minus = complex(j_minus)

	def reconstruct(self):
		"""
		Returns J_nu(r) rebuilt from the two phase amplitudes.
		"""
		r = self.argument
		total = (np.exp(1j * r) * self.j_plus
				+ np.exp(-1j * r) * self.j_minus) / np.sqrt(r)
		return total.real


def _check_order(nu):
	if np.any(np.asarray(nu) < 0):
		raise DomainError("Bessel order must be nonnegative, not "
				"{0!r}".format(nu))


def _check_argument(r):
	if np.any(np.asarray(r) < 0):
		raise DomainError("Bessel argument must be nonnegative, not "
				"{0!r}".format(r))


def _series(nu, r):
	"""
	Internal function.

	Sums the power series of J_nu over arrays of equal shape.
	"""
	half = 0.5 * r
	with np.errstate(divide='ignore'):
		logHalf = np.log(half)

	# Leading term (r/2)^nu / Gamma(nu + 1), in logs so large orders underflow
	# quietly instead of overflowing the gamma function.
	term = np.where(
			half > 0,
			np.exp(nu * np.where(half > 0, logHalf, 0.0)
				- special.gammaln(nu + 1.0)),
			np.where(nu == 0, 1.0, 0.0),
		)
	res = term.copy()
	square = -half * half
	for k in range(1, C.SERIES_TERMS):
		term = term * square / (k * (k + nu))
		res += term

	return res


def _phase_form(nu, r):
	return (np.exp(1j * r) * special.hankel1e(nu, r)).real


def bessel_method(nu, r):
	"""
	Returns the branch bessel_j uses at (nu, r).
	"""
	if r <= C.SERIES_RADIUS:
		return C.METHOD_SERIES
	if r < nu:
		return C.METHOD_UNIFORM
	return C.METHOD_ASYMPTOTIC


def bessel_j(nu, r):
	"""
	Returns J_nu(r) for nu >= 0 and r >= 0.

	Both arguments broadcast against each other; scalars in give a float out.
	"""
	_check_order(nu)
	_check_argument(r)

	scalar = np.ndim(nu) == 0 and np.ndim(r) == 0
	nu, r = np.broadcast_arrays(
			np.asarray(nu, dtype=float), np.asarray(r, dtype=float))
	res = np.empty(r.shape)

	small = r <= C.SERIES_RADIUS
	outside = ~small & (r >= nu)
	inside = ~small & ~outside

	if np.any(small):
		res[small] = _series(nu[small], r[small])
	if np.any(outside):
		res[outside] = _phase_form(nu[outside], r[outside])
	if np.any(inside):
		res[inside] = special.jv(nu[inside], r[inside])

	if scalar:
		return float(res)
	return res


def bessel_eval(nu, r):
	"""
	Returns a BesselEval record for scalar nu and r.
	"""
	return BesselEval(nu, r, bessel_j(nu, r), bessel_method(nu, r))


def bessel_j_derivative(nu, r, m=1):
	"""
	Returns the m-th derivative of J_nu at r.

	The derivative is expanded into terms coef * r^-p * J_(nu+j)(r) by
	repeatedly applying d/dr (r^-mu J_mu) = -r^-mu J_(mu+1). At r = 0 the
	power series is differentiated directly; that raises DomainError when a
	term of the series has a non-integer exponent below m, since the
	derivative blows up there.
	"""
	_check_order(nu)
	_check_argument(r)
	if not isinstance(m, (int, np.integer)) or m < 0:
		raise DomainError("derivative order must be a nonnegative integer, "
				"not {0!r}".format(m))

	nu = float(nu)
	if m == 0:
		return bessel_j(nu, r)

	# Keyed by (power of 1/r, order offset).
	terms = {(0, 0): 1.0}
	for _ in range(m):
		stepped = defaultdict(float)
		for (p, j), coef in terms.items():
			mu = nu + j
			# d/dr (r^-p J_mu) = (mu - p) r^(-p-1) J_mu - r^-p J_(mu+1)
			if mu != p:
				stepped[(p + 1, j)] += (mu - p) * coef
			stepped[(p, j + 1)] -= coef
		terms = {key: coef for key, coef in stepped.items() if coef != 0}

	scalar = np.ndim(r) == 0
	r = np.atleast_1d(np.asarray(r, dtype=float))
	res = np.zeros(r.shape)

	positive = r > 0
	if np.any(positive):
		rp = r[positive]
		for (p, j), coef in terms.items():
			res[positive] += coef * rp ** (-p) * bessel_j(nu + j, rp)

	if not np.all(positive):
		res[~positive] = _derivative_at_origin(nu, m)

	if scalar:
		return float(res[0])
	return res


def _derivative_at_origin(nu, m):
	"""
	Internal function.

	Only the series term (r/2)^(2k+nu) with 2k + nu = m survives m
	derivatives at the origin.
	"""
	res = 0.0
	k = 0
	while 2 * k + nu <= m + 1e-12:
		exponent = 2 * k + nu
		nearest = round(exponent)
		isInteger = abs(exponent - nearest) < 1e-12
		if not isInteger:
			raise DomainError("derivative of order {0} of J_{1} is unbounded "
					"at r = 0".format(m, nu))
		if nearest == m:
			res += ((-1) ** k * factorial(m)
					/ (2.0 ** m * factorial(k)
						* np.exp(special.gammaln(k + nu + 1))))
		k += 1
	return res


def phase_decompose(nu, r):
	"""
	Returns the PhaseDecomposition of J_nu at r >= 1.

	j+ = sqrt(r) H1_nu(r) e^(-ir) / 2 and j- = sqrt(r) H2_nu(r) e^(ir) / 2,
	so the reconstruction is the identity J = (H1 + H2) / 2.
	"""
	_check_order(nu)
	if r < 1:
		raise DomainError("phase decomposition needs r >= 1, not "
				"{0!r}".format(r))

	root = np.sqrt(r)
	return PhaseDecomposition(
			nu, r,
			0.5 * root * special.hankel1e(nu, r),
			0.5 * root * special.hankel2e(nu, r),
		)


def hankel0_plus(y):
	"""
	Returns the outgoing Hankel function of order zero, H0+(y) = H1_0(y).

	Raises DomainError at y <= 0, where it has a logarithmic singularity.
	"""
	if np.any(np.asarray(y) <= 0):
		raise DomainError("H0+ is singular at y = 0; got {0!r}".format(y))
	res = special.hankel1(0, y)
	if np.ndim(res) == 0:
		return complex(res)
	return res


def hankel0_minus(y):
	"""
	Returns the incoming Hankel function of order zero, the conjugate of H0+.
	"""
	return np.conj(hankel0_plus(y))


def bessel_bound(nu, r):
	"""
	Returns the small-argument bound |J_nu(r)| <= (r/2)^nu / Gamma(nu + 1).

	Mode sums use it to bound the first level they leave out.
	"""
	_check_order(nu)
	_check_argument(r)
	nu = np.asarray(nu, dtype=float)
	r = np.asarray(r, dtype=float)
	with np.errstate(divide='ignore', invalid='ignore'):
		logBound = nu * np.log(0.5 * r) - special.gammaln(nu + 1.0)
	res = np.where(nu == 0, 1.0, np.minimum(np.exp(logBound), 1.0))
	if np.ndim(res) == 0:
		return float(res)
	return res
