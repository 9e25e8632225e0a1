# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The spectral measure dE(lambda; x, y) of sqrt(L), and the resolvent.

The measure is evaluated two ways: as a Bessel series over the angular
levels, and in the Cheeger-Taylor form where the level sum is folded into
the angular kernels cos(s sqrt(P)) and sin(pi sqrt(P)) e^(-s sqrt(P)),
integrated in s against J0 of the chord lengths. Per level both rest on

	J_nu(a) J_nu(b) = (1/pi) integral_0^pi J0(|m_s|) cos(nu s) ds
		- (sin(nu pi)/pi) integral_0^inf J0(|n_s|) e^(-nu s) ds

so with one shared truncation the two agree up to s-quadrature error.
"""
import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from conespec import constants as C
from conespec.crosssection import mode_cutoff, sufficient_levels
from conespec.geometry import chord_distance, poisson_distance
from conespec.propagator import radius_of
from conespec.specfun import bessel_bound, bessel_j, hankel0_minus, hankel0_plus
from conespec.util import (
		Record,
		gauss_legendre_panels,
		loglog_slope,
		lp_bump,
		panel_count,
	)
from conespec.validate import (
		DomainError,
		QuadratureBudgetExceeded,
		TruncationMismatch,
	)


log = logging.getLogger(__name__)


class SpectralMeasureSample(Record):
	"""
	One value of dE(lambda; x, y).

	representation is C.BESSEL_SERIES or C.CHEEGER_TAYLOR; tail bounds the
	levels the evaluation left out.
	"""

	__slots__ = [
			'lam',
			'x',
			'y',
			'value',
			'representation',
			'tail',
		]

	def __init__(self, lam, x, y, value, representation, tail=0.0):
		assert lam > 0
		assert representation in (C.BESSEL_SERIES, C.CHEEGER_TAYLOR)

		self.lam = float(lam)
		self.x = x
		self.y = y
		self.value = complex(value)
		self.representation = representation
		self.tail = float(tail)

	def __eq__(self, other):
		return (isinstance(other, SpectralMeasureSample)
				and self.lam == other.lam
				and self.value == other.value
				and self.representation == other.representation
				and np.array_equal(self.x[1], other.x[1])
				and np.array_equal(self.y[1], other.y[1])
				and self.x[0] == other.x[0] and self.y[0] == other.y[0])

	def row(self, section):
		"""
		Returns the CSV row (lambda, r1, r2, angular distance, re, im, tag).
		"""
		angle = float(section.distance(self.x[1], self.y[1]))
		return (self.lam, self.x[0], self.y[0], angle, self.value.real,
				self.value.imag, self.representation)


def _check_lambda(lam):
	if not lam > 0:
		raise DomainError("spectral parameter must be positive, not "
				"{0!r}".format(lam))


def _prefactor(n, r1, r2):
	return (r1 * r2) ** (-(n - 2) / 2.0)


def _measure_levels(spectrum, lam, r1, r2, tolerance, nu_max=None):
	"""
	Internal function.

	Returns (table, tail) for the Bessel series at lam: levels up to the
	cutoff for the smaller radius, grown until the next one is negligible.
	"""
	prefactor = lam * _prefactor(spectrum.n, r1, r2)

	def bound(nu):
		return (prefactor * bessel_bound(nu, lam * r1)
				* bessel_bound(nu, lam * r2))

	if nu_max is None:
		nu_max = mode_cutoff(lam, min(r1, r2))
	return sufficient_levels(spectrum, nu_max, bound, tolerance)


def spectral_measure_bessel(spectrum, lam, x, y, tolerance=None):
	"""
	Returns the SpectralMeasureSample

		lambda (r1 r2)^(-(n-2)/2) sum over levels P(x^, y^)
			J_nu(lambda r1) J_nu(lambda r2)

	Raises TailEstimateExceeded when the computed modes cannot bring the
	omitted levels under tolerance.
	"""
	_check_lambda(lam)
	r1, r2 = radius_of(x), radius_of(y)
	table, tail = _measure_levels(spectrum, lam, r1, r2, tolerance)
	products = spectrum.level_products(x[1], y[1], table)
	series = bessel_j(table.nu, lam * r1) * bessel_j(table.nu, lam * r2)
	value = lam * _prefactor(spectrum.n, r1, r2) * (products @ series)
	return SpectralMeasureSample(lam, x, y, value, C.BESSEL_SERIES, tail)


def cubic_rule(length, rate, budget=C.CT_NODE_BUDGET):
	"""
	Returns (s, w) on [0, length] under s = length * u^3, with Gauss-Legendre
	panels in u fine enough for an integrand oscillating at rate in s.

	Raises QuadratureBudgetExceeded past budget nodes.
	"""
	panels = panel_count(1.0, 3.0 * length * rate, minimum=4)
	count = panels * C.PANEL_ORDER
	if count > budget:
		raise QuadratureBudgetExceeded("s-quadrature needs {0} nodes, budget "
				"is {1}".format(count, budget))
	u, w = gauss_legendre_panels(np.linspace(0.0, 1.0, panels + 1))
	return length * u ** 3, 3.0 * length * u * u * w


@lru_cache(maxsize=8192)
def _poisson_tail(lam, r1, r2, nu):
	"""
	Internal function.

	Returns integral over s > C.POISSON_SPLIT of H0+(lambda |n_s|) e^(-nu s),
	through u = |n_s| and Fourier-weighted quadrature on [u1, inf). The real
	part is the J0 integral; the H0- integral is the conjugate.
	"""
	start = poisson_distance(r1, r2, C.POISSON_SPLIT)

	def scaled(u):
		s = math.acosh((u * u - r1 * r1 - r2 * r2) / (2.0 * r1 * r2))
		return (special.hankel1e(0, lam * u) * math.exp(-nu * s) * u
				/ (r1 * r2 * math.sinh(s)))

	def real(u):
		return scaled(u).real

	def imag(u):
		return scaled(u).imag

	cc, _ = integrate.quad(real, start, np.inf, weight='cos', wvar=lam)
	sc, _ = integrate.quad(real, start, np.inf, weight='sin', wvar=lam)
	ci, _ = integrate.quad(imag, start, np.inf, weight='cos', wvar=lam)
	si, _ = integrate.quad(imag, start, np.inf, weight='sin', wvar=lam)
	return complex(cc - si, ci + sc)


def _tail_terms(lam, r1, r2, nu, weights, tolerance, part):
	"""
	Internal function.

	Returns sum over levels of weights * part(tail integral), skipping the
	levels whose tail e^(-nu s1)/nu is already below tolerance.
	"""
	total = 0j
	key = (round(lam, 14), round(r1, 14), round(r2, 14))
	for value, weight in zip(nu, weights):
		if weight == 0:
			continue
		if math.exp(-value * C.POISSON_SPLIT) / value < tolerance:
			continue
		total += weight * part(_poisson_tail(*key, round(float(value), 14)))
	return total


def _angular_kernels(spectrum, table, x, y):
	products = spectrum.level_products(x[1], y[1], table)
	nu = table.nu
	return nu, products, np.sin(np.pi * nu) * products


def _ct_integrals(spectrum, table, lam, x, y, circle_fn, poisson_fn, budget):
	"""
	Internal function.

	Returns (circle, poisson, tail weights): the s-integrals of the two
	branches for the radial functions circle_fn(|m_s|) and
	poisson_fn(|n_s|), before the Fourier-weighted Poisson tail.
	"""
	r1, r2 = x[0], y[0]
	nu, products, sines = _angular_kernels(spectrum, table, x, y)
	top = float(nu.max()) if len(nu) else 0.0

	s, w = cubic_rule(math.pi, top + lam * (r1 + r2), budget)
	cosines = np.cos(np.outer(s, nu)) @ products
	circle = np.sum(w * circle_fn(lam * chord_distance(r1, r2, s)) * cosines)

	rate = top + lam * math.sqrt(0.5 * r1 * r2) * math.exp(0.5 * C.POISSON_SPLIT)
	s, w = cubic_rule(C.POISSON_SPLIT, rate, budget)
	poisson = np.exp(-np.outer(s, nu)) @ sines
	near = np.sum(w * poisson_fn(lam * poisson_distance(r1, r2, s)) * poisson)

	log.debug("Cheeger-Taylor: lambda %.4g, %d levels up to nu %.4g",
			lam, len(table), top)
	return circle / math.pi, near, sines


def spectral_measure_ct(spectrum, lam, x, y, tolerance=None, cutoffs=None,
		budget=C.CT_NODE_BUDGET):
	"""
	Returns the SpectralMeasureSample in the Cheeger-Taylor form

		lambda (r1 r2)^(-(n-2)/2) [ (1/pi) integral_0^pi J0(lambda |m_s|)
			cos(s sqrt(P)) ds - (1/pi) integral_0^inf J0(lambda |n_s|)
			sin(pi sqrt(P)) e^(-s sqrt(P)) ds ]

	Both branches share one level table. cutoffs, a pair of largest orders
	for the cosine and the Poisson branch, raises TruncationMismatch unless
	the two select the same levels.
	"""
	_check_lambda(lam)
	r1, r2 = radius_of(x), radius_of(y)
	if tolerance is None:
		tolerance = C.DEFAULT_TOLERANCES["tail"]

	if cutoffs is not None:
		circleTable, _ = _measure_levels(spectrum, lam, r1, r2, tolerance,
				cutoffs[0])
		poissonTable, _ = _measure_levels(spectrum, lam, r1, r2, tolerance,
				cutoffs[1])
		if len(circleTable) != len(poissonTable):
			raise TruncationMismatch("cosine branch keeps {0} levels, Poisson "
					"branch {1}".format(len(circleTable), len(poissonTable)))
	table, tail = _measure_levels(spectrum, lam, r1, r2, tolerance,
			None if cutoffs is None else cutoffs[0])

	circle, near, sines = _ct_integrals(spectrum, table, lam, x, y,
			special.j0, special.j0, budget)
	far = _tail_terms(lam, r1, r2, table.nu, sines, tolerance,
			lambda value: value.real)
	value = lam * _prefactor(spectrum.n, r1, r2) * (
			circle - (near + far) / math.pi)
	return SpectralMeasureSample(lam, x, y, value, C.CHEEGER_TAYLOR, tail)


def resolvent_kernel(spectrum, lam, sign, x, y, tolerance=None,
		budget=C.CT_NODE_BUDGET):
	"""
	Returns the kernel of (L - (lambda +- i0)^2)^-1 at (x, y), sign = +1 for
	the outgoing and -1 for the incoming resolvent:

		(+-i pi/2) (r1 r2)^(-(n-2)/2) [ (1/pi) integral_0^pi H0+-(lambda |m_s|)
			cos(s sqrt(P)) ds - (1/pi) integral_0^inf H0+-(lambda |n_s|)
			sin(pi sqrt(P)) e^(-s sqrt(P)) ds ]

	Needs r1 != r2: per level the bracket is J_nu(lambda r<) H_nu(lambda r>),
	whose terms fall off like (r< / r>)^nu.
	"""
	_check_lambda(lam)
	if sign not in (1, -1):
		raise DomainError("resolvent sign must be +1 or -1")
	r1, r2 = radius_of(x), radius_of(y)
	if r1 == r2:
		raise DomainError("the resolvent series needs r1 != r2")
	if tolerance is None:
		tolerance = C.DEFAULT_TOLERANCES["tail"]

	ratio = min(r1, r2) / max(r1, r2)
	prefactor = 0.5 * math.pi * _prefactor(spectrum.n, r1, r2)

	def bound(nu):
		return prefactor * ratio ** nu / (math.pi * max(nu, 1.0))

	start = max(mode_cutoff(lam, min(r1, r2)),
			math.log(tolerance) / math.log(ratio))
	table, _ = sufficient_levels(spectrum, start, bound, tolerance)

	hankel = hankel0_plus if sign > 0 else hankel0_minus
	circle, near, sines = _ct_integrals(spectrum, table, lam, x, y, hankel,
			hankel, budget)
	far = _tail_terms(lam, r1, r2, table.nu, sines, tolerance,
			lambda value: value if sign > 0 else value.conjugate())
	value = sign * 0.5j * math.pi * _prefactor(spectrum.n, r1, r2) * (
			circle - (near + far) / math.pi)
	return complex(value)


def free_spectral_measure(lam, distance):
	"""
	Returns the free spectral measure lambda sin(lambda D) / (2 pi^2 D) of
	sqrt(-Laplacian) in R^3.
	"""
	_check_lambda(lam)
	if distance == 0:
		return lam * lam / (2.0 * math.pi ** 2)
	return lam * math.sin(lam * distance) / (2.0 * math.pi ** 2 * distance)


def free_resolvent(lam, distance, sign=1):
	"""
	Returns the free resolvent e^(+-i lambda D) / (4 pi D) in R^3.
	"""
	_check_lambda(lam)
	if not distance > 0:
		raise DomainError("the free resolvent is singular at D = 0")
	return complex(np.exp(sign * 1j * lam * distance)
			/ (4.0 * math.pi * distance))


def stone_check(spectrum, lam, pairs, tolerance=None):
	"""
	Returns a report comparing (lambda / (pi i)) (R+ - R-) with the
	Cheeger-Taylor spectral measure at each (x, y) in pairs.
	"""
	if tolerance is None:
		tolerance = C.DEFAULT_TOLERANCES["crosscheck"]

	rows = []
	for x, y in pairs:
		plus = resolvent_kernel(spectrum, lam, 1, x, y)
		minus = resolvent_kernel(spectrum, lam, -1, x, y)
		stone = lam / (math.pi * 1j) * (plus - minus)
		measure = spectral_measure_ct(spectrum, lam, x, y).value
		gap = abs(stone - measure) / max(abs(measure), 1e-300)
		rows.append({
				"r1": x[0],
				"r2": y[0],
				"angle": float(spectrum.section.distance(x[1], y[1])),
				"stone": [stone.real, stone.imag],
				"measure": [measure.real, measure.imag],
				"gap": gap,
			})
		log.debug("stone check at r1=%g r2=%g: gap %.3g", x[0], y[0], gap)

	worst = max(row["gap"] for row in rows) if rows else 0.0
	return {
			"lambda": lam,
			"rows": rows,
			"max_gap": worst,
			"tolerance": tolerance,
			"pass": worst <= tolerance,
		}


def low_frequency_profile(spectrum, lams, x, y, tolerance=0.05):
	"""
	Returns a report on the exponent of |dE| / lambda^(n-1) as a power of
	lambda^2 r1 r2 over the small lams; it should approach
	nu0 - (n-2)/2.
	"""
	r1, r2 = radius_of(x), radius_of(y)
	lams = np.asarray(lams, dtype=float)
	values = np.array([
			abs(spectral_measure_bessel(spectrum, lam, x, y).value)
			for lam in lams
		])
	scaled = values / lams ** (spectrum.n - 1)
	slope, residual = loglog_slope(lams * lams * r1 * r2, scaled)
	target = spectrum.nu0 - (spectrum.n - 2) / 2.0
	return {
			"lambdas": lams.tolist(),
			"scaled": scaled.tolist(),
			"exponent": slope,
			"residual": residual,
			"target": target,
			"pass": abs(slope - target) <= tolerance,
		}


def oscillatory_w(t, v, k=0):
	"""
	Returns W(t, v) = 2 pi integral phi(2^-k lambda) e^(it lambda)
	J0(lambda v) lambda d lambda, the angular average of the band-k plane
	wave integral over R^2.
	"""
	if v < 0:
		raise DomainError("W needs a length v >= 0")
	lo, hi = 2.0 ** (k - 1), 2.0 ** (k + 1)
	panels = panel_count(hi - lo, abs(t) + v + 1.0, minimum=4)
	lam, w = gauss_legendre_panels(np.linspace(lo, hi, panels + 1))
	integrand = (lp_bump(lam * 2.0 ** (-k)) * np.exp(1j * t * lam)
			* special.j0(lam * v) * lam)
	return complex(2.0 * math.pi * np.sum(w * integrand))


def w_envelope(ts, vs, k=0, N=2):
	"""
	Returns the empirical constant max |W(t, v)| (1 + |t - v|)^N (1 + v)^(1/2)
	over the (t, v) grid.
	"""
	worst = 0.0
	for t in ts:
		for v in vs:
			value = abs(oscillatory_w(t, v, k))
			worst = max(worst, value * (1.0 + abs(t - v)) ** N
					* math.sqrt(1.0 + v))
	return worst
