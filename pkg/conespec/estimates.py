# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Experiments on the dispersive and Strichartz estimates of the cone.
"""
import logging
import math
from fractions import Fraction

import numpy as np

from conespec import constants as C
from conespec.propagator import (
		evolve_wave,
		from_spectral,
		halfwave_band_kernel,
		sobolev_norm,
	)
from conespec.specfun import bessel_j
from conespec.util import (
		Record,
		gauss_legendre_panels,
		loglog_slope,
		lp_bump,
		panel_count,
		unit_bump,
	)
from conespec.validate import (
		DomainError,
		InadmissiblePair,
		WindowTooShort,
	)


log = logging.getLogger(__name__)


def _exact(value):
	return Fraction(value).limit_denominator(10 ** 9)


def _reciprocal(exponent):
	if math.isinf(exponent):
		return Fraction(0)
	return 1 / Fraction(exponent)


def _alpha(nu0, n):
	if not nu0 > 0:
		raise DomainError("nu0 must be positive, not {0!r}".format(nu0))
	return _exact(nu0) - Fraction(n - 2, 2)


def alpha_and_palpha(nu0, n):
	"""
	Returns (alpha, p(alpha)) with alpha = nu0 - (n-2)/2, and p(alpha) = inf
	when alpha >= 0 and n/|alpha| otherwise.
	"""
	alpha = _alpha(nu0, n)
	if alpha >= 0:
		return float(alpha), math.inf
	return float(alpha), float(n / -alpha)


class AdmissiblePair(Record):
	"""
	An exponent pair (q, p) with the s it realizes, s = n(1/2 - 1/p) - 1/q,
	and its membership in Lambda_s and Lambda_{s,alpha}.
	"""

	__slots__ = [
			'q',
			'p',
			's',
			'in_lambda_s',
			'in_lambda_s_alpha',
		]

	def __init__(self, q, p, s, in_lambda_s, in_lambda_s_alpha):
		assert q >= 2 and p >= 2
		assert in_lambda_s or not in_lambda_s_alpha

		self.q = q
		self.p = p
		self.s = s
		self.in_lambda_s = in_lambda_s
		self.in_lambda_s_alpha = in_lambda_s_alpha


def check_alpha_agreement(pair, nu0, realized=None):
	"""
	Raises InadmissiblePair when pair sits in Lambda_s but not in
	Lambda_{s,alpha} although its s is below 1/2 + nu0, where the two sets
	coincide. realized is the exact s, read off pair.s by default.
	"""
	if realized is None:
		realized = _exact(pair.s)
	if (pair.in_lambda_s and not pair.in_lambda_s_alpha
			and realized < Fraction(1, 2) + _exact(nu0)):
		raise InadmissiblePair("(q, p) = ({0}, {1}) with s = {2:.4g} < 1/2 + "
				"nu0 left Lambda_s,alpha for nu0 = {3:.4g}".format(pair.q,
					pair.p, float(pair.s), float(nu0)))


def classify_pair(n, q, p, nu0, s=None):
	"""
	Returns the AdmissiblePair for (q, p), with exact rational arithmetic.

	(q, p) belongs to Lambda_s when 2/q <= (n-1)(1/2 - 1/p), it is not the
	endpoint (2, inf) in dimension 3, and s is the value it realizes; s=None
	takes the realized value. Lambda_{s,alpha} further needs p < p(alpha).
	"""
	if n < 3:
		raise DomainError("cones have dimension n >= 3, not {0}".format(n))
	invQ, invP = _reciprocal(q), _reciprocal(p)
	if not (0 <= invQ <= Fraction(1, 2) and 0 <= invP <= Fraction(1, 2)):
		raise DomainError("exponents must lie in [2, inf], got q={0}, "
				"p={1}".format(q, p))

	half = Fraction(1, 2)
	realized = n * (half - invP) - invQ
	inLambda = (2 * invQ <= (n - 1) * (half - invP)
			and not (n == 3 and invQ == half and invP == 0))
	if s is not None:
		inLambda = inLambda and _exact(s) == realized

	alpha = _alpha(nu0, n)
	below = alpha >= 0 or invP > -alpha / n
	inAlpha = inLambda and below

	pair = AdmissiblePair(q, p, float(realized), inLambda, inAlpha)
	check_alpha_agreement(pair, nu0, realized)
	return pair


def admissible_set(n, s, nu0, lattice):
	"""
	Returns the AdmissiblePair of every (q, p) in lattice.

	With s=None each pair is judged against the s it realizes.
	"""
	return [classify_pair(n, q, p, nu0, s) for q, p in lattice]


def require_admissible(n, q, p, s, nu0):
	"""
	Raises InadmissiblePair unless (q, p) is in Lambda_{s,alpha(nu0)}.
	"""
	pair = classify_pair(n, q, p, nu0, s)
	if not pair.in_lambda_s_alpha:
		raise InadmissiblePair("(q, p) = ({0}, {1}) is not in Lambda_{2}"
				" for nu0 = {3:.4g}".format(q, p, s, nu0))
	return pair


class DecayFitReport(Record):
	"""
	Outcome of a dispersive decay fit for one band.

	sups[i] is the largest kernel modulus over the (x, y) sample set at
	times[i]; slope and residual are the least-squares log-log fit over the
	asymptotic window and refined_slope the same fit on the doubled sample
	set, or None.
	"""

	__slots__ = [
			'band',
			'times',
			'sups',
			'slope',
			'residual',
			'target',
			'tolerance',
			'passed',
			'refined_slope',
			'flagged',
			'calibration',
		]

	def __init__(self, band, times, sups, slope, residual, target, tolerance,
			refined_slope=None, refine_tolerance=None, calibration=None):
		assert len(times) == len(sups)

		self.band = band
		self.times = list(times)
		self.sups = list(sups)
		self.slope = slope
		self.residual = residual
		self.target = target
		self.tolerance = tolerance
		self.passed = abs(slope - target) <= tolerance
		self.refined_slope = refined_slope
		self.flagged = (refined_slope is not None
				and abs(refined_slope - slope) > refine_tolerance)
		self.calibration = calibration

	def to_dict(self):
		return {name: getattr(self, name) for name in self.__slots__}


def light_cone_pairs(spectrum, radii, offsets, t):
	"""
	Returns the (x, y) sample set at time t: both points over the section's
	base point, with |x - y| = r2 - r1 = t + offset.
	"""
	base = spectrum.section.base_point()
	res = []
	for r1 in radii:
		for offset in offsets:
			r2 = r1 + abs(t) + offset
			if r2 > 0:
				res.append(((r1, base), (r2, base)))
	return res


def _refine(values):
	values = sorted(values)
	middles = [0.5 * (a + b) for a, b in zip(values, values[1:])]
	return sorted(values + middles)


def _sup_kernel(spectrum, k, t, pairs, patch, executor):
	def evaluate(pair):
		x, y = pair
		value = abs(halfwave_band_kernel(spectrum, k, t, x, y))
		if patch is not None:
			index, parts = patch
			value *= abs(parts.weight(index, np.array([x[1]]))[0]
					* parts.weight(index, np.array([y[1]]))[0])
		return value

	mapper = executor.map if executor is not None else map
	return max(mapper(evaluate, pairs))


def decay_fit(spectrum, k, times, radii, offsets, patch=None, tolerance=None,
		refine=True, executor=None):
	"""
	Returns the DecayFitReport for band k: the sup of |Q_j phi(2^-k sqrt(L))
	e^(it sqrt(L)) Q_j| over light-cone sample pairs, fitted against t over
	t >= 4 / 2^k.

	patch, when given, is (j, Microlocalizers). Raises WindowTooShort unless
	the fitted times span a decade.
	"""
	tolerances = dict(C.DEFAULT_TOLERANCES)
	tolerances.update(tolerance or {})

	times = sorted(float(t) for t in times)
	window = [t for t in times if t >= 4.0 / 2 ** k]
	if len(window) < 2 or window[-1] < 10.0 * window[0]:
		raise WindowTooShort("decay fit needs t spanning a decade beyond "
				"{0:.4g}, got {1}".format(4.0 / 2 ** k, window))

	def sweep(radiusList, offsetList):
		return [
				_sup_kernel(spectrum, k, t,
					light_cone_pairs(spectrum, radiusList, offsetList, t),
					patch, executor)
				for t in window
			]

	sups = sweep(radii, offsets)
	slope, residual = loglog_slope(window, sups)
	log.info("decay fit band %d: slope %.4f over t in [%g, %g]", k, slope,
			window[0], window[-1])

	refined = None
	if refine:
		refined, _ = loglog_slope(window, sweep(_refine(radii),
				_refine(offsets)))

	calibration = _sup_kernel(spectrum, k, 0.0,
			light_cone_pairs(spectrum, radii, offsets, 0.0), patch,
			executor) / 2.0 ** (k * spectrum.n)

	return DecayFitReport(k, window, sups, slope, residual,
			-(spectrum.n - 1) / 2.0, tolerances["decay_slope"], refined,
			tolerances["decay_refine"], calibration)


def small_radius_profile(spectrum, k, radii, times, growth=2.0):
	"""
	Returns a report on the weighted sup

		|phi(2^-k sqrt(L)) e^(it sqrt(L))(x, y)| / (2^(2k) r1 r2)^(nu0 - (n-2)/2)

	over pairs of small radii at each t, with the t = 0 calibration
	sup |K| / 2^(kn). The weighted values stay flat in the radii; the report
	is flagged when they vary by more than growth at some t.
	"""
	exponent = spectrum.nu0 - (spectrum.n - 2) / 2.0
	base = spectrum.section.base_point()
	rows = []
	bounded = True
	for t in times:
		weighted = []
		for r1 in radii:
			for r2 in radii:
				value = abs(halfwave_band_kernel(spectrum, k, t, (r1, base),
						(r2, base)))
				weighted.append(value / (4.0 ** k * r1 * r2) ** exponent)
		spread = max(weighted) / min(weighted)
		bounded = bounded and spread <= growth
		rows.append({"t": t, "weighted_sup": max(weighted),
				"weighted_min": min(weighted), "spread": spread})

	calibration = max(
			abs(halfwave_band_kernel(spectrum, k, 0.0, (r1, base), (r2, base)))
			for r1 in radii for r2 in radii) / 2.0 ** (k * spectrum.n)
	return {
			"band": k,
			"exponent": exponent,
			"rows": rows,
			"calibration": calibration,
			"bounded": bounded,
		}


def _time_rule(window, rate):
	panels = panel_count(window, rate, minimum=2)
	return gauss_legendre_panels(np.linspace(0.0, window, panels + 1))


def _mixed_norm(values, q, weights):
	if math.isinf(q):
		return float(max(values))
	return float(np.sum(weights * np.asarray(values) ** q) ** (1.0 / q))


def strichartz_ratio(grid, u0, u1, pair, s, times=None, window=None,
		executor=None):
	"""
	Returns ||u||_{L^q_t L^p_x} / (||u0||_{H^s} + ||u1||_{H^(s-1)}) for the
	wave u with data (u0, u1), the time norm taken over [0, window].

	times, when given, are used as the time nodes of a max norm (q = inf)
	or of equal weights; by default Gauss-Legendre nodes on the window.
	Raises InadmissiblePair outside Lambda_{s,alpha(nu0)}.
	"""
	q, p = pair
	spectrum = grid.spectrum
	require_admissible(spectrum.n, q, p, s, spectrum.nu0)

	if window is None:
		window = C.STRICHARTZ_WINDOW
	if times is None:
		times, weights = _time_rule(window, 1.0)
		if math.isinf(q):
			times = np.concatenate([[0.0], times])
			weights = np.concatenate([[0.0], weights])
	else:
		times = np.asarray(times, dtype=float)
		weights = np.full(len(times), window / len(times))

	def norm_at(t):
		return evolve_wave(u0, u1, t).norm(p)

	mapper = executor.map if executor is not None else map
	values = list(mapper(norm_at, times))
	numerator = _mixed_norm(values, q, weights)
	denominator = sobolev_norm(u0, s) + sobolev_norm(u1, s - 1)
	return numerator / denominator


def random_band_data(grid, rng, bands=(0, 1), modes=4):
	"""
	Returns a ConeFunction with a random combination of the first modes,
	each frequency-localised to one of the bands.
	"""
	rho = grid.frequency.nodes
	count = min(modes, len(grid.spectrum))
	spectral = np.zeros((len(grid.spectrum), len(rho)), dtype=complex)
	for index in range(count):
		j = bands[rng.integers(len(bands))]
		shift = rng.uniform(0.0, 4.0)
		amplitude = rng.normal() + 1j * rng.normal()
		spectral[index] = amplitude * lp_bump(rho * 2.0 ** (-j)) * np.exp(
				1j * shift * rho)
	return from_spectral(grid, spectral)


def strichartz_ensemble(grid, pair, s, ensemble=10, seed=0, window=None,
		growth=None, executor=None, with_velocity=True):
	"""
	Returns a report of strichartz_ratio over a seeded ensemble of
	band-limited data, on the window and on the doubled window.

	The report is flagged when a ratio grows by more than the relative
	growth tolerance under window doubling.
	"""
	if window is None:
		window = C.STRICHARTZ_WINDOW
	if growth is None:
		growth = C.DEFAULT_TOLERANCES["strichartz_growth"]

	rng = np.random.default_rng(seed)
	zero = from_spectral(grid, np.zeros((len(grid.spectrum),
			len(grid.frequency)), dtype=complex))
	rows = []
	flagged = False
	for member in range(ensemble):
		u0 = random_band_data(grid, rng)
		u1 = random_band_data(grid, rng) if with_velocity else zero
		short = strichartz_ratio(grid, u0, u1, pair, s, window=window,
				executor=executor)
		long = strichartz_ratio(grid, u0, u1, pair, s, window=2 * window,
				executor=executor)
		flagged = flagged or long > (1.0 + growth) * short
		rows.append({"member": member, "q": pair[0], "p": pair[1], "s": s,
				"window": window, "ratio": short})
		rows.append({"member": member, "q": pair[0], "p": pair[1], "s": s,
				"window": 2 * window, "ratio": long})
		log.debug("strichartz member %d: %.5g -> %.5g", member, short, long)

	ratios = [row["ratio"] for row in rows]
	return {
			"pair": list(pair),
			"s": s,
			"rows": rows,
			"max_ratio": max(ratios),
			"min_ratio": min(ratios),
			"flagged": flagged,
		}


def _radial_rule(epsilon, per_decade=4):
	decades = max(1, int(math.ceil(math.log10(1.0 / epsilon))))
	breaks = np.geomspace(epsilon, 1.0, per_decade * decades + 1)
	return gauss_legendre_panels(breaks)


def counterexample_profile(nu0, n, r, t):
	"""
	Returns Z(t, r) = r^(-(n-2)/2) integral J_nu0(r rho) e^(it rho)
	chi(rho) rho d rho, chi a bump on [1, 2], shape (len(r), len(t)).
	"""
	rho, w = gauss_legendre_panels(np.linspace(1.0, 2.0, 5))
	weights = unit_bump(rho, 1.0, 2.0) * rho * w
	bessel = bessel_j(nu0, np.outer(r, rho)) * weights
	phases = np.exp(1j * np.outer(t, rho))
	return (np.asarray(r) ** (-(n - 2) / 2.0))[:, None] * (bessel @ phases.T)


def counterexample_run(spectrum, p, epsilons, q=None, horizon=0.25):
	"""
	Returns the growth table of ||Z||_{L^q([0, 1/4]; L^p([eps, 1]))} over
	the decreasing epsilons, for a spectrum with nu0 < (n-2)/2.

	Above p(alpha) the norm grows like eps^(alpha + n/p); at p(alpha) its
	p-th power grows like |log eps|; below it stays bounded.
	"""
	n = spectrum.n
	nu0 = spectrum.nu0
	alpha, top = alpha_and_palpha(nu0, n)
	if alpha >= 0:
		raise DomainError("the counterexample needs nu0 < (n-2)/2, got "
				"alpha = {0:.4g}".format(alpha))
	epsilons = [float(e) for e in epsilons]
	if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
		raise DomainError("epsilons must decrease")
	if q is None:
		q = p

	if math.isclose(p, top, rel_tol=1e-12):
		law = "log"
	elif p > top:
		law = "power"
	else:
		law = "bounded"

	t, tw = gauss_legendre_panels(np.linspace(0.0, horizon, 2))
	rows = []
	for epsilon in epsilons:
		r, rw = _radial_rule(epsilon)
		z = np.abs(counterexample_profile(nu0, n, r, t))
		spatial = np.sum((rw * r ** (n - 1))[:, None] * z ** p, axis=0) ** (
				1.0 / p)
		norm = _mixed_norm(spatial, q, tw)
		rows.append({"epsilon": epsilon, "norm": norm, "norm_pow_p": norm ** p,
				"law": law})
		log.debug("counterexample eps=%g: norm %.6g", epsilon, norm)

	norms = [row["norm"] for row in rows]
	exponent, _ = loglog_slope(epsilons, norms)
	return {
			"n": n,
			"nu0": nu0,
			"alpha": alpha,
			"p_alpha": top,
			"p": p,
			"q": q,
			"law": law,
			"predicted_exponent": alpha + n / p if law == "power" else 0.0,
			"exponent": exponent,
			"growth": norms[-1] / norms[0],
			"monotone": all(b >= a for a, b in zip(norms, norms[1:])),
			"rows": rows,
		}
