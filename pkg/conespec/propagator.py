# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Functions of the cone operator, through Hankel transforms and mode sums.

A multiplier F is always a function of the frequency lambda = sqrt(L); the
kernel of F(sqrt(L)) at x = (r1, x^) and y = (r2, y^) is

	(r1 r2)^(-(n-2)/2) sum over levels P(x^, y^)
		integral F(rho) J_nu(r1 rho) J_nu(r2 rho) rho d rho

with P the level sum of psi(x^) conj(psi(y^)).
"""
import logging
import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate

from conespec import constants as C
from conespec.crosssection import mode_cutoff, sufficient_levels
from conespec.specfun import bessel_bound, bessel_j
from conespec.util import (
		Record,
		gauss_legendre_panels,
		graded_breaks,
		lp_bump,
		panel_count,
	)
from conespec.validate import (
		DomainError,
		QuadratureBudgetExceeded,
		TailWarning,
		UnresolvedOscillation,
	)


log = logging.getLogger(__name__)


class RadialGrid(Record):
	"""
	Composite Gauss-Legendre nodes on [r_min, r_max].

	raw holds the plain dr weights and weights the r^(n-1) dr weights.
	"""

	__slots__ = [
			'n',
			'nodes',
			'raw',
			'weights',
			'r_min',
			'r_max',
		]

	def __init__(self, n, nodes, raw, r_min, r_max):
		assert r_max > r_min >= 0
		assert np.all(raw > 0)

		self.n = n
		self.nodes = np.asarray(nodes, dtype=float)
		self.raw = np.asarray(raw, dtype=float)
		self.weights = self.raw * self.nodes ** (n - 1)
		self.r_min = float(r_min)
		self.r_max = float(r_max)

	def __len__(self):
		return len(self.nodes)

	@property
	def spacing(self):
		"""
		Mean distance between nodes.
		"""
		return (self.r_max - self.r_min) / len(self.nodes)


def radial_grid(n, r_min=C.RADIAL_MIN, r_max=C.RADIAL_MAX,
		count=C.RADIAL_NODES):
	"""
	Returns a RadialGrid of about count nodes. A grid starting at zero is
	graded geometrically towards the origin.
	"""
	panels = max(1, count // C.PANEL_ORDER)
	if r_min == 0:
		breaks = graded_breaks(0.0, r_max, panels)
	else:
		breaks = np.linspace(r_min, r_max, panels + 1)
	nodes, raw = gauss_legendre_panels(breaks)
	return RadialGrid(n, nodes, raw, r_min, r_max)


def band_grid(n, k, rate):
	"""
	Returns a frequency grid on the support [2^(k-1), 2^(k+1)] of the k-th
	Littlewood-Paley bump, fine enough for phases advancing at rate.
	"""
	lo, hi = 2.0 ** (k - 1), 2.0 ** (k + 1)
	panels = panel_count(hi - lo, rate, minimum=2)
	nodes, raw = gauss_legendre_panels(np.linspace(lo, hi, panels + 1))
	return RadialGrid(n, nodes, raw, lo, hi)


def check_resolution(grid, rate):
	"""
	Raises UnresolvedOscillation unless a phase advancing at rate moves by at
	most C.MAX_PHASE_STEP between neighbouring nodes of grid.
	"""
	if rate * grid.spacing > C.MAX_PHASE_STEP:
		raise UnresolvedOscillation("phase rate {0:.4g} needs node spacing "
				"below {1:.4g}, grid has {2:.4g}".format(
					rate, C.MAX_PHASE_STEP / rate, grid.spacing))


class LPBand(Record):
	"""
	The j-th Littlewood-Paley band phi(2^-j lambda).
	"""

	__slots__ = [
			'j',
		]

	def __init__(self, j):
		assert isinstance(j, (int, np.integer))

		self.j = int(j)

	def __call__(self, lam):
		return lp_bump(np.asarray(lam, dtype=float) * 2.0 ** (-self.j))

	def root(self, lam):
		"""
		sqrt(phi(2^-j lambda)); the squares of these sum to one.
		"""
		return np.sqrt(self(lam))

	@property
	def support(self):
		return 2.0 ** (self.j - 1), 2.0 ** (self.j + 1)


def bands_covering(lo, hi):
	"""
	Returns every LPBand whose support meets [lo, hi], lo > 0.
	"""
	first = int(math.floor(math.log2(lo))) - 1
	last = int(math.ceil(math.log2(hi))) + 1
	return [LPBand(j) for j in range(first, last + 1)]


def _prefactor(n, r1, r2):
	return (r1 * r2) ** (-(n - 2) / 2.0)


def radius_of(point):
	r = point[0]
	if not r > 0:
		raise DomainError("cone points need r > 0, not {0!r}".format(r))
	return float(r)


def hankel_matrix(nu, n, radii, frequencies):
	"""
	Returns (rho r)^(-(n-2)/2) J_nu(rho r) on frequencies x radii.
	"""
	product = np.outer(frequencies, radii)
	return product ** (-(n - 2) / 2.0) * bessel_j(nu, product)


def hankel_transform(nu, f, grid, rho_grid):
	"""
	Returns the order-nu Hankel transform of the samples f on grid, sampled
	on rho_grid:

		(H f)(rho) = integral (r rho)^(-(n-2)/2) J_nu(r rho) f(r) r^(n-1) dr

	Issues TailWarning when f is still visible at the end of the grid.
	"""
	if nu < 0:
		raise DomainError("Hankel order must be nonnegative")
	f = np.asarray(f)
	scale = max(1.0, float(np.max(np.abs(f)))) if len(f) else 1.0
	if abs(f[-1]) * grid.weights[-1] > 1e-8 * scale:
		log.warning("Hankel transform of order %g: samples not decayed", nu)
		warnings.warn("radial samples do not decay by r = {0:.4g}".format(
			grid.r_max), TailWarning)
	return hankel_matrix(nu, grid.n, grid.nodes, rho_grid.nodes) @ (
			grid.weights * f)


def mode_kernel(nu, F, r1, r2, rho_grid, n, rate=None):
	"""
	Returns the single-mode kernel

		(r1 r2)^(-(n-2)/2) integral F(rho) J_nu(r1 rho) J_nu(r2 rho) rho d rho

	by quadrature on rho_grid. rate is the fastest phase of the integrand,
	r1 + r2 by default.
	"""
	if rate is None:
		rate = r1 + r2
	check_resolution(rho_grid, rate)
	rho = rho_grid.nodes
	integrand = (np.asarray(F(rho), dtype=complex)
			* bessel_j(nu, r1 * rho) * bessel_j(nu, r2 * rho))
	return complex(_prefactor(n, r1, r2) * np.sum(
			integrand * rho * rho_grid.raw))


def operator_kernel(spectrum, F, x, y, rho_grid, rate=None, tolerance=None):
	"""
	Returns the kernel of F(sqrt(L)) at the cone points x = (r1, x^) and
	y = (r2, y^), with F sampled on rho_grid.
	"""
	r1, r2 = radius_of(x), radius_of(y)
	if rate is None:
		rate = r1 + r2
	check_resolution(rho_grid, rate)

	rho = rho_grid.nodes
	values = np.asarray(F(rho), dtype=complex)
	top = rho_grid.r_max
	size = float(np.max(np.abs(values))) * 0.5 * top * top
	prefactor = _prefactor(spectrum.n, r1, r2)

	def bound(nu):
		return (prefactor * size * bessel_bound(nu, top * r1)
				* bessel_bound(nu, top * r2))

	table, _ = sufficient_levels(spectrum, mode_cutoff(top, min(r1, r2)),
			bound, tolerance)
	nu = table.nu[:, None]
	integrals = (bessel_j(nu, r1 * rho) * bessel_j(nu, r2 * rho)) @ (
			values * rho * rho_grid.raw)
	products = spectrum.level_products(x[1], y[1], table)
	return complex(prefactor * (products @ integrals))


def halfwave_band_kernel(spectrum, k, t, x, y, rho_grid=None, tolerance=None):
	"""
	Returns the kernel of phi(2^-k sqrt(L)) e^(it sqrt(L)) at (x, y).
	"""
	band = LPBand(k)
	rate = x[0] + y[0] + abs(t)
	if rho_grid is None:
		rho_grid = band_grid(spectrum.n, k, rate)
	return operator_kernel(spectrum, lambda rho: band(rho) * np.exp(1j * t * rho),
			x, y, rho_grid, rate, tolerance)


class ConeGrid(Record):
	"""
	Sampling of functions on the cone: a radial grid times the quadrature
	nodes of the spectrum's cross-section, with the frequency grid their
	Hankel transforms live on.
	"""

	__slots__ = [
			'spectrum',
			'radial',
			'frequency',
			'matrices',
		]

	def __init__(self, spectrum, radial, frequency):
		assert radial.n == frequency.n == spectrum.n

		self.spectrum = spectrum
		self.radial = radial
		self.frequency = frequency
		self.matrices = {}

	def __eq__(self, other):
		return (isinstance(other, ConeGrid)
				and self.spectrum == other.spectrum
				and self.radial == other.radial
				and self.frequency == other.frequency)

	def matrix(self, nu):
		"""
		Returns the Hankel matrix of order nu from radii to frequencies.
		"""
		key = round(float(nu), 12)
		if key not in self.matrices:
			self.matrices[key] = hankel_matrix(nu, self.radial.n,
					self.radial.nodes, self.frequency.nodes)
		return self.matrices[key]

	def groups(self):
		"""
		Yields (nu, mode indices) over the distinct orders of the spectrum.
		"""
		nu = np.round(self.spectrum.nu, 12)
		for value in np.unique(nu):
			yield float(value), np.nonzero(nu == value)[0]


def cone_grid(spectrum, r_max=C.RADIAL_MAX, rho_max=None, count=C.RADIAL_NODES,
		rho_count=None, r_min=0.0):
	"""
	Returns a ConeGrid on [r_min, r_max] x [0, rho_max].
	"""
	if rho_max is None:
		rho_max = r_max
	if rho_count is None:
		rho_count = count
	return ConeGrid(spectrum, radial_grid(spectrum.n, r_min, r_max, count),
			radial_grid(spectrum.n, 0.0, rho_max, rho_count))


class ConeFunction(Record):
	"""
	A function on the cone sampled on a ConeGrid, shape (radii, nodes).

	modes optionally caches the Hankel transforms of the angular mode
	coefficients, shape (modes, frequencies).
	"""

	__slots__ = [
			'grid',
			'samples',
			'modes',
		]

	def __init__(self, grid, samples, modes=None):
		samples = np.asarray(samples, dtype=complex)
		assert samples.shape == (len(grid.radial), len(grid.spectrum.weights))

		self.grid = grid
		self.samples = samples
		self.modes = modes

	def coefficients(self):
		"""
		Returns the angular mode coefficients, shape (radii, modes).
		"""
		return self.grid.spectrum.project(self.samples)

	def spectral(self):
		"""
		Returns the Hankel transforms of the mode coefficients.
		"""
		if self.modes is None:
			coeffs = self.coefficients() * self.grid.radial.weights[:, None]
			res = np.zeros((coeffs.shape[1], len(self.grid.frequency)),
					dtype=complex)
			for nu, index in self.grid.groups():
				res[index] = (self.grid.matrix(nu) @ coeffs[:, index]).T
			self.modes = res
		return self.modes

	def norm(self, p=2):
		"""
		Returns the L^p norm over the product quadrature.
		"""
		magnitude = np.abs(self.samples)
		if math.isinf(p):
			return float(magnitude.max())
		weights = np.outer(self.grid.radial.weights, self.grid.spectrum.weights)
		return float(np.sum(weights * magnitude ** p) ** (1.0 / p))

	def spectral_norm(self):
		"""
		Returns the L^2 norm of the computed modes, through Plancherel.
		"""
		return math.sqrt(float(np.sum(
				np.abs(self.spectral()) ** 2 * self.grid.frequency.weights)))


def from_spectral(grid, modes):
	"""
	Returns the ConeFunction whose mode transforms are modes.
	"""
	modes = np.asarray(modes, dtype=complex)
	weighted = modes * grid.frequency.weights
	coeffs = np.zeros((len(grid.radial), modes.shape[0]), dtype=complex)
	for nu, index in grid.groups():
		coeffs[:, index] = grid.matrix(nu).T @ weighted[index].T
	return ConeFunction(grid, grid.spectrum.synthesize(coeffs), modes)


def cone_function(grid, radial, angular=None):
	"""
	Returns the ConeFunction radial(r) * angular(x^). angular defaults to the
	first eigenfunction.
	"""
	if angular is None:
		angular = grid.spectrum.psi[0]
	return ConeFunction(grid, np.outer(radial, angular))


def apply_spectral(f, F):
	"""
	Returns F(sqrt(L)) f for a multiplier F of the frequency.
	"""
	return from_spectral(f.grid,
			f.spectral() * F(f.grid.frequency.nodes)[None, :])


def evolve_wave(u0, u1, t, derivative=False):
	"""
	Returns the solution at time t of u'' + L u = 0 with u(0) = u0 and
	u'(0) = u1, or (u, u') with derivative.
	"""
	rho = u0.grid.frequency.nodes
	start = u0.spectral()
	speed = u1.spectral()
	cosine, sine = np.cos(t * rho), np.sin(t * rho)
	res = from_spectral(u0.grid, cosine * start + sine / rho * speed)
	if not derivative:
		return res
	return res, from_spectral(u0.grid, -rho * sine * start + cosine * speed)


def evolve_halfwave(u0, t):
	"""
	Returns e^(it sqrt(L)) u0.
	"""
	return apply_spectral(u0, lambda rho: np.exp(1j * t * rho))


def wave_energy(u, ut):
	"""
	Returns ||sqrt(L) u||^2 + ||u_t||^2.
	"""
	weights = u.grid.frequency.weights
	rho = u.grid.frequency.nodes
	return float(np.sum((rho * rho * np.abs(u.spectral()) ** 2
			+ np.abs(ut.spectral()) ** 2) * weights))


def littlewood_paley_project(f, j):
	"""
	Returns phi(2^-j sqrt(L)) f.
	"""
	return apply_spectral(f, LPBand(j))


def _resolved_bands(f):
	nodes = f.grid.frequency.nodes
	return bands_covering(float(nodes.min()), float(nodes.max()))


def sobolev_norm(f, s):
	"""
	Returns the homogeneous Sobolev norm of order s, as the square sum of
	2^(js) ||sqrt(phi_j)(sqrt(L)) f|| over the bands the frequency grid
	reaches.
	"""
	density = np.sum(np.abs(f.spectral()) ** 2, axis=0) * f.grid.frequency.weights
	total = 0.0
	for band in _resolved_bands(f):
		total += 2.0 ** (2 * band.j * s) * float(np.sum(
				band(f.grid.frequency.nodes) * density))
	return math.sqrt(total)


def spectral_sobolev_norm(f, s):
	"""
	Returns ||L^(s/2) f|| directly from the spectral representation.
	"""
	rho = f.grid.frequency.nodes
	return math.sqrt(float(np.sum(rho ** (2 * s) * np.abs(f.spectral()) ** 2
			* f.grid.frequency.weights)))


def mode_project(f, predicate):
	"""
	Returns the projection of f onto the angular modes whose order nu
	satisfies predicate.

	The part of f outside the computed modes goes with the high orders: it is
	kept when predicate(inf) holds, so complementary predicates always sum
	back to f.
	"""
	spectrum = f.grid.spectrum
	keep = np.array([bool(predicate(nu)) for nu in spectrum.nu])
	coeffs = f.coefficients()
	kept = spectrum.synthesize(coeffs * keep)
	if predicate(math.inf):
		kept = kept + (f.samples - spectrum.synthesize(coeffs))

	modes = None
	if f.modes is not None:
		modes = f.modes * keep[:, None]
	return ConeFunction(f.grid, kept, modes)


def below_threshold(spectrum):
	"""
	Returns the predicate nu < (n-2)/2 that selects the modes of P_<.
	"""
	threshold = (spectrum.n - 2) / 2.0
	return lambda nu: nu < threshold


def bernstein_check(grid, p, q, bands=(0, 1, 2, 3), ensemble=10, seed=0,
		growth=2.0):
	"""
	Returns a report on the Bernstein ratios

		||phi_j f||_p / (2^(nj(1/q - 1/p)) ||phi_j f||_q)

	over an ensemble of angle-independent Gaussian bumps, for each band j.
	The ratio has to stay bounded in j; the report is flagged when it grows
	by more than growth across the bands.
	"""
	from conespec.estimates import alpha_and_palpha

	spectrum = grid.spectrum
	n = spectrum.n
	_, top = alpha_and_palpha(spectrum.nu0, n)
	low = top / (top - 1.0) if not math.isinf(top) else 1.0
	if not low < q <= p or (not math.isinf(top) and not p < top):
		raise DomainError("Bernstein exponents need p'(alpha) < q <= p < "
				"p(alpha) = {0}, got q={1}, p={2}".format(top, q, p))

	rng = np.random.default_rng(seed)
	r = grid.radial.nodes
	ratios = []
	for j in bands:
		scale = 2.0 ** (n * j * (1.0 / q - (0.0 if math.isinf(p) else 1.0 / p)))
		worst = 0.0
		for _ in range(ensemble):
			centre = rng.uniform(0.5, 0.5 * grid.radial.r_max)
			width = rng.uniform(0.3, 1.0)
			bump = cone_function(grid, np.exp(-((r - centre) / width) ** 2))
			piece = littlewood_paley_project(bump, j)
			worst = max(worst, piece.norm(p) / (scale * piece.norm(q)))
		ratios.append(worst)

	return {
			"p": p,
			"q": q,
			"bands": list(bands),
			"ratios": ratios,
			"bounded": bool(max(ratios) <= growth * ratios[0]),
		}


def square_function_check(grid, p, ensemble=10, seed=0, growth=4.0):
	"""
	Returns a report on the square-function ratios

		||(sum_j |phi_j f|^2)^(1/2)||_p / ||f||_p

	over an ensemble of band-limited data drawn like the Strichartz
	ensembles, with j running over every band the frequency grid reaches.
	The report is bounded when every ratio lies in [1/growth, growth].
	"""
	from conespec.estimates import alpha_and_palpha, random_band_data

	spectrum = grid.spectrum
	_, top = alpha_and_palpha(spectrum.nu0, spectrum.n)
	low = top / (top - 1.0) if not math.isinf(top) else 1.0
	if math.isinf(p) or not low < p < top:
		raise DomainError("square function exponent needs p'(alpha) < p < "
				"p(alpha) = {0}, got p={1}".format(top, p))

	rng = np.random.default_rng(seed)
	bands = bands_covering(float(grid.frequency.nodes.min()),
			float(grid.frequency.nodes.max()))
	ratios = []
	for _ in range(ensemble):
		f = random_band_data(grid, rng)
		square = np.zeros(f.samples.shape)
		for band in bands:
			square += np.abs(littlewood_paley_project(f, band.j).samples) ** 2
		ratios.append(ConeFunction(grid, np.sqrt(square)).norm(p) / f.norm(p))
	log.debug("square function at p=%g over %d bands: ratios in [%.4g, %.4g]",
			p, len(bands), min(ratios), max(ratios))

	return {
			"p": p,
			"bands": [band.j for band in bands],
			"ratios": ratios,
			"min_ratio": min(ratios),
			"max_ratio": max(ratios),
			"bounded": bool(min(ratios) >= 1.0 / growth
				and max(ratios) <= growth),
		}


def _cosh_tail(beta, nu):
	"""
	Internal function.

	Returns integral over s > C.POISSON_SPLIT of e^(i beta cosh s - nu s) ds.
	"""
	return _cosh_tail_cached(round(float(beta), 14), round(float(nu), 14))


@lru_cache(maxsize=4096)
def _cosh_tail_cached(beta, nu):
	start = math.cosh(C.POISSON_SPLIT)

	def weight(u):
		root = math.sqrt(u * u - 1.0)
		return (u + root) ** (-nu) / root

	frequency = abs(beta)
	if frequency == 0:
		real, _ = integrate.quad(weight, start, np.inf)
		return complex(real)
	real, _ = integrate.quad(weight, start, np.inf, weight='cos',
			wvar=frequency)
	imag, _ = integrate.quad(weight, start, np.inf, weight='sin',
			wvar=frequency)
	return complex(real, math.copysign(1.0, beta) * imag)


def _schrodinger_parts(spectrum, t, x, y, tolerance):
	r1, r2 = radius_of(x), radius_of(y)
	if t == 0:
		raise DomainError("the Schrodinger kernel is singular at t = 0")
	beta = r1 * r2 / (2.0 * t)
	prefactor = (_prefactor(spectrum.n, r1, r2)
			* np.exp(1j * (r1 * r1 + r2 * r2) / (4.0 * t)) / (2j * t))

	def bound(nu):
		return abs(prefactor) * bessel_bound(nu, abs(beta))

	table, _ = sufficient_levels(spectrum, mode_cutoff(1.0, abs(beta)), bound,
			tolerance)
	products = spectrum.level_products(x[1], y[1], table)
	return beta, prefactor, table, products


def schrodinger_kernel_modes(spectrum, t, x, y, tolerance=None):
	"""
	Returns the kernel of e^(-itL) at (x, y) as the mode sum

		(r1 r2)^(-(n-2)/2) e^(i(r1^2 + r2^2)/(4t)) / (2it)
			sum P e^(-i sgn(t) pi nu / 2) J_nu(|beta|),  beta = r1 r2 / (2t)
	"""
	beta, prefactor, table, products = _schrodinger_parts(spectrum, t, x, y,
			tolerance)
	phases = np.exp(-1j * np.sign(t) * np.pi * table.nu / 2.0)
	return complex(prefactor * np.sum(products * phases
			* bessel_j(table.nu, abs(beta))))


def schrodinger_kernel_ct(spectrum, t, x, y, tolerance=None,
		budget=C.CT_NODE_BUDGET):
	"""
	Returns the kernel of e^(-itL) at (x, y) from the angular operator
	kernels cos(s sqrt(P)) and sin(pi sqrt(P)) e^(-s sqrt(P)):

		(1/pi) integral_0^pi e^(-i beta cos s) cos(s sqrt(P)) ds
		- (1/pi) integral_0^inf e^(i beta cosh s) sin(pi sqrt(P)) e^(-s sqrt(P)) ds

	times the prefactor of schrodinger_kernel_modes.
	"""
	beta, prefactor, table, products = _schrodinger_parts(spectrum, t, x, y,
			tolerance)
	nu = table.nu
	top = float(nu.max()) if len(nu) else 0.0

	panels = panel_count(math.pi, top + abs(beta), minimum=4)
	if panels * C.PANEL_ORDER > budget:
		raise QuadratureBudgetExceeded("angular integral needs {0} nodes, "
				"budget is {1}".format(panels * C.PANEL_ORDER, budget))
	s, w = gauss_legendre_panels(np.linspace(0.0, math.pi, panels + 1))
	cosines = np.cos(np.outer(s, nu)) @ products
	circle = np.sum(w * np.exp(-1j * beta * np.cos(s)) * cosines) / math.pi

	rate = abs(beta) * math.sinh(C.POISSON_SPLIT) + top
	panels = panel_count(C.POISSON_SPLIT, rate, minimum=4)
	if panels * C.PANEL_ORDER > budget:
		raise QuadratureBudgetExceeded("cosh integral needs {0} nodes, "
				"budget is {1}".format(panels * C.PANEL_ORDER, budget))
	s, w = gauss_legendre_panels(np.linspace(0.0, C.POISSON_SPLIT, panels + 1))
	log.debug("schrodinger kernel: beta %.4g, %d levels, %d cosh nodes",
			beta, len(table), len(s))
	sines = np.sin(np.pi * nu) * products
	poisson = np.exp(-np.outer(s, nu)) @ sines
	total = np.sum(w * np.exp(1j * beta * np.cosh(s)) * poisson)

	cutoff = C.DEFAULT_TOLERANCES["quadrature"]
	for value, weight in zip(nu, sines):
		if weight == 0 or math.exp(-value * C.POISSON_SPLIT) / value < cutoff:
			continue
		total += weight * _cosh_tail(beta, value)

	return complex(prefactor * (circle - total / math.pi))


def free_schrodinger_kernel(t, distance, n=3):
	"""
	Returns the free kernel (4 pi i t)^(-n/2) e^(i |x-y|^2 / (4t)) in R^n.
	"""
	if t == 0:
		raise DomainError("the Schrodinger kernel is singular at t = 0")
	return complex((4j * math.pi * t) ** (-n / 2.0)
			* np.exp(1j * distance * distance / (4.0 * t)))


class KernelGrid(Record):
	"""
	Kernel values K(x, y) over radii1 x points1 x radii2 x points2.

	meta carries the parameters the kernel was evaluated with (kind, band,
	t and the configuration hash).
	"""

	__slots__ = [
			'radii1',
			'points1',
			'radii2',
			'points2',
			'values',
			'meta',
		]

	def __init__(self, radii1, points1, radii2, points2, values, meta):
		values = np.asarray(values, dtype=complex)
		assert values.shape == (len(radii1), len(points1), len(radii2),
				len(points2))

		self.radii1 = np.asarray(radii1, dtype=float)
		self.points1 = np.asarray(points1, dtype=float)
		self.radii2 = np.asarray(radii2, dtype=float)
		self.points2 = np.asarray(points2, dtype=float)
		self.values = values
		self.meta = dict(meta)


KERNEL_KINDS = ("halfwave", "schrodinger")


def kernel_grid(spectrum, kind, radii1, points1, radii2, points2, band=0,
		t=0.0, executor=None, meta=None):
	"""
	Returns the KernelGrid of the half-wave band kernel or the Schrodinger
	kernel. executor, if given, maps the evaluations in parallel; the grid
	comes back in the same order either way.
	"""
	if kind == "halfwave":
		def evaluate(args):
			r1, x, r2, y = args
			return halfwave_band_kernel(spectrum, band, t, (r1, x), (r2, y))
	elif kind == "schrodinger":
		def evaluate(args):
			r1, x, r2, y = args
			return schrodinger_kernel_modes(spectrum, t, (r1, x), (r2, y))
	else:
		raise DomainError("unknown kernel kind {0!r}".format(kind))

	tuples = [(r1, x, r2, y)
			for r1 in radii1 for x in points1
			for r2 in radii2 for y in points2]
	mapper = executor.map if executor is not None else map
	values = np.array(list(mapper(evaluate, tuples)), dtype=complex)

	info = {"kind": kind, "band": band, "t": t, "n": spectrum.n}
	info.update(meta or {})
	return KernelGrid(radii1, points1, radii2, points2,
			values.reshape(len(radii1), len(points1), len(radii2),
				len(points2)), info)
