# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Cross-sections of the cone and the spectral theory of the angular operator

	L = -Laplacian + |A|^2 + i div A + 2i A.grad + a

on them. Each kind of cross-section knows its quadrature, its distance
function, and how to solve and group its own eigenproblem; eigensolve turns
that into an AngularSpectrum shared by the rest of the package.

Points of a cross-section are numpy vectors in the section's own coordinates:
unit vectors in R^(d+1) for spheres, angle pairs for the flat torus, and
embedded points in R^3 for the spheroid.
"""
import logging
import math

import numpy as np
from scipy import linalg, special

from conespec import constants as C
from conespec.util import Record
from conespec.validate import (
		DomainError,
		InvalidConfig,
		PositivityViolation,
		ConvergenceFailure,
		TailEstimateExceeded,
	)


log = logging.getLogger(__name__)


def mode_cutoff(lam, radius):
	"""
	Returns the largest order worth keeping in a mode sum at frequency lam and
	radius: ceil(e * lam * radius / 2) + C.MODE_MARGIN.

	J_nu(lam * radius) decays super-exponentially once nu passes
	e * lam * radius / 2.
	"""
	return math.ceil(math.e * lam * radius / 2.0) + C.MODE_MARGIN


def sphere_volume(dim, radius=1.0):
	"""
	Returns the volume of the round sphere S^dim of the given radius.
	"""
	return (2.0 * math.pi ** ((dim + 1) / 2.0)
			/ math.gamma((dim + 1) / 2.0) * radius ** dim)


def sphere_quadrature(dim, degree):
	"""
	Returns (nodes, weights) on the unit sphere S^dim, exact for polynomials
	of total degree <= degree.

	The polar angles get Gauss-Jacobi rules for their sine weights; the last
	angle is sampled uniformly. Nodes are unit vectors in R^(dim+1), with the
	first coordinate along the polar axis.
	"""
	assert dim >= 1
	count = degree // 2 + 1
	axes = []
	axisWeights = []
	for j in range(1, dim):
		power = dim - j
		t, w = special.roots_jacobi(count, 0.5 * (power - 1), 0.5 * (power - 1))
		axes.append(t)
		axisWeights.append(w)

	longitudes = degree + 1
	axes.append(2.0 * np.pi * np.arange(longitudes) / longitudes)
	axisWeights.append(np.full(longitudes, 2.0 * np.pi / longitudes))

	mesh = [m.ravel() for m in np.meshgrid(*axes, indexing='ij')]
	weights = np.prod(
			[m.ravel() for m in np.meshgrid(*axisWeights, indexing='ij')],
			axis=0)

	coords = []
	scale = np.ones(len(weights))
	for cosine in mesh[:-1]:
		coords.append(scale * cosine)
		scale = scale * np.sqrt(np.clip(1.0 - cosine * cosine, 0.0, None))
	coords.append(scale * np.cos(mesh[-1]))
	coords.append(scale * np.sin(mesh[-1]))

	return np.stack(coords, axis=1), weights


def grid_gap(polars, longitudes, meridian=1.0, parallel=1.0):
	"""
	Returns a bound on the distance from any point of a surface to the
	nearest node of a latitude-longitude grid.

	polars lists the node colatitudes of every polar axis; meridian and
	parallel bound the metric scale along the polar and longitude directions.
	"""
	total = parallel * math.pi / longitudes
	for polar in polars:
		polar = np.sort(np.asarray(polar, dtype=float))
		ends = max(polar[0], math.pi - polar[-1])
		inner = float(np.max(np.diff(polar))) if len(polar) > 1 else 0.0
		total += meridian * max(ends, 0.5 * inner)
	return total


def sphere_node_gap(dim, degree):
	"""
	Returns a bound on the distance from any point of the unit S^dim to the
	nearest node of sphere_quadrature(dim, degree).
	"""
	count = degree // 2 + 1
	polars = []
	for j in range(1, dim):
		power = dim - j
		t, _ = special.roots_jacobi(count, 0.5 * (power - 1), 0.5 * (power - 1))
		polars.append(np.arccos(np.clip(t, -1.0, 1.0)))
	return grid_gap(polars, degree + 1)


def sphere_angles(points):
	"""
	Returns (theta, phi) of unit vectors in R^3, polar axis first.
	"""
	points = np.asarray(points, dtype=float)
	theta = np.arccos(np.clip(points[..., 0], -1.0, 1.0))
	phi = np.arctan2(points[..., 2], points[..., 1])
	return theta, phi


def harmonic_multiplicity(degree, dim):
	"""
	Returns the dimension of the space of degree-l spherical harmonics on
	S^dim.
	"""
	if degree == 0:
		return 1
	return math.comb(degree + dim, dim) - math.comb(degree + dim - 2, dim)


def _gegenbauer_at_one(degree, order):
	return np.exp(special.gammaln(degree + 2.0 * order)
			- special.gammaln(2.0 * order) - special.gammaln(degree + 1.0))


def _harmonic_basis(dim, degree, nodes, weights):
	"""
	Internal function.

	Returns an orthonormal basis of degree-l harmonics sampled on nodes, as a
	(multiplicity, N) array. Zonal harmonics centred on pseudo-random points
	span the space; a weighted SVD orthonormalises them.
	"""
	mult = harmonic_multiplicity(degree, dim)
	if degree == 0:
		return np.full((1, len(weights)), 1.0 / np.sqrt(weights.sum()))

	rng = np.random.default_rng(degree)
	centres = rng.standard_normal((2 * mult, dim + 1))
	centres /= np.linalg.norm(centres, axis=1, keepdims=True)

	order = 0.5 * (dim - 1)
	zonal = special.eval_gegenbauer(
			degree, order, np.clip(nodes @ centres.T, -1.0, 1.0))
	root = np.sqrt(weights)[:, None]
	u, _, _ = np.linalg.svd(root * zonal, full_matrices=False)
	return (u[:, :mult] / root).T


class LevelTable(Record):
	"""
	Eigenvalue levels of the angular operator up to some order.

	Mode sums group modes by level: the sum over a level of
	psi(x) conj(psi(y)) only depends on the section, not on the basis chosen
	inside the eigenspace.

	Fields:
		nu        level orders, increasing
		mult      level multiplicities
		sup       sup over the section of the sum over the level of |psi|^2
		members   kind-specific labels of the levels (degrees, mode indices,
		          or lattice points)
		index     level index of every member
		next_nu   order of the first level left out (inf if unknown)
		next_sup  sup of that level
	"""

	__slots__ = [
			'nu',
			'mult',
			'sup',
			'members',
			'index',
			'next_nu',
			'next_sup',
		]

	def __init__(self, nu, mult, sup, members, index, next_nu, next_sup):
		self.nu = np.asarray(nu, dtype=float)
		self.mult = np.asarray(mult, dtype=int)
		self.sup = np.asarray(sup, dtype=float)
		self.members = np.asarray(members)
		self.index = np.asarray(index, dtype=int)
		self.next_nu = float(next_nu)
		self.next_sup = float(next_sup)

		assert len(self.nu) == len(self.mult) == len(self.sup)
		assert np.all(np.diff(self.nu) >= 0)

	def __len__(self):
		return len(self.nu)

	def membership(self):
		"""
		Returns the (members, levels) 0/1 matrix that sums members by level.
		"""
		res = np.zeros((len(self.index), len(self.nu)))
		res[np.arange(len(self.index)), self.index] = 1.0
		return res


class BaseSection(Record):
	"""
	Interface shared by all cross-section kinds.
	"""

	kind = None
	dim = 2

	def to_dict(self):
		raise NotImplementedError()

	def volume(self):
		raise NotImplementedError()

	def diameter(self):
		raise NotImplementedError()

	def base_point(self):
		"""
		Returns the point every point_at() geodesic starts from.
		"""
		raise NotImplementedError()

	def point_at(self, distance):
		"""
		Returns the point at the given geodesic distance from base_point().
		"""
		raise NotImplementedError()

	def distance(self, x, y):
		"""
		Returns the distance between points; both arguments broadcast.
		"""
		raise NotImplementedError()

	def quadrature(self, degree):
		raise NotImplementedError()

	def node_gap(self, degree):
		"""
		Returns a bound on the distance from any point to the nearest node of
		quadrature(degree).
		"""
		raise NotImplementedError()

	def solve(self, n, count, tolerance=None):
		"""
		Returns (mu, psi, nodes, weights, coeffs) for the first count modes.
		"""
		raise DomainError("{0} cross-sections carry geometry only; they have "
				"no eigensolver".format(self.kind))

	def level_table(self, spectrum, nu_max):
		raise NotImplementedError()

	def level_products(self, spectrum, table, x, y):
		raise NotImplementedError()


class RoundSphere(BaseSection):
	"""
	The round sphere S^dim of the given radius, with a constant potential a.
	"""

	__slots__ = [
			'dim',
			'radius',
			'a',
		]

	kind = C.ROUND_SPHERE

	def __init__(self, dim=2, radius=1.0, a=0.0):
		assert isinstance(dim, int) and dim >= 2
		assert radius > 0

		self.dim = dim
		self.radius = float(radius)
		self.a = float(a)

	def to_dict(self):
		return {"kind": self.kind, "dim": self.dim, "radius": self.radius,
				"a": self.a}

	def volume(self):
		return sphere_volume(self.dim, self.radius)

	def diameter(self):
		return math.pi * self.radius

	def base_point(self):
		res = np.zeros(self.dim + 1)
		res[0] = 1.0
		return res

	def point_at(self, distance):
		angle = distance / self.radius
		res = np.zeros(self.dim + 1)
		res[0] = math.cos(angle)
		res[1] = math.sin(angle)
		return res

	def distance(self, x, y):
		cosine = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1),
				-1.0, 1.0)
		return self.radius * np.arccos(cosine)

	def quadrature(self, degree):
		nodes, weights = sphere_quadrature(self.dim, degree)
		return nodes, weights * self.radius ** self.dim

	def node_gap(self, degree):
		return self.radius * sphere_node_gap(self.dim, degree)

	def eigenvalue(self, degree):
		degree = np.asarray(degree, dtype=float)
		return degree * (degree + self.dim - 1) / self.radius ** 2 + self.a

	def _order(self, n, degree):
		return np.sqrt(self.eigenvalue(degree) + (n - 2) ** 2 / 4.0)

	def solve(self, n, count, tolerance=None):
		degrees = []
		total = 0
		degree = 0
		while total < count:
			mult = harmonic_multiplicity(degree, self.dim)
			degrees.append((degree, mult))
			total += mult
			degree += 1

		nodes, weights = self.quadrature(2 * degrees[-1][0] + 1)
		blocks = [
				_harmonic_basis(self.dim, deg, nodes, weights
						/ self.radius ** self.dim) / self.radius ** (self.dim / 2)
				for deg, _ in degrees
			]
		psi = np.concatenate(blocks, axis=0)[:count].astype(complex)
		mu = np.concatenate([
				np.full(mult, self.eigenvalue(deg)) for deg, mult in degrees
			])[:count]
		return mu, psi, nodes, weights, None

	def level_table(self, spectrum, nu_max):
		degrees = []
		degree = 0
		while self._order(spectrum.n, degree) <= nu_max:
			degrees.append(degree)
			degree += 1

		mult = [harmonic_multiplicity(deg, self.dim) for deg in degrees]
		sup = np.array(mult, dtype=float) / self.volume()
		nextMult = harmonic_multiplicity(degree, self.dim)
		return LevelTable(
				self._order(spectrum.n, np.array(degrees, dtype=float)),
				mult, sup, degrees, np.arange(len(degrees)),
				self._order(spectrum.n, degree), nextMult / self.volume(),
			)

	def level_products(self, spectrum, table, x, y):
		"""
		Addition theorem: the level sum is
		mult / |Y| * C_l(cos angle) / C_l(1), with Gegenbauer C of order
		(dim - 1) / 2.
		"""
		order = 0.5 * (self.dim - 1)
		cosine = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1),
				-1.0, 1.0)[..., None]
		degrees = table.members.astype(float)
		zonal = (special.eval_gegenbauer(degrees, order, cosine)
				/ _gegenbauer_at_one(degrees, order))
		return (table.mult / self.volume() * zonal).astype(complex)


def real_harmonics(maxDegree, theta, phi, gradients=False):
	"""
	Returns the real spherical harmonics of degree <= maxDegree at (theta,
	phi), as a ((maxDegree + 1)^2, N) array ordered by (l, m), m = -l..l.

	With gradients, also returns the frame components d/dtheta and
	(1/sin theta) d/dphi of every harmonic.
	"""
	theta = np.asarray(theta, dtype=float)
	phi = np.asarray(phi, dtype=float)
	x = np.cos(theta)
	size = (maxDegree + 1) ** 2
	values = np.zeros((size,) + theta.shape)
	dTheta = np.zeros_like(values)
	dPhi = np.zeros_like(values)

	def legendre(m, l):
		if m < 0 or m > l:
			return np.zeros_like(x)
		return special.lpmv(m, l, x)

	for l in range(maxDegree + 1):
		for m in range(0, l + 1):
			norm = np.sqrt((2 * l + 1) / (4 * np.pi) * np.exp(
					special.gammaln(l - m + 1) - special.gammaln(l + m + 1)))
			p = norm * legendre(m, l)
			if m == 0:
				dp = norm * legendre(1, l)
			else:
				dp = 0.5 * norm * (legendre(m + 1, l)
						- (l + m) * (l - m + 1) * legendre(m - 1, l))

			if m == 0:
				values[l * l + l] = p
				dTheta[l * l + l] = dp
				continue

			root2 = np.sqrt(2.0)
			cosine = np.cos(m * phi)
			sine = np.sin(m * phi)
			values[l * l + l + m] = root2 * p * cosine
			values[l * l + l - m] = root2 * p * sine
			if gradients:
				overSin = p / np.sin(theta)
				dTheta[l * l + l + m] = root2 * dp * cosine
				dTheta[l * l + l - m] = root2 * dp * sine
				dPhi[l * l + l + m] = -root2 * m * overSin * sine
				dPhi[l * l + l - m] = root2 * m * overSin * cosine

	if gradients:
		return values, dTheta, dPhi
	return values


class GalerkinSphere(BaseSection):
	"""
	The unit sphere S^2 with a smooth potential a and magnetic 1-form A,
	discretised by real spherical harmonics of degree <= max_degree.

	a is a constant plus a combination of real harmonics, given as (l, m, c)
	triples. The magnetic field is one of:

		none
		rotational  A = strength * sin(theta) dphi-direction
		gradient    A = grad(strength * cos(theta)), a pure gauge
	"""

	__slots__ = [
			'max_degree',
			'a_constant',
			'a_harmonics',
			'magnetic',
			'strength',
		]

	kind = C.GALERKIN_SPHERE2
	dim = 2
	radius = 1.0

	def __init__(self, max_degree=C.GALERKIN_DEGREE, a_constant=0.0,
			a_harmonics=(), magnetic=C.MAGNETIC_NONE, strength=0.0):
		assert isinstance(max_degree, int) and max_degree >= 1
		assert magnetic in (C.MAGNETIC_NONE, C.MAGNETIC_ROTATIONAL,
				C.MAGNETIC_GRADIENT)
		for l, m, _ in a_harmonics:
			assert 0 <= l and -l <= m <= l

		self.max_degree = max_degree
		self.a_constant = float(a_constant)
		self.a_harmonics = tuple(
				(int(l), int(m), float(c)) for l, m, c in a_harmonics)
		self.magnetic = magnetic
		self.strength = float(strength)

	def to_dict(self):
		return {
				"kind": self.kind,
				"max_degree": self.max_degree,
				"a": {
					"constant": self.a_constant,
					"harmonics": [list(h) for h in self.a_harmonics],
				},
				"magnetic": {"kind": self.magnetic, "strength": self.strength},
			}

	def volume(self):
		return 4.0 * math.pi

	def diameter(self):
		return math.pi

	def base_point(self):
		return np.array([1.0, 0.0, 0.0])

	def point_at(self, distance):
		return np.array([math.cos(distance), math.sin(distance), 0.0])

	def distance(self, x, y):
		cosine = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1),
				-1.0, 1.0)
		return np.arccos(cosine)

	def quadrature(self, degree):
		return sphere_quadrature(2, degree)

	def node_gap(self, degree):
		return sphere_node_gap(2, degree)

	def potential(self, theta, phi):
		"""
		Returns a at the given angles.
		"""
		res = np.full(np.shape(theta), self.a_constant)
		if not self.a_harmonics:
			return res
		top = max(l for l, _, _ in self.a_harmonics)
		values = real_harmonics(top, theta, phi)
		for l, m, c in self.a_harmonics:
			res = res + c * values[l * l + l + m]
		return res

	def magnetic_field(self, theta):
		"""
		Returns the frame components (A_theta, A_phi) of the magnetic 1-form.
		"""
		zero = np.zeros_like(theta)
		if self.magnetic == C.MAGNETIC_ROTATIONAL:
			return zero, self.strength * np.sin(theta)
		if self.magnetic == C.MAGNETIC_GRADIENT:
			return -self.strength * np.sin(theta), zero
		return zero, zero

	def matrix(self, maxDegree=None):
		"""
		Returns the Hermitian Galerkin matrix of the angular operator in the
		real harmonic basis of degree <= maxDegree.

		The weak form of (i grad + A)^2 + a between real basis functions is

			grad f_i . grad f_j + (|A|^2 + a) f_i f_j
				+ i (f_i A.grad f_j - f_j A.grad f_i),

		so the real part is symmetric and the imaginary part antisymmetric.
		"""
		if maxDegree is None:
			maxDegree = self.max_degree
		top = max([l for l, _, _ in self.a_harmonics] + [0])
		nodes, weights = self.quadrature(2 * maxDegree + top + 2)
		theta, phi = sphere_angles(nodes)

		values, dTheta, dPhi = real_harmonics(maxDegree, theta, phi,
				gradients=True)
		aTheta, aPhi = self.magnetic_field(theta)
		scalar = aTheta ** 2 + aPhi ** 2 + self.potential(theta, phi)

		weighted = values * weights
		stiffness = ((dTheta * weights) @ dTheta.T
				+ (dPhi * weights) @ dPhi.T
				+ (weighted * scalar) @ values.T)
		drift = weighted @ (aTheta * dTheta + aPhi * dPhi).T

		real = 0.5 * (stiffness + stiffness.T)
		return real + 1j * (drift - drift.T)

	def _eigen(self, maxDegree):
		return linalg.eigh(self.matrix(maxDegree))

	def solve(self, n, count, tolerance=None):
		usable = (self.max_degree - 4) ** 2
		if count > usable:
			log.warning("Galerkin basis of degree %d resolves %d modes; "
					"keeping %d of the %d requested", self.max_degree, usable,
					usable, count)
			count = usable

		mu, vectors = self._eigen(self.max_degree)
		finer, _ = self._eigen(self.max_degree + 2)
		shift = np.max(np.abs(finer[:count] - mu[:count])
				/ np.maximum(1.0, np.abs(mu[:count])))
		log.debug("Galerkin eigenvalue shift on refinement: %.3g", shift)
		if tolerance is None:
			tolerance = C.DEFAULT_TOLERANCES["galerkin"]
		if shift > tolerance:
			raise ConvergenceFailure("Galerkin eigenvalues moved by {0:.3g} "
					"when the degree was raised from {1} to {2}".format(
						shift, self.max_degree, self.max_degree + 2))

		nodes, weights = self.quadrature(4 * self.max_degree + 3)
		theta, phi = sphere_angles(nodes)
		basis = real_harmonics(self.max_degree, theta, phi)
		coeffs = vectors[:, :count]
		psi = (basis.T @ coeffs).T
		return mu[:count], psi, nodes, weights, coeffs

	def level_table(self, spectrum, nu_max):
		nu = spectrum.nu
		keep = nu <= nu_max
		count = int(np.count_nonzero(keep))
		if count == 0:
			raise DomainError("no angular modes below order {0}".format(nu_max))

		index = np.zeros(count, dtype=int)
		levelNu = [nu[0]]
		for k in range(1, count):
			if nu[k] - levelNu[-1] > 1e-8 * max(1.0, nu[k]):
				levelNu.append(nu[k])
			index[k] = len(levelNu) - 1

		mult = np.bincount(index)
		density = np.zeros((len(levelNu), spectrum.psi.shape[1]))
		np.add.at(density, index, np.abs(spectrum.psi[:count]) ** 2)
		sup = density.max(axis=1)

		if count < len(nu):
			nextNu = nu[count]
			nextMult = np.count_nonzero(
					np.abs(nu - nextNu) <= 1e-8 * max(1.0, nextNu))
			nextSup = float(np.max(np.abs(spectrum.psi[count]) ** 2)) * nextMult
		else:
			# Nothing computed beyond here; bound the unknown remainder by the
			# last level we have.
			nextNu = levelNu[-1]
			nextSup = sup[-1]

		return LevelTable(levelNu, mult, sup, np.arange(count), index,
				nextNu, nextSup)

	def level_products(self, spectrum, table, x, y):
		count = len(table.index)
		coeffs = spectrum.coeffs[:, :count]

		def modes(points):
			theta, phi = sphere_angles(points)
			basis = real_harmonics(self.max_degree, theta, phi)
			return np.moveaxis(basis, 0, -1) @ coeffs

		products = modes(x) * np.conj(modes(y))
		return products @ table.membership()


class FlatTorus(BaseSection):
	"""
	The flat torus with circles of the given radii, a constant potential a
	and a constant magnetic flux through both circles.

	Eigenfunctions are e^(i k.theta) / sqrt(|Y|) for k in Z^2, with
	eigenvalues ((k1 + f1)/ra)^2 + ((k2 + f2)/rb)^2 + a.
	"""

	__slots__ = [
			'radii',
			'a',
			'flux',
		]

	kind = C.FLAT_TORUS

	def __init__(self, radii=(1.0, 1.0), a=0.0, flux=(0.0, 0.0)):
		assert len(radii) == 2 and min(radii) > 0
		assert len(flux) == 2

		self.radii = tuple(float(r) for r in radii)
		self.a = float(a)
		self.flux = tuple(float(f) for f in flux)

	def to_dict(self):
		return {"kind": self.kind, "radii": list(self.radii), "a": self.a,
				"flux": list(self.flux)}

	def volume(self):
		return 4.0 * math.pi ** 2 * self.radii[0] * self.radii[1]

	def diameter(self):
		return math.pi * math.hypot(*self.radii)

	def base_point(self):
		return np.zeros(2)

	def point_at(self, distance):
		return np.array([(distance / self.radii[0]) % (2 * math.pi), 0.0])

	def distance(self, x, y):
		delta = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
		delta = (delta + np.pi) % (2 * np.pi) - np.pi
		return np.hypot(self.radii[0] * delta[..., 0],
				self.radii[1] * delta[..., 1])

	def quadrature(self, degree):
		count = degree + 1
		angles = 2 * np.pi * np.arange(count) / count
		first, second = np.meshgrid(angles, angles, indexing='ij')
		nodes = np.stack([first.ravel(), second.ravel()], axis=1)
		weights = np.full(len(nodes), self.volume() / count ** 2)
		return nodes, weights

	def node_gap(self, degree):
		# Half the diagonal of one cell of the flat grid.
		return math.pi * math.hypot(*self.radii) / (degree + 1)

	def eigenvalue(self, lattice):
		lattice = np.asarray(lattice, dtype=float)
		return (((lattice[..., 0] + self.flux[0]) / self.radii[0]) ** 2
				+ ((lattice[..., 1] + self.flux[1]) / self.radii[1]) ** 2
				+ self.a)

	def _lattice(self, mu_max):
		reach = math.sqrt(max(mu_max - self.a, 0.0))
		bound = [int(math.ceil(reach * r + abs(f))) + 1
				for r, f in zip(self.radii, self.flux)]
		first, second = np.meshgrid(
				np.arange(-bound[0], bound[0] + 1),
				np.arange(-bound[1], bound[1] + 1), indexing='ij')
		lattice = np.stack([first.ravel(), second.ravel()], axis=1)
		mu = self.eigenvalue(lattice)
		order = np.lexsort((lattice[:, 1], lattice[:, 0], mu))
		return lattice[order], mu[order]

	def solve(self, n, count, tolerance=None):
		muMax = self.a + 1.0
		while True:
			lattice, mu = self._lattice(muMax)
			if np.count_nonzero(mu <= muMax) >= count:
				break
			muMax = self.a + 2.0 * (muMax - self.a)

		lattice = lattice[:count]
		mu = mu[:count]
		top = int(np.max(np.abs(lattice)))
		nodes, weights = self.quadrature(2 * top + 1)
		psi = np.exp(1j * nodes @ lattice.T).T / math.sqrt(self.volume())
		return mu, psi, nodes, weights, lattice

	def level_table(self, spectrum, nu_max):
		shift = (spectrum.n - 2) ** 2 / 4.0
		muMax = nu_max ** 2 - shift
		lattice, mu = self._lattice(muMax + 4.0 * max(1.0, nu_max))
		keep = mu <= muMax
		levels, index = np.unique(np.round(mu[keep], 10), return_inverse=True)
		mult = np.bincount(index)
		beyond = mu[~keep]
		nextMu = beyond.min()
		nextMult = np.count_nonzero(np.abs(beyond - nextMu) < 1e-10)

		return LevelTable(
				np.sqrt(levels + shift), mult, mult / self.volume(),
				lattice[keep], index,
				math.sqrt(nextMu + shift), nextMult / self.volume(),
			)

	def level_products(self, spectrum, table, x, y):
		delta = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
		waves = np.exp(1j * delta @ table.members.T.astype(float))
		return waves @ table.membership() / self.volume()


class Spheroid(BaseSection):
	"""
	The spheroid (x^2 + y^2)/a^2 + z^2/c^2 = 1, used for geometry only.

	Points are embedded in R^3 with the polar axis last; distances between
	points are chords.
	"""

	__slots__ = [
			'equatorial',
			'polar',
		]

	kind = C.SPHEROID

	def __init__(self, equatorial=1.0, polar=1.0):
		assert equatorial > 0 and polar > 0

		self.equatorial = float(equatorial)
		self.polar = float(polar)

	def to_dict(self):
		return {"kind": self.kind, "equatorial": self.equatorial,
				"polar": self.polar}

	def meridian_length(self):
		"""
		Returns the perimeter of a meridian ellipse.
		"""
		big = max(self.equatorial, self.polar)
		small = min(self.equatorial, self.polar)
		return 4.0 * big * special.ellipe(1.0 - (small / big) ** 2)

	def volume(self):
		nodes, weights = self.quadrature(64)
		return float(weights.sum())

	def diameter(self):
		return max(math.pi * self.equatorial, 0.5 * self.meridian_length())

	def base_point(self):
		return np.array([self.equatorial, 0.0, 0.0])

	def point_at(self, distance):
		angle = distance / self.equatorial
		return self.equatorial * np.array(
				[math.cos(angle), math.sin(angle), 0.0])

	def distance(self, x, y):
		return np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)

	def embed(self, u, phi):
		"""
		Returns the points at reduced latitude u and longitude phi.
		"""
		a, c = self.equatorial, self.polar
		return np.stack([
				a * np.cos(u) * np.cos(phi),
				a * np.cos(u) * np.sin(phi),
				c * np.sin(u),
			], axis=-1)

	def quadrature(self, degree):
		count = degree // 2 + 1
		t, w = special.roots_legendre(count)
		u = 0.5 * np.pi * t
		longitudes = degree + 1
		phi = 2 * np.pi * np.arange(longitudes) / longitudes
		uu, pp = np.meshgrid(u, phi, indexing='ij')
		a, c = self.equatorial, self.polar
		area = (a * np.cos(uu) * np.sqrt((a * np.sin(uu)) ** 2
				+ (c * np.cos(uu)) ** 2))
		weights = (0.5 * np.pi * w[:, None] * area
				* 2 * np.pi / longitudes).ravel()
		return self.embed(uu.ravel(), pp.ravel()), weights

	def node_gap(self, degree):
		t, _ = special.roots_legendre(degree // 2 + 1)
		colatitude = 0.5 * np.pi * (1.0 - t)
		return grid_gap([colatitude], degree + 1,
				max(self.equatorial, self.polar), self.equatorial)


_SECTIONS = {
		C.ROUND_SPHERE: RoundSphere,
		C.GALERKIN_SPHERE2: GalerkinSphere,
		C.FLAT_TORUS: FlatTorus,
		C.SPHEROID: Spheroid,
	}


def section_from_dict(data, n=3):
	"""
	Returns the cross-section described by a config mapping.
	"""
	kind = data.get("kind")
	if kind == C.ROUND_SPHERE:
		return RoundSphere(data.get("dim", n - 1), data.get("radius", 1.0),
				data.get("a", 0.0))

	if kind == C.GALERKIN_SPHERE2:
		potential = data.get("a", 0.0)
		if not isinstance(potential, dict):
			potential = {"constant": potential}
		magnetic = data.get("magnetic", {"kind": C.MAGNETIC_NONE})
		return GalerkinSphere(
				data.get("max_degree", C.GALERKIN_DEGREE),
				potential.get("constant", 0.0),
				potential.get("harmonics", ()),
				magnetic.get("kind", C.MAGNETIC_NONE),
				magnetic.get("strength", 0.0),
			)

	if kind == C.FLAT_TORUS:
		return FlatTorus(data["radii"], data.get("a", 0.0),
				data.get("flux", (0.0, 0.0)))

	if kind == C.SPHEROID:
		return Spheroid(data["equatorial"], data["polar"])

	raise InvalidConfig("unknown section kind {0!r}".format(kind))


class AngularSpectrum(Record):
	"""
	Eigenpairs of the angular operator on a cross-section.

	Fields:
		n        cone dimension
		section  the cross-section
		mu       eigenvalues with multiplicity, nondecreasing
		nu       orders sqrt(mu + (n-2)^2/4)
		nodes    quadrature nodes on the section
		weights  quadrature weights
		psi      (K, N) eigenfunction samples on the nodes
		coeffs   kind-specific expansion data (Galerkin coefficients or torus
		         lattice points), or None
	"""

	__slots__ = [
			'n',
			'section',
			'mu',
			'nu',
			'nodes',
			'weights',
			'psi',
			'coeffs',
		]

	def __init__(self, n, section, mu, nu, nodes, weights, psi, coeffs=None):
		assert isinstance(n, int) and n >= 3
		assert isinstance(section, BaseSection)
		assert len(mu) == len(nu) == len(psi)
		assert np.all(np.diff(mu) >= -1e-9)

		self.n = n
		self.section = section
		self.mu = np.asarray(mu, dtype=float)
		self.nu = np.asarray(nu, dtype=float)
		self.nodes = np.asarray(nodes, dtype=float)
		self.weights = np.asarray(weights, dtype=float)
		self.psi = np.asarray(psi, dtype=complex)
		self.coeffs = coeffs

	def __len__(self):
		return len(self.mu)

	@property
	def nu0(self):
		return float(self.nu[0])

	@property
	def shift(self):
		return (self.n - 2) ** 2 / 4.0

	def levels(self, nu_max=None):
		"""
		Returns the LevelTable of every level with order <= nu_max.

		nu_max defaults to the largest computed order.
		"""
		if nu_max is None:
			nu_max = float(self.nu[-1])
		return self.section.level_table(self, nu_max)

	def level_products(self, x, y, table):
		"""
		Returns the level sums of psi(x) conj(psi(y)), shape (..., levels).
		"""
		return self.section.level_products(self, table, x, y)

	def project(self, samples):
		"""
		Returns the mode coefficients <f, psi_k> of node samples (..., N).
		"""
		return np.asarray(samples) @ (np.conj(self.psi) * self.weights).T

	def synthesize(self, coefficients):
		"""
		Returns node samples of sum_k c_k psi_k.
		"""
		return np.asarray(coefficients) @ self.psi

	def truncated(self, count):
		"""
		Returns the spectrum of the first count modes only.
		"""
		count = min(count, len(self))
		coeffs = self.coeffs
		if coeffs is not None and self.section.kind == C.GALERKIN_SPHERE2:
			coeffs = coeffs[:, :count]
		elif coeffs is not None:
			coeffs = coeffs[:count]
		return AngularSpectrum(self.n, self.section, self.mu[:count],
				self.nu[:count], self.nodes, self.weights, self.psi[:count],
				coeffs)

	def gram(self):
		"""
		Returns the quadrature Gram matrix of the sampled eigenfunctions.
		"""
		return (np.conj(self.psi) * self.weights) @ self.psi.T


def eigensolve(section, n, count, tolerance=None):
	"""
	Returns the AngularSpectrum of the first count eigenpairs on section,
	for a cone of dimension n.

	Raises PositivityViolation when mu_0 + (n-2)^2/4 is not strictly
	positive, and ConvergenceFailure when a Galerkin solve is not converged
	to tolerance.
	"""
	if count < 1:
		raise DomainError("count must be at least 1, not {0!r}".format(count))
	if section.kind == C.ROUND_SPHERE and section.dim != n - 1:
		raise DomainError("S^{0} is not the section of a cone of dimension "
				"{1}".format(section.dim, n))
	if section.kind in (C.GALERKIN_SPHERE2, C.FLAT_TORUS) and n != 3:
		raise DomainError("{0} is the section of a three-dimensional cone, "
				"not n={1}".format(section.kind, n))

	shift = (n - 2) ** 2 / 4.0
	mu, psi, nodes, weights, coeffs = section.solve(n, count, tolerance)

	mu0 = float(mu[0])
	if mu0 + shift <= C.POSITIVITY_EPS:
		raise PositivityViolation(mu0, shift)

	nu = np.sqrt(mu + shift)
	log.info("solved %d angular modes on %s: nu0 = %.6g", len(mu),
			section.kind, nu[0])
	return AngularSpectrum(n, section, mu, nu, nodes, weights, psi, coeffs)


def angular_multiplier(spectrum, F, x, y, nu_max=None, tolerance=None):
	"""
	Returns the kernel of F(sqrt P) at (x, y) as a truncated mode sum,

		sum over levels of F(nu) * sum_level psi(x) conj(psi(y)).

	The first level left out bounds the tail; TailEstimateExceeded is raised
	when |F(next nu)| * sup of that level exceeds tolerance relative to the
	sum.
	"""
	if tolerance is None:
		tolerance = C.DEFAULT_TOLERANCES["tail"]

	table = spectrum.levels(nu_max)
	products = spectrum.level_products(x, y, table)
	value = products @ np.asarray(F(table.nu), dtype=complex)

	tail = abs(complex(F(table.next_nu))) * table.next_sup
	log.debug("angular multiplier: %d levels, tail estimate %.3g",
			len(table), tail)
	if tail > tolerance * max(1.0, float(np.max(np.abs(value)))):
		raise TailEstimateExceeded("multiplier tail {0:.3g} exceeds "
				"tolerance {1:.3g}".format(tail, tolerance))

	if np.ndim(value) == 0:
		return complex(value)
	return value


def sufficient_levels(spectrum, nu_max, bound, tolerance=None):
	"""
	Returns (table, tail): the levels up to at least nu_max, extended until
	the first level left out contributes at most tolerance.

	bound(nu) bounds the mode factor an omitted level of order nu would
	carry; the tail is bound(next nu) times the sup of that level. Raises
	TailEstimateExceeded when the spectrum has no more levels to offer.
	"""
	if tolerance is None:
		tolerance = C.DEFAULT_TOLERANCES["tail"]

	while True:
		table = spectrum.levels(nu_max)
		tail = float(bound(table.next_nu)) * table.next_sup
		if tail <= tolerance:
			log.debug("mode sum: %d levels up to nu = %.4g, tail %.3g",
					len(table), table.nu[-1] if len(table) else 0.0, tail)
			return table, tail
		if len(table) and table.next_nu <= table.nu[-1]:
			raise TailEstimateExceeded("mode sum tail {0:.3g} exceeds "
					"tolerance {1:.3g} with all {2} computed modes".format(
						tail, tolerance, len(spectrum)))
		nu_max = table.next_nu + 10.0


def apply_multiplier(spectrum, F, samples):
	"""
	Applies F(sqrt P) to node samples through the computed modes.
	"""
	coefficients = spectrum.project(samples)
	return spectrum.synthesize(coefficients * F(spectrum.nu))


def verify_weyl(spectrum, band=(0.4, 2.6)):
	"""
	Returns a report on nu_k^2 / (1 + k)^(2/(n-1)) over k in [K/2, K).

	Weyl's law keeps the ratio in a bounded band; fewer than 50 modes are
	flagged insufficient.
	"""
	count = len(spectrum)
	k = np.arange(count // 2, count)
	ratios = spectrum.nu[k] ** 2 / (1.0 + k) ** (2.0 / (spectrum.n - 1))
	low, high = band
	return {
			"count": count,
			"sufficient": count >= 50,
			"min_ratio": float(ratios.min()),
			"max_ratio": float(ratios.max()),
			"band": [low, high],
			"within_band": bool(ratios.min() >= low and ratios.max() <= high),
		}


def verify_eigenfunction_bound(spectrum, growth=2.0):
	"""
	Returns a report on sup |psi_k| / (1 + nu_k^2)^((n-2)/4) over the nodes.

	The ratio is bounded in k; the report is flagged when the upper half of
	the spectrum exceeds the lower half by more than growth.
	"""
	sups = np.max(np.abs(spectrum.psi), axis=1)
	ratios = sups / (1.0 + spectrum.nu ** 2) ** ((spectrum.n - 2) / 4.0)
	half = max(1, len(ratios) // 2)
	lower = float(ratios[:half].max())
	upper = float(ratios[half:].max()) if len(ratios) > half else lower
	return {
			"count": len(ratios),
			"first_ratio": float(ratios[0]),
			"constant": float(ratios.max()),
			"lower_half_max": lower,
			"upper_half_max": upper,
			"bounded": upper <= growth * lower,
		}
