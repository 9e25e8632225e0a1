# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Geodesics of the cross-section and the chord lengths of the cone.

Round spheres and flat tori are handled in closed form. Spheroids are
integrated numerically as embedded surfaces in R^3:

	p'' = -(sum h v^2) / (sum h^2 p^2) * h p,    h = (1/a^2, 1/a^2, 1/c^2)

keeps a unit-speed curve on the level set sum h p^2 = 1, and the normal
Jacobi field obeys J'' = -K(p) J along it.
"""
import logging
import math
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from conespec import constants as C
from conespec.crosssection import (
		FlatTorus,
		GalerkinSphere,
		RoundSphere,
		Spheroid,
	)
from conespec.util import Record
from conespec.validate import (
		CoverFailure,
		DomainError,
		Inconclusive,
		IntegratorFailure,
		ShootingNonconvergence,
	)


log = logging.getLogger(__name__)

# Angular slack when deciding that s lies on [0, pi].
_PI_SLACK = 1e-12


class ConeChord(Record):
	"""
	The two chord vectors of the cone between (r1, x) and (r2, y) at angular
	separation s, and their lengths.

		m_s = (r1 - r2, sqrt(2 (1 - cos s) r1 r2)),   d = |m_s|
		n_s = (r1 + r2, sqrt(2 (cosh s - 1) r1 r2)),  d_tilde = |n_s|
	"""

	__slots__ = [
			'r1',
			'r2',
			's',
			'm_s',
			'n_s',
			'd',
			'd_tilde',
		]

	def __init__(self, r1, r2, s, m_s, n_s, d, d_tilde):
		assert r1 > 0 and r2 > 0
		assert s >= 0

		self.r1 = r1
		self.r2 = r2
		self.s = s
		self.m_s = m_s
		self.n_s = n_s
		self.d = d
		self.d_tilde = d_tilde


def chord_distance(r1, r2, s):
	"""
	Returns d(s; r1, r2) = sqrt(r1^2 + r2^2 - 2 r1 r2 cos s), s in [0, pi].
	"""
	s = np.asarray(s, dtype=float)
	if np.any(s < 0) or np.any(s > np.pi + _PI_SLACK):
		raise DomainError("the m_s chord needs s in [0, pi]")
	half = np.sin(0.5 * s)
	res = np.sqrt((r1 - r2) ** 2 + 4.0 * r1 * r2 * half * half)
	if np.ndim(res) == 0:
		return float(res)
	return res


def poisson_distance(r1, r2, s):
	"""
	Returns d_tilde(s; r1, r2) = sqrt(r1^2 + r2^2 + 2 r1 r2 cosh s), s >= 0.
	"""
	s = np.asarray(s, dtype=float)
	if np.any(s < 0):
		raise DomainError("the n_s chord needs s >= 0")
	half = np.sinh(0.5 * s)
	res = np.sqrt((r1 + r2) ** 2 + 4.0 * r1 * r2 * half * half)
	if np.ndim(res) == 0:
		return float(res)
	return res


def cone_chord(r1, r2, s):
	"""
	Returns the ConeChord for radii r1, r2 > 0 and separation s in [0, pi].
	"""
	if not r1 > 0 or not r2 > 0:
		raise DomainError("cone radii must be positive, not {0!r}, "
				"{1!r}".format(r1, r2))
	if not 0 <= s <= math.pi + _PI_SLACK:
		raise DomainError("the m_s chord needs s in [0, pi], not "
				"{0!r}".format(s))

	m_s = (r1 - r2, 2.0 * math.sqrt(r1 * r2) * math.sin(0.5 * s))
	n_s = (r1 + r2, 2.0 * math.sqrt(r1 * r2) * math.sinh(0.5 * s))
	return ConeChord(r1, r2, s, m_s, n_s, math.hypot(*m_s), math.hypot(*n_s))


class GeodesicRecord(Record):
	"""
	One geodesic of the cross-section, from start along covector.

	degenerate marks a record standing for a whole family of geodesics of
	the same length, such as the meridians joining antipodal points.
	"""

	__slots__ = [
			'start',
			'covector',
			'length',
			'arrival',
			'arrival_covector',
			'conjugate',
			'degenerate',
		]

	def __init__(self, start, covector, length, arrival, arrival_covector,
			conjugate=False, degenerate=False):
		assert length >= 0

		self.start = np.asarray(start, dtype=float)
		self.covector = np.asarray(covector, dtype=float)
		self.length = float(length)
		self.arrival = np.asarray(arrival, dtype=float)
		self.arrival_covector = np.asarray(arrival_covector, dtype=float)
		self.conjugate = bool(conjugate)
		self.degenerate = bool(degenerate)


def default_horizon(epsilon=C.HORIZON_EPSILON):
	return math.pi + epsilon


def _is_sphere(section):
	return isinstance(section, (RoundSphere, GalerkinSphere))


def _unit(vector):
	return vector / np.linalg.norm(vector)


def _orthogonal(vector):
	"""
	Returns some unit vector orthogonal to vector.
	"""
	axis = np.zeros(len(vector))
	axis[int(np.argmin(np.abs(vector)))] = 1.0
	return _unit(axis - np.dot(axis, vector) * vector / np.dot(vector, vector))


def _as_spheroid(section):
	"""
	Returns (spheroid, scale) reproducing a two-dimensional sphere as an
	embedded surface; points of the sphere map to scale * point.
	"""
	if isinstance(section, Spheroid):
		return section, 1.0
	if _is_sphere(section) and section.dim == 2:
		return Spheroid(section.radius, section.radius), section.radius
	raise DomainError("no embedded flow for {0} cross-sections".format(
		section.kind))


# Round spheres -------------------------------------------------------------

def _sphere_flow(section, start, covector, length):
	start = _unit(np.asarray(start, dtype=float))
	covector = np.asarray(covector, dtype=float)
	direction = _unit(covector - np.dot(covector, start) * start)
	angle = length / section.radius
	arrival = math.cos(angle) * start + math.sin(angle) * direction
	velocity = -math.sin(angle) * start + math.cos(angle) * direction
	conjugate = length > 0 and abs(math.sin(angle)) < 1e-9
	return GeodesicRecord(start, direction, length, arrival, velocity,
			conjugate)


def _sphere_spectrum(section, x, y, horizon):
	x = _unit(np.asarray(x, dtype=float))
	y = _unit(np.asarray(y, dtype=float))
	rho = section.radius
	angle = float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))
	towards = x - np.dot(x, y) * y
	singular = np.linalg.norm(towards) < 1e-12
	direction = _orthogonal(y) if singular else _unit(towards)

	res = []
	if angle < 1e-12:
		res.append(GeodesicRecord(y, direction, 0.0, y, direction))
		lengths = [(2 * math.pi * k, True) for k in range(1, int(
				horizon / (2 * math.pi * rho)) + 2)]
	elif math.pi - angle < 1e-12:
		lengths = [((2 * k + 1) * math.pi, True) for k in range(int(
				horizon / (2 * math.pi * rho)) + 2)]
	else:
		lengths = []
		for k in range(int(horizon / (2 * math.pi * rho)) + 2):
			lengths.append((angle + 2 * math.pi * k, False))
			lengths.append((2 * math.pi * (k + 1) - angle, False))

	for unscaled, degenerate in sorted(lengths):
		length = rho * unscaled
		if length >= horizon:
			continue
		start = direction
		if not degenerate and math.sin(unscaled) < 0:
			# The long way round leaves y in the opposite direction.
			start = -direction
		record = _sphere_flow(section, y, start, length)
		record.degenerate = degenerate
		record.conjugate = degenerate
		res.append(record)

	return res


# Flat tori -----------------------------------------------------------------

def _torus_flow(section, start, covector, length):
	radii = np.array(section.radii)
	direction = _unit(np.asarray(covector, dtype=float))
	arrival = (np.asarray(start, dtype=float) + length * direction / radii)
	return GeodesicRecord(start, direction, length,
			arrival % (2 * np.pi), direction)


def _torus_spectrum(section, x, y, horizon):
	radii = np.array(section.radii)
	delta = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
	delta = (delta + np.pi) % (2 * np.pi) - np.pi
	reach = [int(math.ceil(horizon / (2 * math.pi * r))) + 1 for r in radii]

	res = []
	for m in range(-reach[0], reach[0] + 1):
		for k in range(-reach[1], reach[1] + 1):
			lift = radii * (delta + 2 * np.pi * np.array([m, k]))
			length = float(np.linalg.norm(lift))
			if length >= horizon:
				continue
			direction = (lift / length if length > 0
					else np.array([1.0, 0.0]))
			res.append(_torus_flow(section, y, direction, length))

	res.sort(key=lambda record: record.length)
	return res


# Spheroids -----------------------------------------------------------------

class _EmbeddedFlow(object):
	"""
	Internal class.

	The geodesic and Jacobi equations of a spheroid, vectorised over a batch
	of geodesics stored as consecutive blocks of the state vector.
	"""

	def __init__(self, spheroid):
		a, c = spheroid.equatorial, spheroid.polar
		self.spheroid = spheroid
		self.h = np.array([1 / a ** 2, 1 / a ** 2, 1 / c ** 2])[:, None]
		self.curvatureScale = a ** 4 * c ** 2

	def normal(self, p):
		return _unit(self.h[:, 0] * p)

	def curvature(self, p):
		total = np.sum(self.h * self.h * p * p, axis=0)
		return 1.0 / (self.curvatureScale * total * total)

	def _acceleration(self, p, v):
		coeff = (np.sum(self.h * v * v, axis=0)
				/ np.sum(self.h * self.h * p * p, axis=0))
		return -coeff * self.h * p

	def geodesic(self, s, state):
		block = state.reshape(6, -1)
		p, v = block[:3], block[3:]
		return np.concatenate([v, self._acceleration(p, v)]).ravel()

	def jacobi(self, s, state):
		p, v = state[:3, None], state[3:6, None]
		acc = self._acceleration(p, v)[:, 0]
		return np.concatenate([
				state[3:6], acc,
				[state[7], -self.curvature(p)[0] * state[6]],
			])

	def tangent_frame(self, point):
		normal = self.normal(point)
		first = _orthogonal(normal)
		return first, np.cross(normal, first)

	def directions(self, point, betas):
		first, second = self.tangent_frame(point)
		return (np.cos(betas)[:, None] * first
				+ np.sin(betas)[:, None] * second)

	def solve(self, point, directions, length, dense=True):
		count = len(directions)
		state = np.concatenate([
				np.repeat(point[:, None], count, axis=1),
				directions.T,
			]).ravel()
		sol = integrate.solve_ivp(self.geodesic, (0.0, length), state,
				method='RK45', rtol=C.FLOW_RTOL, atol=C.FLOW_ATOL,
				dense_output=dense)
		if sol.status < 0:
			raise IntegratorFailure("geodesic flow failed: {0}".format(
				sol.message))
		return sol


def _tangent_covector(flow, point, covector):
	normal = flow.normal(point)
	covector = np.asarray(covector, dtype=float)
	return _unit(covector - np.dot(covector, normal) * normal)


def _spheroid_flow(spheroid, start, covector, length):
	flow = _EmbeddedFlow(spheroid)
	start = np.asarray(start, dtype=float)
	direction = _tangent_covector(flow, start, covector)
	state = np.concatenate([start, direction, [0.0, 1.0]])
	sol = integrate.solve_ivp(flow.jacobi, (0.0, length), state,
			method='RK45', rtol=C.FLOW_RTOL, atol=C.FLOW_ATOL)
	if sol.status < 0:
		raise IntegratorFailure("geodesic flow failed: {0}".format(
			sol.message))
	end = sol.y[:, -1]
	return GeodesicRecord(start, direction, length, end[:3], end[3:6],
			conjugate=length > 0 and abs(end[6]) < 1e-6)


def _sample(sol, length, samples=2048):
	"""
	Internal function.

	Returns the arc-length grid and the (6, batch, samples) states on it.
	"""
	grid = np.linspace(0.0, length, samples)
	return grid, sol.sol(grid).reshape(6, -1, samples)


def _approaches(flow, target, sol, index, sampled):
	"""
	Internal function.

	Returns (s, lateral offset, miss distance) for every local minimum of
	the distance from geodesic index of sol to target.
	"""
	grid, states = sampled
	block = states[:, index]
	p, v = block[:3], block[3:]
	approach = np.sum((p - target[:, None]) * v, axis=0)

	def closing(s):
		state = sol.sol(s).reshape(6, -1)[:, index]
		return np.dot(state[:3] - target, state[3:])

	res = []
	turns = np.nonzero((approach[:-1] < 0) & (approach[1:] >= 0))[0]
	for i in turns:
		if grid[i + 1] < 1e-8:
			continue
		s = optimize.brentq(closing, grid[i], grid[i + 1], xtol=1e-14)
		state = sol.sol(s).reshape(6, -1)[:, index]
		offset = state[:3] - target
		side = np.cross(flow.normal(state[:3]), state[3:])
		res.append((s, float(np.dot(offset, side)),
				float(np.linalg.norm(offset))))
	return res


def _spheroid_spectrum(spheroid, x, y, horizon, samples=C.SHOOTING_SAMPLES):
	flow = _EmbeddedFlow(spheroid)
	x = np.asarray(x, dtype=float)
	y = np.asarray(y, dtype=float)
	scale = max(spheroid.equatorial, spheroid.polar)

	betas = 2 * np.pi * np.arange(samples) / samples
	sol = flow.solve(y, flow.directions(y, betas), horizon)
	sampled = _sample(sol, horizon)
	table = [_approaches(flow, x, sol, j, sampled) for j in range(samples)]
	log.debug("shot %d geodesics to length %.4g", samples, horizon)

	res = []
	if np.linalg.norm(x - y) < 1e-12 * scale:
		direction = flow.tangent_frame(y)[0]
		res.append(GeodesicRecord(y, direction, 0.0, y, direction))

	depth = max(len(row) for row in table) if table else 0
	for i in range(depth):
		hits = [row[i] for row in table if len(row) > i]
		close = [hit for hit in hits
				if abs(hit[1]) < 1e-6 * scale and hit[2] < 1e-6 * scale]
		if len(close) > 0.9 * samples:
			length = float(np.median([hit[0] for hit in close]))
			direction = flow.directions(y, betas[:1])[0]
			record = _spheroid_flow(spheroid, y, direction, length)
			record.degenerate = True
			record.conjugate = True
			res.append(record)
			continue
		res.extend(_shoot_level(flow, x, y, betas, table, i, horizon, scale))

	res.sort(key=lambda record: record.length)
	return res


def _shoot_level(flow, x, y, betas, table, level, horizon, scale):
	"""
	Internal function.

	Refines every sign change of the lateral offset of the level-th closest
	approach between neighbouring initial directions.
	"""
	samples = len(betas)
	step = 2 * np.pi / samples
	res = []

	for j in range(samples):
		here = table[j]
		there = table[(j + 1) % samples]
		if len(here) <= level or len(there) <= level:
			continue
		s0, e0, miss0 = here[level]
		s1, e1, miss1 = there[level]
		if e0 * e1 > 0 or max(miss0, miss1) > 0.25 * scale:
			continue
		if abs(s0 - s1) > 0.1 * horizon:
			continue

		guess = 0.5 * (s0 + s1)

		def offset(beta):
			direction = flow.directions(y, np.array([beta]))
			single = flow.solve(y, direction, horizon)
			found = _approaches(flow, x, single, 0, _sample(single, horizon))
			if not found:
				raise ShootingNonconvergence("lost the closest approach "
						"while refining the initial direction")
			return min(found, key=lambda hit: abs(hit[0] - guess))

		lo, hi = betas[j], betas[j] + step
		if offset(lo)[1] * offset(hi)[1] > 0:
			continue
		try:
			beta = optimize.brentq(lambda b: offset(b)[1], lo, hi,
					xtol=1e-13)
		except (ValueError, RuntimeError) as exc:
			raise ShootingNonconvergence("initial direction did not "
					"converge: {0}".format(exc))

		length, _, miss = offset(beta)
		if miss > 1e-6 * scale:
			continue
		direction = flow.directions(y, np.array([beta]))[0]
		res.append(_spheroid_flow(flow.spheroid, y, direction, length))

	return res


# Public operations ---------------------------------------------------------

def geodesic_flow(section, start, covector, length):
	"""
	Returns the GeodesicRecord of the unit-speed geodesic from start along
	covector, followed for the given length.
	"""
	if length < 0:
		raise DomainError("geodesic length must be nonnegative")
	if _is_sphere(section):
		return _sphere_flow(section, start, covector, length)
	if isinstance(section, FlatTorus):
		return _torus_flow(section, start, covector, length)
	return _spheroid_flow(section, start, covector, length)


def distance_spectrum(section, x, y, horizon=None, numeric=False):
	"""
	Returns the GeodesicRecords of all geodesics from y to x shorter than
	horizon (pi + C.HORIZON_EPSILON by default), shortest first.

	A continuum of geodesics of one length comes back as a single record
	flagged degenerate. numeric forces the shooting method on a
	two-dimensional round sphere, which otherwise has closed forms.
	"""
	if horizon is None:
		horizon = default_horizon()

	if isinstance(section, FlatTorus):
		return _torus_spectrum(section, x, y, horizon)
	if _is_sphere(section) and not numeric:
		return _sphere_spectrum(section, x, y, horizon)

	spheroid, scale = _as_spheroid(section)
	records = _spheroid_spectrum(spheroid, scale * np.asarray(x, dtype=float),
			scale * np.asarray(y, dtype=float), horizon)
	if scale != 1.0:
		for record in records:
			record.start = record.start / scale
			record.arrival = record.arrival / scale
	return records


def _clairaut_integrals(spheroid, kappa):
	"""
	Internal function.

	Returns (longitude advance, arc length) over one full latitude
	oscillation of the geodesic with Clairaut constant kappa.
	"""
	a, c = spheroid.equatorial, spheroid.polar
	top = math.acos(kappa / a)

	def stretch(u):
		return np.sqrt((a * np.sin(u)) ** 2 + (c * np.cos(u)) ** 2)

	def root(u):
		# sqrt(R^2 - kappa^2) / sqrt(top - u)
		return a * np.sqrt(np.sinc((top - u) / np.pi) * np.sin(top + u))

	advance, _ = integrate.quad(
			lambda u: kappa * stretch(u) / (a * np.cos(u) * root(u)),
			0.0, top, weight='alg', wvar=(0.0, -0.5))
	arc, _ = integrate.quad(
			lambda u: stretch(u) * a * np.cos(u) / root(u),
			0.0, top, weight='alg', wvar=(0.0, -0.5))
	return 4.0 * advance, 4.0 * arc


def _spheroid_orbits(spheroid, horizon, samples=200):
	"""
	Internal function.

	Returns (lengths, coverage) of the closed geodesics of a spheroid shorter
	than horizon. coverage is the fraction of the sampled Clairaut range on
	which the longitude advance was monotone, so that no root could hide.
	"""
	a, c = spheroid.equatorial, spheroid.polar
	lengths = [2 * math.pi * a, spheroid.meridian_length()]

	kappas = a * np.linspace(1e-3, 1 - 1e-3, samples)
	values = np.array([_clairaut_integrals(spheroid, k) for k in kappas])
	advance, arc = values[:, 0], values[:, 1]
	steps = np.diff(advance)
	coverage = max(np.mean(steps > 0), np.mean(steps < 0))

	shortest = float(arc.min())
	for q in range(1, int(horizon / shortest) + 1):
		for p in range(1, int(advance.max() * q / (2 * math.pi)) + 2):
			target = 2 * math.pi * Fraction(p, q)
			if Fraction(p, q).denominator != q:
				continue
			gaps = advance - float(target)
			for i in np.nonzero(gaps[:-1] * gaps[1:] < 0)[0]:
				kappa = optimize.brentq(
						lambda k: _clairaut_integrals(spheroid, k)[0]
							- float(target),
						kappas[i], kappas[i + 1], xtol=1e-12)
				lengths.append(q * _clairaut_integrals(spheroid, kappa)[1])

	res = set()
	for length in lengths:
		k = 1
		while k * length < horizon:
			res.add(round(k * length, 12))
			k += 1
	return sorted(res), float(coverage)


def closed_geodesics(section, horizon):
	"""
	Returns (lengths, coverage): the sorted lengths of closed geodesics
	shorter than horizon, and the confidence in [0, 1] that none was
	missed. Closed-form families always have coverage 1.
	"""
	if _is_sphere(section):
		step = 2 * math.pi * section.radius
		return [step * k for k in range(1, int(horizon / step) + 2)
				if step * k < horizon], 1.0

	if isinstance(section, FlatTorus):
		ra, rb = section.radii
		reach = [int(horizon / (2 * math.pi * r)) + 1 for r in (ra, rb)]
		lengths = set()
		for m in range(0, reach[0] + 1):
			for k in range(-reach[1], reach[1] + 1):
				if m == 0 and k <= 0:
					continue
				length = 2 * math.pi * math.hypot(m * ra, k * rb)
				if length < horizon:
					lengths.add(round(length, 12))
		return sorted(lengths), 1.0

	a, c = section.equatorial, section.polar
	if abs(a - c) < 1e-12 * a:
		return closed_geodesics(RoundSphere(2, a), horizon)
	return _spheroid_orbits(section, horizon)


def length_spectrum(section, horizon):
	"""
	Returns the sorted lengths of closed geodesics shorter than horizon.
	"""
	return closed_geodesics(section, horizon)[0]


def check_nrec(section, horizon=math.pi + 2.0, coverage_floor=0.9):
	"""
	Returns a report on whether pi stays away from the closed-geodesic length
	spectrum: holds, and delta0, the distance from pi to the spectrum clamped
	to 1.

	Raises Inconclusive when a numeric search covered too little of the
	Clairaut range to rule out lengths near pi.
	"""
	lengths, coverage = closed_geodesics(section, horizon)
	if coverage < coverage_floor:
		raise Inconclusive("closed-orbit search covered {0:.0%} of the "
				"Clairaut range".format(coverage))

	gap = min([abs(length - math.pi) for length in lengths] + [math.inf])
	delta0 = min(gap, 1.0)
	return {
			"holds": bool(gap > 1e-9),
			"delta0": delta0,
			"lengths": lengths,
			"coverage": coverage,
		}


def conjugate_radius(section, start=None, covector=None, horizon=None):
	"""
	Returns the first zero of the normal Jacobi field J with J(0) = 0,
	J'(0) = 1 along the geodesic from start along covector, or inf when there
	is none shorter than horizon.
	"""
	if horizon is None:
		horizon = default_horizon()

	if _is_sphere(section):
		radius = math.pi * section.radius
		return radius if radius < horizon else math.inf
	if isinstance(section, FlatTorus):
		return math.inf

	spheroid = section
	flow = _EmbeddedFlow(spheroid)
	if start is None:
		start = spheroid.base_point()
	start = np.asarray(start, dtype=float)
	if covector is None:
		covector = flow.tangent_frame(start)[0]
	direction = _tangent_covector(flow, start, covector)

	def focus(s, state):
		return state[6]
	focus.terminal = True
	focus.direction = -1

	state = np.concatenate([start, direction, [0.0, 1.0]])
	sol = integrate.solve_ivp(flow.jacobi, (0.0, horizon), state,
			method='RK45', rtol=C.FLOW_RTOL, atol=C.FLOW_ATOL, events=focus)
	if sol.status < 0:
		raise IntegratorFailure("Jacobi equation failed: {0}".format(
			sol.message))
	if len(sol.t_events[0]):
		return float(sol.t_events[0][0])
	return math.inf


def check_nfc_sufficient(K_min, K_max, simply_connected):
	"""
	Returns True when the sectional curvature bounds alone guarantee the
	non-focusing condition: K_max < 1, or a simply connected section with
	1/2 <= K_min and K_max < 2.
	"""
	if K_max < 1:
		return True
	return bool(simply_connected and 0.5 <= K_min and K_max < 2)


def curvature_bounds(section):
	"""
	Returns (K_min, K_max, simply_connected) for the known families.
	"""
	if _is_sphere(section):
		curvature = 1.0 / section.radius ** 2
		return curvature, curvature, True
	if isinstance(section, FlatTorus):
		return 0.0, 0.0, False

	a, c = section.equatorial, section.polar
	pole = c * c / a ** 4
	equator = 1.0 / (c * c)
	return min(pole, equator), max(pole, equator), True


def max_patch_diameter(section):
	"""
	Returns the largest patch diameter the microlocalizers may use: below the
	conjugate radius and half the shortest closed geodesic, and below
	delta0 / 2 when NREC holds.
	"""
	_, top, _ = curvature_bounds(section)
	bounds = [math.pi / math.sqrt(top) if top > 0 else math.inf]

	lengths, _ = closed_geodesics(section, 2 * math.pi * 8)
	if lengths:
		bounds.append(0.5 * lengths[0])

	report = check_nrec(section)
	if report["holds"]:
		bounds.append(0.5 * report["delta0"])
	return min(bounds)


class Microlocalizers(Record):
	"""
	A smooth partition of unity Q_j on the cross-section, built from bumps
	on geodesic balls of radius R around the centres.

	values holds Q_j at the section's quadrature nodes, shape (F, N).
	"""

	__slots__ = [
			'section',
			'centres',
			'radius',
			'nodes',
			'weights',
			'values',
		]

	def __init__(self, section, centres, radius, nodes, weights, values):
		assert values is None or len(centres) == len(values)
		assert radius > 0

		self.section = section
		self.centres = np.asarray(centres, dtype=float)
		self.radius = float(radius)
		self.nodes = nodes
		self.weights = weights
		self.values = values

	def __len__(self):
		return len(self.centres)

	def _bumps(self, points):
		points = np.asarray(points, dtype=float)
		if math.isinf(self.radius):
			return np.ones((1,) + points.shape[:-1])
		shape = (-1,) + (1,) * (points.ndim - 1) + (self.centres.shape[-1],)
		res = np.empty((len(self.centres),) + points.shape[:-1])
		for start in range(0, len(self.centres), C.BUMP_CHUNK):
			centres = self.centres[start:start + C.BUMP_CHUNK]
			distance = self.section.distance(points[None, ...],
					centres.reshape(shape))
			scaled = np.clip(distance / self.radius, 0.0, 1.0)
			block = np.zeros_like(scaled)
			inside = scaled < 1
			block[inside] = np.exp(-1.0 / (1.0 - scaled[inside] ** 2))
			res[start:start + len(centres)] = block
		return res

	def evaluate(self, points):
		"""
		Returns every Q_j at the given points, shape (F, ...).
		"""
		bumps = self._bumps(points)
		total = bumps.sum(axis=0)
		if np.any(total <= 0):
			raise CoverFailure("points outside every patch")
		return bumps / total

	def weight(self, j, points):
		"""
		Returns Q_j at the given points.
		"""
		return self.evaluate(points)[j]


def _cover_degree(section, radius, degree):
	"""
	Internal function.

	Returns the first quadrature degree from degree up whose nodes lie within
	radius / 2 of every point of the section.
	"""
	while section.node_gap(degree) > 0.5 * radius:
		if degree >= C.MAX_COVER_DEGREE:
			raise CoverFailure("patches of radius {0:.4g} need a node grid "
					"finer than degree {1}".format(radius, C.MAX_COVER_DEGREE))
		degree = min(int(1.1 * degree) + 1, C.MAX_COVER_DEGREE)
	return degree


def build_microlocalizers(section, patch_diameter, degree=24):
	"""
	Returns Microlocalizers whose patches have the given diameter, with their
	values tabulated on quadrature(degree).

	Centres are placed by farthest-point sampling on a node grid fine enough
	that every point of the section lies within some gap g < radius / 2 of a
	node; sampling stops once every node is within 0.99 radius - g of a
	centre, so every point of the section lies strictly inside some patch.

	Diameters at or above max_patch_diameter() are built all the same, with
	a warning: the bound is what the dispersive estimates need, not what a
	partition of unity needs.
	"""
	if not patch_diameter > 0:
		raise CoverFailure("patch diameter must be positive, not "
				"{0!r}".format(patch_diameter))

	limit = None
	try:
		limit = max_patch_diameter(section)
	except (DomainError, Inconclusive):
		pass
	if limit is not None and patch_diameter >= limit:
		log.warning("patch diameter %.4g is not below the bound %.4g",
				patch_diameter, limit)

	nodes, weights = section.quadrature(degree)
	if patch_diameter >= section.diameter():
		return Microlocalizers(section, [section.base_point()], math.inf,
				nodes, weights, np.ones((1, len(nodes))))

	radius = 0.5 * patch_diameter
	fine = _cover_degree(section, radius, degree)
	candidates, _ = section.quadrature(fine)
	reach = 0.99 * radius - section.node_gap(fine)

	centres = [0]
	nearest = section.distance(candidates, candidates[0])
	while nearest.max() > reach:
		index = int(np.argmax(nearest))
		centres.append(index)
		nearest = np.minimum(nearest,
				section.distance(candidates, candidates[index]))
	log.debug("%d centres from %d nodes of degree %d", len(centres),
			len(candidates), fine)

	res = Microlocalizers(section, candidates[centres], radius, nodes,
			weights, None)
	bumps = res._bumps(nodes)
	total = bumps.sum(axis=0)
	if np.any(total <= 0):
		raise CoverFailure("{0} quadrature nodes left uncovered".format(
			int(np.count_nonzero(total <= 0))))
	res.values = bumps / total
	log.info("built %d microlocalizers of diameter %.4g", len(centres),
			patch_diameter)
	return res
