#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import math
import unittest

import numpy as np

from conespec import constants as C
from conespec import spectral as S
from conespec.geometry import chord_distance
from conespec.test.util import free_spectrum, potential_spectrum
from conespec.validate import DomainError, TruncationMismatch


def cone_point(r, angle):
	return (r, np.array([math.cos(angle), math.sin(angle), 0.0]))


class TestFreeCone(unittest.TestCase):
	"""
	C(S^2) with no potential is R^3, where everything is explicit.
	"""

	def setUp(self):
		self.spectrum = free_spectrum()
		self.x = cone_point(1.0, 0.0)
		self.y = cone_point(1.5, 1.0)
		self.distance = chord_distance(1.0, 1.5, 1.0)

	def testBesselSeries(self):
		"""
		The Bessel series is lambda sin(lambda D) / (2 pi^2 D).
		"""
		sample = S.spectral_measure_bessel(self.spectrum, 2.0, self.x, self.y)
		expected = S.free_spectral_measure(2.0, self.distance)
		self.assertEqual(sample.representation, C.BESSEL_SERIES)
		self.assertLess(abs(sample.value - expected), 1e-8 * abs(expected))

	def testDiagonal(self):
		"""
		On the diagonal the measure is lambda^2 / (2 pi^2).
		"""
		x = cone_point(1.0, 0.0)
		sample = S.spectral_measure_bessel(self.spectrum, 1.0, x, x)
		self.assertAlmostEqual(sample.value, 1.0 / (2 * math.pi ** 2),
				places=10)

	def testCheegerTaylorForm(self):
		"""
		The angular-integral form agrees with the series to 1e-3.
		"""
		series = S.spectral_measure_bessel(self.spectrum, 1.0, self.x, self.y)
		folded = S.spectral_measure_ct(self.spectrum, 1.0, self.x, self.y)
		self.assertEqual(folded.representation, C.CHEEGER_TAYLOR)
		self.assertLess(abs(folded.value - series.value),
				1e-3 * abs(series.value))

	def testOutgoingResolvent(self):
		"""
		R+ is e^(i lambda D) / (4 pi D).
		"""
		value = S.resolvent_kernel(self.spectrum, 1.0, 1, self.x, self.y)
		expected = S.free_resolvent(1.0, self.distance)
		self.assertLess(abs(value - expected), 1e-4 * abs(expected))

	def testStoneFormula(self):
		"""
		(lambda / (pi i)) (R+ - R-) reproduces the spectral measure.
		"""
		report = S.stone_check(self.spectrum, 1.0, [(self.x, self.y)])
		self.assertEqual(len(report["rows"]), 1)
		self.assertTrue(report["pass"])

	def testFreeStone(self):
		"""
		The closed forms satisfy Stone's formula exactly.
		"""
		plus = S.free_resolvent(1.5, 2.0, 1)
		minus = S.free_resolvent(1.5, 2.0, -1)
		self.assertAlmostEqual(1.5 / (math.pi * 1j) * (plus - minus),
				S.free_spectral_measure(1.5, 2.0), places=14)

	def testSampleRow(self):
		"""
		A sample becomes one row of the cross-check table.
		"""
		sample = S.spectral_measure_bessel(self.spectrum, 2.0, self.x, self.y)
		row = sample.row(self.spectrum.section)
		self.assertEqual(row[:3], (2.0, 1.0, 1.5))
		self.assertAlmostEqual(row[3], 1.0)
		self.assertEqual(row[6], C.BESSEL_SERIES)


class TestPotential(unittest.TestCase):

	def setUp(self):
		self.spectrum = potential_spectrum(-0.1875)
		self.x = cone_point(1.0, 0.0)
		self.y = cone_point(1.5, 0.7)

	def testRepresentationsAgree(self):
		"""
		With nu_0 = 1/4 the two forms still agree to 1e-3.
		"""
		series = S.spectral_measure_bessel(self.spectrum, 2.0, self.x, self.y)
		folded = S.spectral_measure_ct(self.spectrum, 2.0, self.x, self.y)
		self.assertLess(abs(folded.value - series.value),
				1e-3 * abs(series.value))

	def testRepresentationsAgreeOnAGrid(self):
		"""
		The two forms agree over five frequencies, nine radius pairs and
		three angles, relative to the size of the diagonal value.
		"""
		for lam in (0.5, 1.0, 1.5, 2.0, 2.5):
			scale = 0.1 * lam ** 2 / (2 * math.pi ** 2)
			for r1 in (1.0, 1.5, 2.0):
				for r2 in (1.0, 1.5, 2.0):
					for angle in (0.0, 0.7, 2.0):
						x = cone_point(r1, 0.0)
						y = cone_point(r2, angle)
						series = S.spectral_measure_bessel(self.spectrum, lam,
								x, y).value
						folded = S.spectral_measure_ct(self.spectrum, lam, x,
								y).value
						self.assertLessEqual(abs(folded - series),
								1e-3 * max(abs(series), scale),
								"lambda {0} radii {1}, {2} angle {3}".format(
								lam, r1, r2, angle))

	def testLowFrequencyExponent(self):
		"""
		|dE| / lambda^2 grows like (lambda^2 r1 r2)^(-1/4).
		"""
		report = S.low_frequency_profile(self.spectrum,
				np.geomspace(1e-3, 3e-2, 6), self.x, self.y)
		self.assertEqual(report["target"], -0.25)
		self.assertAlmostEqual(report["exponent"], -0.25, places=2)
		self.assertTrue(report["pass"])

	def testFreeLowFrequencyExponent(self):
		"""
		Without the potential the profile is flat.
		"""
		report = S.low_frequency_profile(free_spectrum(),
				np.geomspace(1e-3, 3e-2, 6), self.x, self.y)
		self.assertAlmostEqual(report["exponent"], 0.0, places=2)


class TestDomains(unittest.TestCase):

	def setUp(self):
		self.spectrum = free_spectrum()
		self.x = cone_point(1.0, 0.0)
		self.y = cone_point(1.5, 1.0)

	def testNonPositiveLambda(self):
		"""
		The measure lives on lambda > 0.
		"""
		with self.assertRaisesRegex(DomainError, "positive"):
			S.spectral_measure_bessel(self.spectrum, 0.0, self.x, self.y)

	def testResolventNeedsDistinctRadii(self):
		"""
		The resolvent series does not converge at r1 = r2.
		"""
		with self.assertRaisesRegex(DomainError, "r1 != r2"):
			S.resolvent_kernel(self.spectrum, 1.0, 1, self.x,
					cone_point(1.0, 1.0))
		with self.assertRaisesRegex(DomainError, r"\+1 or -1"):
			S.resolvent_kernel(self.spectrum, 1.0, 0, self.x, self.y)

	def testTruncationMismatch(self):
		"""
		Different cutoffs for the two branches are refused.
		"""
		with self.assertRaises(TruncationMismatch):
			S.spectral_measure_ct(self.spectrum, 1.0, self.x, self.y,
					cutoffs=(5.0, 40.0))

	def testFreeResolventAtCoincidence(self):
		"""
		The free resolvent is singular on the diagonal.
		"""
		with self.assertRaisesRegex(DomainError, "singular"):
			S.free_resolvent(1.0, 0.0)


class TestOscillatoryIntegral(unittest.TestCase):

	def testDecayAwayFromTheLightCone(self):
		"""
		W(t, 0) is small once t is far from v = 0.
		"""
		near = abs(S.oscillatory_w(0.0, 0.0))
		far = abs(S.oscillatory_w(40.0, 0.0))
		self.assertGreater(near, 0.0)
		self.assertLess(far, 0.1 * near)

	def testEnvelopeCoversSamples(self):
		"""
		The envelope bounds every weighted sample it was built from.
		"""
		envelope = S.w_envelope([0.0, 5.0], [0.0, 5.0])
		value = abs(S.oscillatory_w(5.0, 5.0))
		self.assertGreaterEqual(envelope, value * math.sqrt(6.0))

	def testNegativeLength(self):
		"""
		v is a length.
		"""
		with self.assertRaisesRegex(DomainError, "v >= 0"):
			S.oscillatory_w(1.0, -1.0)


if __name__ == "__main__":
	unittest.main()
