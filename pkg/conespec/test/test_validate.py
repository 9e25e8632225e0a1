#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import math
import unittest

from conespec import constants as C
from conespec import validate as V
from conespec.test.util import load_config


class TestExitCodes(unittest.TestCase):

	def testConfigErrorsAreUsageErrors(self):
		"""
		Malformed configurations and bundles exit with 1.
		"""
		self.assertEqual(V.exit_code(V.InvalidConfig("x")), C.EXIT_USAGE)
		self.assertEqual(V.exit_code(V.CorruptBundle("x")), C.EXIT_USAGE)

	def testDomainErrorsExitWithTwo(self):
		"""
		Violated preconditions exit with 2.
		"""
		self.assertEqual(V.exit_code(V.PositivityViolation(-0.25, 0.25)),
				C.EXIT_DOMAIN)
		self.assertEqual(V.exit_code(V.InadmissiblePair("x")), C.EXIT_DOMAIN)

	def testNumericalFailuresExitWithThree(self):
		"""
		Exhausted numerical budgets exit with 3.
		"""
		for cls in (V.ConvergenceFailure, V.TailEstimateExceeded,
				V.QuadratureBudgetExceeded, V.WindowTooShort, V.Inconclusive):
			self.assertEqual(V.exit_code(cls("x")), C.EXIT_NUMERICAL)

	def testPositivityViolationCarriesMu0(self):
		"""
		The offending eigenvalue is kept on the exception.
		"""
		exc = V.PositivityViolation(-0.25, 0.25)
		self.assertEqual(exc.mu0, -0.25)
		self.assertIn("not strictly positive", str(exc))


class TestCheckConfig(unittest.TestCase):

	def testDefaultsAreMaterialised(self):
		"""
		An empty config is the free three-dimensional cone with defaults.
		"""
		config = V.check_config({})
		self.assertEqual(config["n"], 3)
		self.assertEqual(config["section"]["kind"], C.ROUND_SPHERE)
		self.assertEqual(config["tolerances"], C.DEFAULT_TOLERANCES)
		self.assertEqual(config["pair_values"],
				[(math.inf, 2.0, 0.0), (4.0, 4.0, 0.5)])

	def testFixtureConfig(self):
		"""
		The fixture config keeps its values and gains the rest.
		"""
		config = V.check_config(load_config("free_sphere"))
		self.assertEqual(config["count"], 100)
		self.assertEqual(config["lambdas"], [1.0, 2.0])
		self.assertEqual(config["window"], C.STRICHARTZ_WINDOW)

	def testUnknownKeysAreRejected(self):
		"""
		A misspelt key is an error, not a silent default.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "secton"):
			V.check_config(load_config("malformed"))

	def testUnknownSectionKind(self):
		"""
		Only the known cross-section kinds are accepted.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "unknown section kind"):
			V.check_config({"section": {"kind": "klein_bottle"}})

	def testSphereMustMatchDimension(self):
		"""
		S^2 cannot be the section of a four-dimensional cone.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "dimension 4"):
			V.check_config({"n": 4, "section": {"kind": C.ROUND_SPHERE,
					"dim": 2}})

	def testTorusNeedsTwoRadii(self):
		"""
		A flat torus is given by exactly two positive circle radii.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "two positive radii"):
			V.check_config({"section": {"kind": C.FLAT_TORUS,
					"radii": [1.0]}})

	def testTorusNeedsTwoFluxes(self):
		"""
		The flux is one number per circle.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "two flux numbers"):
			V.check_config({"section": {"kind": C.FLAT_TORUS,
					"radii": [0.5, 1.0], "flux": [0.1]}})

	def testHarmonicOrders(self):
		"""
		Potential harmonics need |m| <= l.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, r"0 <= \|m\| <= l"):
			V.check_config({"section": {"kind": C.GALERKIN_SPHERE2,
					"a": {"constant": 0.0, "harmonics": [[1, 3, 0.1]]}}})
		with self.assertRaisesRegex(V.InvalidConfig, "triples"):
			V.check_config({"section": {"kind": C.GALERKIN_SPHERE2,
					"a": {"harmonics": [[1, 0]]}}})

	def testNonPositiveTolerance(self):
		"""
		Tolerances must be positive.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "tolerance tail"):
			V.check_config({"tolerances": {"tail": 0}})

	def testUnknownTolerance(self):
		"""
		Only the known tolerances may be set.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "unknown tolerance"):
			V.check_config({"tolerances": {"speed": 1.0}})

	def testConeDimension(self):
		"""
		Cones have dimension at least three.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "n must be"):
			V.check_config({"n": 2})

	def testExponentStrings(self):
		"""
		Exponents may be written as "inf", and must lie in [2, inf].
		"""
		config = V.check_config({"pairs": [["Infinity", 2, 0]]})
		self.assertEqual(config["pair_values"], [(math.inf, 2.0, 0.0)])

		with self.assertRaisesRegex(V.InvalidConfig, "bad exponent"):
			V.check_config({"pairs": [["huge", 2, 0]]})
		with self.assertRaisesRegex(V.InvalidConfig, r"\[2, inf\]"):
			V.check_config({"pairs": [[1, 2, 0]]})

	def testPositiveLists(self):
		"""
		Spectral parameters and radii must be positive.
		"""
		with self.assertRaisesRegex(V.InvalidConfig, "lambdas"):
			V.check_config({"lambdas": [1.0, -1.0]})
		with self.assertRaisesRegex(V.InvalidConfig, "radii"):
			V.check_config({"radii": []})


if __name__ == "__main__":
	unittest.main()
