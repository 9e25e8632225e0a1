#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import contextlib
import io
import json
import os.path
import tempfile
import unittest

from conespec import constants as C
from conespec import io as cio
from conespec.cli import main
from conespec.test.util import find_config


class CommandLineTest(unittest.TestCase):
	"""
	Runs the command line in a scratch directory.
	"""

	def setUp(self):
		self.scratch = tempfile.TemporaryDirectory()
		self.out = os.path.join(self.scratch.name, "out")

	def tearDown(self):
		self.scratch.cleanup()

	def writeConfig(self, name, data):
		path = os.path.join(self.scratch.name, "{0}.json".format(name))
		with open(path, "wt") as out_buf:
			json.dump(data, out_buf)

	def configPath(self, name):
		path = os.path.join(self.scratch.name, "{0}.json".format(name))
		if not os.path.exists(path):
			with open(path, "wt") as out_buf:
				out_buf.write(find_config(name))
		return path

	def run_cli(self, verb, name, *extra):
		"""
		Returns (exit code, stderr text) of one command-line run.
		"""
		errors = io.StringIO()
		with contextlib.redirect_stderr(errors):
			code = main([verb, "--config", self.configPath(name), "--out",
					self.out, "--quiet"] + list(extra))
		return code, errors.getvalue()

	def report(self, name):
		with open(os.path.join(self.out, name), "rt") as in_buf:
			return json.load(in_buf)


class TestEig(CommandLineTest):

	def testFreeCone(self):
		"""
		eig writes the bundle and a summary with nu_0 = 1/2.
		"""
		code, _ = self.run_cli(C.CMD_EIG, "free_sphere")
		self.assertEqual(code, C.EXIT_OK)

		report = self.report("eig.json")
		self.assertEqual(report["count"], 100)
		self.assertAlmostEqual(report["nu0"], 0.5)
		self.assertEqual(report["p_alpha"], "inf")

		with open(os.path.join(self.out, "spectrum.bin"), "rb") as in_buf:
			spectrum, meta = cio.read_bundle(in_buf)
		self.assertEqual(len(spectrum), 100)
		self.assertEqual(meta["config_hash"], report["config_hash"])

	def testCriticalPotential(self):
		"""
		a = -1/4 on S^2 leaves no positive nu_0^2: exit code 2.
		"""
		code, errors = self.run_cli(C.CMD_EIG, "critical_sphere")
		self.assertEqual(code, C.EXIT_DOMAIN)
		self.assertIn("not strictly positive", errors)

	def testBundleMustMatch(self):
		"""
		A bundle from another cone is refused.
		"""
		self.assertEqual(self.run_cli(C.CMD_EIG, "free_sphere")[0], C.EXIT_OK)
		bundle = os.path.join(self.scratch.name, "spectrum.bin")
		os.rename(os.path.join(self.out, "spectrum.bin"), bundle)

		code, errors = self.run_cli(C.CMD_EIG, "potential_sphere", "--bundle",
				bundle)
		self.assertEqual(code, C.EXIT_USAGE)
		self.assertIn("different cone", errors)


class TestUsage(CommandLineTest):

	def testMalformedConfig(self):
		"""
		Unknown keys exit with 1.
		"""
		code, errors = self.run_cli(C.CMD_EIG, "malformed")
		self.assertEqual(code, C.EXIT_USAGE)
		self.assertIn("secton", errors)

	def testUnknownVerb(self):
		"""
		Only the known experiments can be run.
		"""
		code, _ = self.run_cli("fly", "free_sphere")
		self.assertEqual(code, C.EXIT_USAGE)

	def testMissingConfig(self):
		"""
		A config that cannot be opened is a usage error.
		"""
		errors = io.StringIO()
		with contextlib.redirect_stderr(errors):
			code = main([C.CMD_EIG, "--config",
					os.path.join(self.scratch.name, "absent.json")])
		self.assertEqual(code, C.EXIT_USAGE)
		self.assertIn("cannot read config", errors.getvalue())

	def testBadOverride(self):
		"""
		--tol-override needs a known tolerance.
		"""
		code, _ = self.run_cli(C.CMD_EIG, "free_sphere", "--tol-override",
				"speed=1")
		self.assertEqual(code, C.EXIT_USAGE)

	def testSectionErrors(self):
		"""
		Malformed harmonics and fluxes are usage errors, not crashes.
		"""
		sections = {
				"bad_harmonic": {"kind": C.GALERKIN_SPHERE2, "max_degree": 8,
					"a": {"constant": 0.0, "harmonics": [[1, 3, 0.1]]}},
				"bad_flux": {"kind": C.FLAT_TORUS, "radii": [0.5, 1.0],
					"flux": [0.1]},
			}
		for name, section in sections.items():
			self.writeConfig(name, {"n": 3, "section": section, "count": 10})
			code, errors = self.run_cli(C.CMD_EIG, name)
			self.assertEqual(code, C.EXIT_USAGE)
			self.assertIn("conespec:", errors)

	def testThreads(self):
		"""
		At least one worker thread is needed.
		"""
		code, _ = self.run_cli(C.CMD_EIG, "free_sphere", "--threads", "0")
		self.assertEqual(code, C.EXIT_USAGE)


class TestGeometry(CommandLineTest):

	def testHalfSphere(self):
		"""
		The sphere of radius 1/2 fails NREC and the curvature criterion.
		"""
		code, _ = self.run_cli(C.CMD_GEOMETRY, "half_sphere")
		self.assertEqual(code, C.EXIT_OK)

		report = self.report("geometry.json")
		self.assertFalse(report["nrec"]["holds"])
		self.assertFalse(report["nfc_sufficient"])
		self.assertAlmostEqual(report["conjugate_radius"], 1.5707963, places=6)
		self.assertEqual(len(report["distance_spectra"]), 2)

	def testTorus(self):
		"""
		The (1/2, 1) torus has no conjugate points, and fails NREC.
		"""
		code, _ = self.run_cli(C.CMD_GEOMETRY, "torus")
		self.assertEqual(code, C.EXIT_OK)

		report = self.report("geometry.json")
		self.assertFalse(report["nrec"]["holds"])
		self.assertTrue(report["nfc_sufficient"])
		self.assertEqual(report["conjugate_radius"], "inf")


class TestCrosscheck(CommandLineTest):

	def testFreeCone(self):
		"""
		On R^3 the report carries the closed-form gaps and their verdict.
		"""
		self.writeConfig("free_small", {"n": 3, "count": 100,
				"lambdas": [1.0], "radii": [1.0, 1.5], "angles": [0.0, 1.0]})
		code, _ = self.run_cli(C.CMD_CROSSCHECK, "free_small")
		self.assertEqual(code, C.EXIT_OK)
		self.assertTrue(os.path.exists(os.path.join(self.out,
				"crosscheck.csv")))

		report = self.report("crosscheck.json")
		for key in ("max_gap", "dual_representation_pass", "stone",
				"low_frequency", "free", "free_pass", "config_hash"):
			self.assertIn(key, report)
		self.assertEqual(report["tolerances"]["free_closed_form"], 1e-4)
		self.assertEqual(len(report["free"]), 4)

		tolerance = report["tolerances"]["free_closed_form"]
		for row in report["free"]:
			self.assertLess(row["measure_relative_gap"], 1e-6)
			self.assertLess(row["resolvent_relative_gap"], 1e-3)
		self.assertEqual(report["free_pass"], all(
				row["measure_relative_gap"] <= tolerance
				and row["resolvent_relative_gap"] <= tolerance
				for row in report["free"]))

	def testPotentialConeHasNoFreeBlock(self):
		"""
		The closed forms are only compared on the free cone.
		"""
		data = json.loads(find_config("potential_sphere"))
		data.update({"count": 100, "lambdas": [2.0], "radii": [1.0, 1.5],
				"angles": [0.0]})
		self.writeConfig("potential_small", data)
		code, _ = self.run_cli(C.CMD_CROSSCHECK, "potential_small")
		self.assertEqual(code, C.EXIT_OK)

		report = self.report("crosscheck.json")
		self.assertNotIn("free", report)
		self.assertNotIn("free_pass", report)
		self.assertEqual(report["low_frequency"]["target"], -0.25)


class TestDecay(CommandLineTest):

	def testFreeCone(self):
		"""
		decay writes the sup table, the fit and the kernel grid.
		"""
		self.writeConfig("decay_small", {"n": 3, "count": 100,
				"times": [4.0, 16.0, 64.0], "radii": [1.0], "offsets": [0.0],
				"angles": [0.0, 0.7]})
		code, _ = self.run_cli(C.CMD_DECAY, "decay_small")
		self.assertEqual(code, C.EXIT_OK)
		for name in ("decay.csv", "decay_kernels.bin"):
			self.assertTrue(os.path.exists(os.path.join(self.out, name)))

		report = self.report("decay.json")
		self.assertIn("config_hash", report)
		self.assertNotIn("small_radius", report)
		fit = report["fit"]
		for key in ("band", "times", "sups", "slope", "residual", "target",
				"passed", "refined_slope", "flagged", "calibration"):
			self.assertIn(key, fit)
		self.assertEqual(fit["times"], [4.0, 16.0, 64.0])
		self.assertEqual(fit["target"], -1.0)

	def testShortWindow(self):
		"""
		Times that do not span a decade exit with 3.
		"""
		self.writeConfig("decay_short", {"n": 3, "count": 100,
				"times": [4.0, 8.0], "radii": [1.0], "offsets": [0.0]})
		code, errors = self.run_cli(C.CMD_DECAY, "decay_short")
		self.assertEqual(code, C.EXIT_NUMERICAL)
		self.assertIn("decade", errors)


class TestStrichartz(CommandLineTest):

	def testEnergyPair(self):
		"""
		One report per configured pair, each with both windows.
		"""
		self.writeConfig("strichartz_small", {"n": 3, "count": 25,
				"pairs": [["inf", 2, 0.0]], "ensemble": 1, "window": 4.0})
		code, _ = self.run_cli(C.CMD_STRICHARTZ, "strichartz_small")
		self.assertEqual(code, C.EXIT_OK)
		self.assertTrue(os.path.exists(os.path.join(self.out,
				"strichartz.csv")))

		report = self.report("strichartz.json")
		self.assertEqual(report["window"], 4.0)
		self.assertEqual(report["radial_range"], [0.0, 16.0])
		self.assertEqual(len(report["reports"]), 1)
		pair = report["reports"][0]
		self.assertEqual(pair["pair"], ["inf", 2.0])
		self.assertEqual([row["window"] for row in pair["rows"]], [4.0, 8.0])
		self.assertGreater(pair["min_ratio"], 0.0)
		self.assertIn("flagged", pair)


class TestCounterexample(CommandLineTest):

	def testNegativeAlpha(self):
		"""
		One growth table per exponent.
		"""
		code, _ = self.run_cli(C.CMD_COUNTEREXAMPLE, "potential_sphere")
		self.assertEqual(code, C.EXIT_OK)
		for p in (6, 24):
			self.assertTrue(os.path.exists(os.path.join(self.out,
					"counterexample_p{0}.csv".format(p))))
		laws = [run["law"] for run in self.report("counterexample.json")["runs"]]
		self.assertEqual(laws, ["bounded", "power"])

	def testFreeConeHasNoCounterexample(self):
		"""
		With alpha = 0 the experiment is out of its domain.
		"""
		code, errors = self.run_cli(C.CMD_COUNTEREXAMPLE, "free_sphere")
		self.assertEqual(code, C.EXIT_DOMAIN)
		self.assertIn("nu0 <", errors)


if __name__ == "__main__":
	unittest.main()
