#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import io
import json
import math
import unittest

import numpy as np

from conespec import constants as C
from conespec import io as cio
from conespec.propagator import KernelGrid
from conespec.test.util import find_config, free_spectrum
from conespec.validate import CorruptBundle, InvalidConfig


def read_fixture(name):
	return cio.read_config(io.StringIO(find_config(name)))


class TestReadConfig(unittest.TestCase):

	def testFixture(self):
		"""
		A fixture config comes back validated and hashed.
		"""
		config = read_fixture("free_sphere")
		self.assertEqual(config["count"], 100)
		self.assertEqual(config["radii"], [1.0, 1.5])
		self.assertEqual(len(config.hash), 64)
		self.assertEqual(config.tolerances, C.DEFAULT_TOLERANCES)

	def testRunKeysAreNotSemantic(self):
		"""
		out and threads steer the run without changing its hash.
		"""
		text = json.loads(find_config("free_sphere"))
		text["out"] = "elsewhere"
		text["threads"] = 4
		config = cio.read_config(io.StringIO(json.dumps(text)))
		self.assertEqual(config.out, "elsewhere")
		self.assertEqual(config.threads, 4)
		self.assertEqual(config.hash, read_fixture("free_sphere").hash)

	def testMalformed(self):
		"""
		Misspelt keys and broken JSON are both InvalidConfig.
		"""
		with self.assertRaisesRegex(InvalidConfig, "secton"):
			read_fixture("malformed")
		with self.assertRaisesRegex(InvalidConfig, "not valid JSON"):
			cio.read_config(io.StringIO("{\"n\": 3"))


class TestOverrideTolerances(unittest.TestCase):

	def setUp(self):
		self.config = read_fixture("free_sphere")

	def testOverride(self):
		"""
		An override replaces one tolerance and changes the hash.
		"""
		config = cio.override_tolerances(self.config, ["tail=1e-8"])
		self.assertEqual(config.tolerances["tail"], 1e-8)
		self.assertEqual(config.tolerances["galerkin"],
				C.DEFAULT_TOLERANCES["galerkin"])
		self.assertNotEqual(config.hash, self.config.hash)

	def testBadOverrides(self):
		"""
		Overrides must be KEY=VAL with a known key and a positive number.
		"""
		with self.assertRaisesRegex(InvalidConfig, "KEY=VAL"):
			cio.override_tolerances(self.config, ["tail"])
		with self.assertRaisesRegex(InvalidConfig, "unknown tolerance"):
			cio.override_tolerances(self.config, ["speed=1"])
		with self.assertRaisesRegex(InvalidConfig, "must be a number"):
			cio.override_tolerances(self.config, ["tail=tiny"])
		with self.assertRaisesRegex(InvalidConfig, "tolerance tail"):
			cio.override_tolerances(self.config, ["tail=-1"])


class TestBundle(unittest.TestCase):

	def setUp(self):
		self.spectrum = free_spectrum(25)
		out_buf = io.BytesIO()
		cio.write_bundle(self.spectrum, out_buf, "abc")
		self.data = out_buf.getvalue()

	def testRoundTrip(self):
		"""
		A bundle reads back to the spectrum it was written from.
		"""
		spectrum, meta = cio.read_bundle(io.BytesIO(self.data))
		self.assertEqual(spectrum, self.spectrum)
		self.assertEqual(meta["config_hash"], "abc")
		self.assertEqual(meta["count"], 25)

	def testMagic(self):
		"""
		Bundles start with their magic number.
		"""
		self.assertEqual(self.data[:4], C.BUNDLE_MAGIC)
		with self.assertRaisesRegex(CorruptBundle, "File magic"):
			cio.read_bundle(io.BytesIO(b"XXXX" + self.data[4:]))

	def testCorruptionIsDetected(self):
		"""
		A flipped byte in the eigenfunctions breaks the CRC32.
		"""
		data = bytearray(self.data)
		data[-10] ^= 0xFF
		with self.assertRaisesRegex(CorruptBundle, "CRC32"):
			cio.read_bundle(io.BytesIO(bytes(data)))

	def testTruncationIsDetected(self):
		"""
		A bundle cut short loses its footer.
		"""
		with self.assertRaisesRegex(CorruptBundle, "ends before"):
			cio.read_bundle(io.BytesIO(self.data[:-2]))


class TestKernelGrid(unittest.TestCase):

	def testRoundTrip(self):
		"""
		Kernel grids keep their values and parameters.
		"""
		points = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
		values = (np.arange(8) + 1j * np.arange(8)).reshape(1, 2, 2, 2)
		grid = KernelGrid([1.0], points, [1.0, 2.0], points, values,
				{"kind": "halfwave", "band": 1, "t": 2.5, "n": 3})

		out_buf = io.BytesIO()
		cio.write_kernel_grid(grid, out_buf)
		data = out_buf.getvalue()
		self.assertEqual(data[:4], C.KERNELGRID_MAGIC)
		self.assertEqual(cio.read_kernel_grid(io.BytesIO(data)), grid)

		with self.assertRaisesRegex(CorruptBundle, "File magic"):
			cio.read_bundle(io.BytesIO(data))


class TestJson(unittest.TestCase):

	def testJsonable(self):
		"""
		numpy values, complex numbers and infinities become plain JSON.
		"""
		data = cio.jsonable({
				"inf": np.float64(math.inf),
				"z": 1 + 2j,
				"array": np.arange(2),
				"flag": np.bool_(True),
				1: (np.int64(3), None),
			})
		self.assertEqual(data, {
				"inf": "inf",
				"z": [1.0, 2.0],
				"array": [0, 1],
				"flag": True,
				"1": [3, None],
			})
		json.dumps(data)

	def testReport(self):
		"""
		Reports are stamped with the hash and tolerances of their run.
		"""
		config = read_fixture("free_sphere")
		out_buf = io.StringIO()
		cio.write_report({"max_gap": np.float64(0.5)}, out_buf, config)
		data = json.loads(out_buf.getvalue())
		self.assertEqual(data["max_gap"], 0.5)
		self.assertEqual(data["config_hash"], config.hash)
		self.assertEqual(data["tolerances"], C.DEFAULT_TOLERANCES)

	def testTable(self):
		"""
		Tables carry their provenance as comment lines.
		"""
		config = read_fixture("free_sphere")
		out_buf = io.StringIO(newline="")
		cio.write_table([(4.0, 0.25), {"t": 8.0, "sup_abs_kernel": 0.125}],
				C.DECAY_COLUMNS, out_buf, config)
		out_buf.seek(0)
		comments, columns, rows = cio.read_table(out_buf)
		self.assertEqual(comments["config_hash"], config.hash)
		self.assertEqual(columns, list(C.DECAY_COLUMNS))
		self.assertEqual(rows, [["4.0", "0.25"], ["8.0", "0.125"]])


if __name__ == "__main__":
	unittest.main()
