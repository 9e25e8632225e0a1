#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import io
import math
import unittest
from zlib import crc32

import numpy as np

from conespec import constants as C
from conespec import util

EXAMPLE_VAR_INTS = {
		# Simple one-byte encodings
		b"\x80": 0,
		b"\x81": 1,
		b"\xFF": 127,
		# Two bytes start at 128
		b"\x00\x80": 128,
		b"\x01\x80": 129,
		b"\x7F\x80": 255,
		b"\x00\x81": 256,
	}


class TestVarInt(unittest.TestCase):

	def testDecoding(self):
		"""
		Output matches our examples.
		"""
		for encoded, decoded in EXAMPLE_VAR_INTS.items():
			buf = io.BytesIO(encoded)
			self.assertEqual(util.read_var_int(buf), decoded)

	def testEncoding(self):
		"""
		Output matches our examples.
		"""
		for encoded, decoded in EXAMPLE_VAR_INTS.items():
			self.assertEqual(bytes(util.encode_var_int(decoded)), encoded)

	def testReadStopsAfterHighBitSet(self):
		"""
		Reader doesn't read past the byte with the high bit set.
		"""
		buf = io.BytesIO(b"\x00\x80\x10")
		self.assertEqual(util.read_var_int(buf), 128)
		self.assertEqual(buf.read(), b"\x10")

	def testReadComplainsAboutTruncatedData(self):
		"""
		Reader raises EOFError if it can't find the end of a varint.
		"""
		buf = io.BytesIO(b"\x00\x00")
		self.assertRaises(EOFError, util.read_var_int, buf)

	def testMetadataSizes(self):
		"""
		Lengths the size of a bundle header survive the codec.
		"""
		for number in (1000, 65535, 123456789):
			buf = io.BytesIO(bytes(util.encode_var_int(number)))
			self.assertEqual(util.read_var_int(buf), number)


class TestCRCIOWrapper(unittest.TestCase):

	def testEmptyWritesHaveZeroCRC32(self):
		"""
		If no data is written, the CRC32 is zero.
		"""
		wrapper = util.CRCIOWrapper(io.BytesIO())
		self.assertEqual(wrapper.crc32, 0)

	def testWritesAreChecksummed(self):
		"""
		Bytes written through the wrapper update its CRC32.
		"""
		wrapper = util.CRCIOWrapper(io.BytesIO())
		wrapper.write(b"cone")
		wrapper.write(b"spec")
		self.assertEqual(wrapper.crc32, crc32(b"conespec"))
		self.assertEqual(wrapper.inner.getvalue(), b"conespec")

	def testReadsAreChecksummed(self):
		"""
		Bytes read through the wrapper update its CRC32.
		"""
		wrapper = util.CRCIOWrapper(io.BytesIO(b"abcdef"))
		self.assertEqual(wrapper.read(4), b"abcd")
		self.assertEqual(wrapper.crc32, crc32(b"abcd"))

	def testSeekingIsProhibited(self):
		"""
		Seeking would desynchronise the checksum, so it is refused.
		"""
		wrapper = util.CRCIOWrapper(io.BytesIO(b"abc"))
		self.assertRaises(io.UnsupportedOperation, wrapper.seek, 0)


class TestProgress(unittest.TestCase):

	def testDisabledYieldsEverything(self):
		"""
		A disabled progress wrapper passes every item through.
		"""
		self.assertEqual(list(util.progress(range(5), 5, False)),
				[0, 1, 2, 3, 4])


class TestQuadrature(unittest.TestCase):

	def testPolynomialsAreExact(self):
		"""
		Composite Gauss-Legendre integrates polynomials exactly.
		"""
		x, w = util.gauss_legendre_panels([0.0, 0.5, 2.0], order=4)
		self.assertEqual(len(x), 8)
		self.assertAlmostEqual(float(np.sum(w * x ** 5)), 2.0 ** 6 / 6,
				places=10)

	def testOscillatoryIntegral(self):
		"""
		Enough panels resolve an oscillating integrand.
		"""
		rate = 40.0
		panels = util.panel_count(math.pi, rate)
		x, w = util.gauss_legendre_panels(np.linspace(0, math.pi, panels + 1))
		value = float(np.sum(w * np.cos(rate * x) * x))
		exact = (math.cos(rate * math.pi) - 1.0) / rate ** 2
		self.assertAlmostEqual(value, exact, places=10)

	def testPanelCountHonoursMinimum(self):
		"""
		A short, slow integral still gets the minimum number of panels.
		"""
		self.assertEqual(util.panel_count(0.01, 1.0, minimum=3), 3)
		self.assertEqual(util.panel_count(C.MAX_PANEL_PHASE * 5, 1.0), 5)

	def testGradedBreaks(self):
		"""
		Graded breaks increase and pack towards the left end point.
		"""
		breaks = util.graded_breaks(0.0, 1.0, 4, levels=3)
		self.assertEqual(breaks[0], 0.0)
		self.assertEqual(breaks[-1], 1.0)
		self.assertTrue(np.all(np.diff(breaks) > 0))
		self.assertAlmostEqual(breaks[1], 0.25 * 0.25 ** 3)

	def testGradedRuleHandlesEndpointSingularity(self):
		"""
		Graded panels integrate 1/sqrt(x) on [0, 1] well.
		"""
		x, w = util.gauss_legendre_panels(util.graded_breaks(0.0, 1.0, 2,
				levels=12))
		self.assertAlmostEqual(float(np.sum(w / np.sqrt(x))), 2.0, places=4)


class TestBumps(unittest.TestCase):

	def testCutoffValues(self):
		"""
		chi is one up to 1 and zero from 2 on.
		"""
		self.assertEqual(float(util.cutoff(0.5)), 1.0)
		self.assertEqual(float(util.cutoff(2.5)), 0.0)
		self.assertAlmostEqual(float(util.cutoff(1.5)), 0.5)

	def testDyadicPartitionOfUnity(self):
		"""
		The dyadic dilates of phi sum to one on (0, inf).
		"""
		lam = np.geomspace(0.01, 100.0, 57)
		total = sum(util.lp_bump(lam * 2.0 ** (-j)) for j in range(-10, 11))
		np.testing.assert_allclose(total, 1.0, atol=1e-12)

	def testBumpSupport(self):
		"""
		phi vanishes outside [1/2, 2].
		"""
		self.assertEqual(float(util.lp_bump(0.4)), 0.0)
		self.assertEqual(float(util.lp_bump(2.1)), 0.0)
		self.assertGreater(float(util.lp_bump(1.0)), 0.0)

	def testUnitBump(self):
		"""
		The unit bump peaks at 1 in the middle of its support.
		"""
		self.assertAlmostEqual(float(util.unit_bump(1.5)), 1.0)
		self.assertEqual(float(util.unit_bump(1.0)), 0.0)
		self.assertEqual(float(util.unit_bump(3.0)), 0.0)


class TestConfigHash(unittest.TestCase):

	def testKeyOrderIsIrrelevant(self):
		"""
		Equal configs hash equally, whatever their key order.
		"""
		first = {"n": 3, "count": 10}
		second = {"count": 10, "n": 3}
		self.assertEqual(util.config_hash(first), util.config_hash(second))

	def testNonSemanticKeysAreIgnored(self):
		"""
		The output directory and thread count do not enter the hash.
		"""
		first = {"n": 3}
		second = {"n": 3, "out": "/tmp/x", "threads": 8,
				"pair_values": [(2, 2, 0)]}
		self.assertEqual(util.config_hash(first), util.config_hash(second))

	def testSemanticKeysChangeTheHash(self):
		"""
		A different cone dimension is a different run.
		"""
		self.assertNotEqual(util.config_hash({"n": 3}),
				util.config_hash({"n": 4}))


class TestLogLogSlope(unittest.TestCase):

	def testExactPowerLaw(self):
		"""
		A pure power law is fitted exactly.
		"""
		x = np.array([1.0, 10.0, 100.0])
		slope, residual = util.loglog_slope(x, 3.0 * x ** -1.5)
		self.assertAlmostEqual(slope, -1.5)
		self.assertAlmostEqual(residual, 0.0)


if __name__ == "__main__":
	unittest.main()
