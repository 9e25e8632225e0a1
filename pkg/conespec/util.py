# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Utility methods shared by the conespec modules.
"""
import sys
import io
import json
import hashlib
from functools import lru_cache
from time import perf_counter
from zlib import crc32

import numpy as np
from numpy.polynomial.legendre import leggauss

from conespec import constants as C


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


def _fields(obj):
	res = []
	for cls in reversed(type(obj).__mro__):
		for name in getattr(cls, "__slots__", ()):
			if name not in res:
				res.append(name)
	return res


def _show(value):
	if isinstance(value, np.ndarray):
		return "array{0}".format(value.shape)
	return repr(value)


class Record:
	"""
	Base class for the value records handed between modules.

	Subclasses name their fields in __slots__, and get a readable repr and
	field-by-field equality from this class.
	"""

	__slots__ = ()

	def __repr__(self):
		return "<{0} {1}>".format(
				_classname(self),
				" ".join(
					"{0}={1}".format(name, _show(getattr(self, name)))
					for name in _fields(self)
				),
			)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		for name in _fields(self):
			mine = getattr(self, name)
			theirs = getattr(other, name)
			if isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
				if not np.array_equal(mine, theirs): return False
			elif mine != theirs:
				return False

		return True

	__hash__ = None


class CRCIOWrapper(io.IOBase):
	"""
	A wrapper for an IO instance that tracks the CRC32 of data read or written.

	Seeking is prohibited, since the running checksum would no longer match
	the bytes on disk.
	"""

	def __init__(self, inner):
		self.inner = inner
		self.crc32 = 0

	def _update_crc32(self, data):
		self.crc32 = crc32(data, self.crc32) & 0xffffffff
		return data

	def __getattr__(self, name):
		return getattr(self.inner, name)

	def seek(self, *args, **kwargs):
		raise io.UnsupportedOperation("Seeking not supported.")

	def readline(self, *args, **kwargs):
		return self._update_crc32(self.inner.readline(*args, **kwargs))

	def read(self, *args, **kwargs):
		return self._update_crc32(self.inner.read(*args, **kwargs))

	def readinto(self, buf):
		count = self.inner.readinto(buf)
		self._update_crc32(bytes(memoryview(buf)[:count]))
		return count

	def write(self, data):
		return self.inner.write(self._update_crc32(bytes(data)))

	def readable(self):
		return self.inner.readable()

	def writable(self):
		return self.inner.writable()


def read_var_int(handle):
	"""
	Read a variable-length integer from the given file handle.
	"""
	res = 0
	shift = 1

	while True:
		byte = handle.read(1)
		if not byte:
			raise EOFError("stream ended inside a variable-length integer")
		byte = byte[0]
		res += (byte & 0x7f) * shift
		if byte & 0x80: break
		shift <<= 7
		res += shift

	return res


def encode_var_int(number):
	"""
	Returns a bytearray encoding the given number.
	"""
	buf = bytearray()
	shift = 1

	while True:
		buf.append(number & 0x7F)

		number -= buf[-1]

		if number == 0:
			buf[-1] |= 0x80
			break

		number -= shift
		number >>= 7
		shift += 7

	return buf


def progress(iterable, total, enabled=True):
	"""
	Yields the items of iterable, reporting how far along we are on stderr.

	total is the number of items expected. Nothing is written when enabled
	is false.
	"""
	if not enabled:
		yield from iterable
		return

	curpos = 0
	nextupdate = 0 # Make sure we always update the first time.

	for item in iterable:
		curpos += 1

		now = perf_counter()
		if now > nextupdate:
			sys.stderr.write(
					"\rWorking... {0:6.3f}%".format(100 * curpos / max(total, 1))
				)
			sys.stderr.flush()
			nextupdate = now + 1 # Update at most once per second

		yield item

	sys.stderr.write("\n")


@lru_cache(maxsize=64)
def _legendre_rule(order):
	return leggauss(order)


def gauss_legendre_panels(breaks, order=C.PANEL_ORDER):
	"""
	Returns (nodes, weights) of composite Gauss-Legendre quadrature.

	breaks is the increasing sequence of panel end points; each panel gets
	order nodes.
	"""
	breaks = np.asarray(breaks, dtype=float)
	assert breaks.ndim == 1 and len(breaks) >= 2
	assert np.all(np.diff(breaks) > 0)

	x, w = _legendre_rule(order)
	lo = breaks[:-1, None]
	hi = breaks[1:, None]
	half = 0.5 * (hi - lo)

	nodes = (half * x + 0.5 * (hi + lo)).ravel()
	weights = (half * w).ravel()
	return nodes, weights


def panel_count(length, rate, minimum=1):
	"""
	Returns how many panels resolve a phase advancing at rate over length.

	Each panel covers at most C.MAX_PANEL_PHASE radians of phase.
	"""
	return max(minimum, int(np.ceil(length * rate / C.MAX_PANEL_PHASE)))


def graded_breaks(lo, hi, panels, levels=C.GRADING_LEVELS, ratio=0.25):
	"""
	Returns panel breaks on [lo, hi]: uniform panels, with the first one
	split geometrically towards lo.
	"""
	assert hi > lo
	assert panels >= 1

	uniform = np.linspace(lo, hi, panels + 1)
	first = uniform[1] - lo
	if levels <= 0:
		return uniform

	graded = lo + first * ratio ** np.arange(levels, 0, -1)
	return np.concatenate([[lo], graded, uniform[1:]])


def smooth_step(x):
	"""
	exp(-1/x) for x > 0, and 0 elsewhere.
	"""
	x = np.asarray(x, dtype=float)
	res = np.zeros_like(x)
	positive = x > 0
	res[positive] = np.exp(-1.0 / x[positive])
	return res


def cutoff(lam):
	"""
	The smooth cutoff chi: 1 on [0, 1], 0 on [2, inf), smooth in between.
	"""
	lam = np.abs(np.asarray(lam, dtype=float))
	up = smooth_step(2.0 - lam)
	down = smooth_step(lam - 1.0)
	return up / (up + down)


def lp_bump(lam):
	"""
	The Littlewood-Paley bump phi(lam) = chi(lam) - chi(2 lam).

	Supported in [1/2, 2]; its dyadic dilates sum to one on (0, inf).
	"""
	lam = np.asarray(lam, dtype=float)
	return cutoff(lam) - cutoff(2.0 * lam)


def unit_bump(x, lo=1.0, hi=2.0):
	"""
	A smooth bump with values in [0, 1], supported in [lo, hi].
	"""
	x = np.asarray(x, dtype=float)
	mid = 0.5 * (lo + hi)
	scaled = (x - mid) / (0.5 * (hi - lo))
	res = np.zeros_like(x)
	inside = np.abs(scaled) < 1
	res[inside] = np.exp(1.0 - 1.0 / (1.0 - scaled[inside] ** 2))
	return res


def canonical_json(data):
	"""
	Returns the canonical JSON text of data: sorted keys, no whitespace.
	"""
	return json.dumps(data, sort_keys=True, separators=(",", ":"),
			allow_nan=True)


def config_hash(config):
	"""
	Returns the SHA-256 hex digest of the semantic content of config.

	Keys that only steer where and how fast a run happens are left out, as
	are derived keys added during validation.
	"""
	semantic = {
			key: value
			for key, value in config.items()
			if key in C.DEFAULTS and key not in C.NON_SEMANTIC_KEYS
		}
	digest = hashlib.sha256(canonical_json(semantic).encode("utf-8"))
	return digest.hexdigest()


def loglog_slope(x, y):
	"""
	Returns (slope, residual) of a least-squares line through (log x, log y).
	"""
	lx = np.log(np.asarray(x, dtype=float))
	ly = np.log(np.asarray(y, dtype=float))
	coeffs, residuals, _, _, _ = np.polyfit(lx, ly, 1, full=True)
	residual = float(residuals[0]) if len(residuals) else 0.0
	return float(coeffs[0]), residual
