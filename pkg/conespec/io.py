# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Tools for reading and writing run configurations, spectrum bundles, kernel
grids, CSV tables and JSON reports.
"""
import csv
import json
import math
from struct import pack, unpack

import numpy as np
from numpy.lib import format as npformat

from conespec import util
from conespec import constants as C
from conespec.crosssection import AngularSpectrum, section_from_dict
from conespec.propagator import KernelGrid
from conespec.validate import CorruptBundle, InvalidConfig, check_config


BUNDLE_ARRAYS = ("mu", "nu", "nodes", "weights", "psi", "coeffs")
KERNELGRID_ARRAYS = ("radii1", "points1", "radii2", "points2", "values")


class RunConfig(util.Record):
	"""
	A validated run configuration.

	values holds every key with its default materialised; hash is the
	SHA-256 of the semantic content.
	"""

	__slots__ = [
			'values',
			'hash',
			'out',
			'threads',
		]

	def __init__(self, values, out=".", threads=1):
		assert isinstance(values, dict)
		assert threads >= 1

		self.values = values
		self.hash = util.config_hash(values)
		self.out = out
		self.threads = threads

	def __getitem__(self, key):
		return self.values[key]

	@property
	def tolerances(self):
		return self.values["tolerances"]


def read_config(in_buf, out=".", threads=1):
	"""
	Returns the RunConfig described by the JSON in in_buf.

	in_buf should implement io.IOBase, opened in 'rt' mode.
	"""
	try:
		raw = json.load(in_buf)
	except ValueError as e:
		raise InvalidConfig("config is not valid JSON: {0}".format(e))
	if isinstance(raw, dict):
		out = raw.pop("out", out)
		threads = raw.pop("threads", threads)
	return RunConfig(check_config(raw), out, threads)


def override_tolerances(config, items):
	"""
	Returns a copy of config with each "KEY=VAL" of items applied to its
	tolerances.
	"""
	raw = {key: value for key, value in config.values.items()
			if key in C.DEFAULTS}
	tolerances = dict(raw["tolerances"])
	for item in items:
		key, sep, value = item.partition("=")
		if not sep:
			raise InvalidConfig("tolerance overrides look like KEY=VAL, not "
					"{0!r}".format(item))
		key = key.strip()
		if key not in C.DEFAULT_TOLERANCES:
			raise InvalidConfig("unknown tolerance {0!r}".format(key))
		try:
			tolerances[key] = float(value)
		except ValueError:
			raise InvalidConfig("tolerance {0} must be a number, not "
					"{1!r}".format(key, value))
	raw["tolerances"] = tolerances
	return RunConfig(check_config(raw), config.out, config.threads)


def _write_header(out_buf, magic, meta):
	out_buf.write(magic)
	text = json.dumps(meta, sort_keys=True).encode("utf-8")
	out_buf.write(util.encode_var_int(len(text)))
	out_buf.write(text)


def _read_header(in_buf, magic):
	actual = in_buf.read(len(magic))
	if actual != magic:
		raise CorruptBundle("File magic should be {expected!r}, got "
				"{actual!r}".format(expected=magic, actual=actual))
	try:
		size = util.read_var_int(in_buf)
		return json.loads(in_buf.read(size).decode("utf-8"))
	except (EOFError, ValueError) as e:
		raise CorruptBundle("unreadable metadata: {0}".format(e))


def _write_arrays(out_buf, arrays):
	for array in arrays:
		npformat.write_array(out_buf, np.asarray(array), allow_pickle=False)


def _read_arrays(in_buf, count):
	res = []
	for _ in range(count):
		try:
			res.append(npformat.read_array(in_buf, allow_pickle=False))
		except ValueError as e:
			raise CorruptBundle("unreadable array: {0}".format(e))
	return res


def _check_footer(in_buf):
	actual = in_buf.crc32
	raw = in_buf.read(4)
	if len(raw) != 4:
		raise CorruptBundle("file ends before its CRC32")
	expected = unpack("<I", raw)[0]

	if expected != actual:
		raise CorruptBundle("File claims its CRC32 is {expected:08X}, but "
				"it's really {actual:08X}".format(
					expected=expected, actual=actual)
			)


def write_bundle(spectrum, out_buf, config_hash=None):
	"""
	Writes the AngularSpectrum into out_buf as a spectrum bundle.

	out_buf should implement io.IOBase, opened in 'wb' mode.
	"""
	out_buf = util.CRCIOWrapper(out_buf)

	meta = {
			"n": spectrum.n,
			"section": spectrum.section.to_dict(),
			"count": len(spectrum),
			"has_coeffs": spectrum.coeffs is not None,
			"config_hash": config_hash,
		}
	_write_header(out_buf, C.BUNDLE_MAGIC, meta)

	arrays = [spectrum.mu, spectrum.nu, spectrum.nodes, spectrum.weights,
			spectrum.psi]
	if spectrum.coeffs is not None:
		arrays.append(spectrum.coeffs)
	_write_arrays(out_buf, arrays)

	out_buf.write(pack("<I", out_buf.crc32))


def read_bundle(in_buf):
	"""
	Returns (spectrum, meta) from the spectrum bundle in in_buf.

	in_buf should implement io.IOBase, opened in 'rb' mode.
	"""
	in_buf = util.CRCIOWrapper(in_buf)

	meta = _read_header(in_buf, C.BUNDLE_MAGIC)
	count = len(BUNDLE_ARRAYS) - (0 if meta.get("has_coeffs") else 1)
	arrays = _read_arrays(in_buf, count)
	_check_footer(in_buf)

	if not meta.get("has_coeffs"):
		arrays.append(None)
	try:
		section = section_from_dict(meta["section"], meta["n"])
	except (KeyError, TypeError) as e:
		raise CorruptBundle("bundle metadata lacks {0}".format(e))
	mu, nu, nodes, weights, psi, coeffs = arrays
	return AngularSpectrum(meta["n"], section, mu, nu, nodes, weights, psi,
			coeffs), meta


def write_kernel_grid(grid, out_buf):
	"""
	Writes the KernelGrid into out_buf.

	out_buf should implement io.IOBase, opened in 'wb' mode.
	"""
	out_buf = util.CRCIOWrapper(out_buf)
	_write_header(out_buf, C.KERNELGRID_MAGIC, grid.meta)
	_write_arrays(out_buf, [getattr(grid, name) for name in KERNELGRID_ARRAYS])
	out_buf.write(pack("<I", out_buf.crc32))


def read_kernel_grid(in_buf):
	"""
	Returns the KernelGrid stored in in_buf.

	in_buf should implement io.IOBase, opened in 'rb' mode.
	"""
	in_buf = util.CRCIOWrapper(in_buf)
	meta = _read_header(in_buf, C.KERNELGRID_MAGIC)
	arrays = _read_arrays(in_buf, len(KERNELGRID_ARRAYS))
	_check_footer(in_buf)
	return KernelGrid(*arrays, meta)


def jsonable(value):
	"""
	Returns value with numpy types, complex numbers, infinities and records
	turned into plain JSON data.
	"""
	if isinstance(value, dict):
		return {str(key): jsonable(item) for key, item in value.items()}
	if isinstance(value, (list, tuple)):
		return [jsonable(item) for item in value]
	if isinstance(value, np.ndarray):
		return jsonable(value.tolist())
	if isinstance(value, (bool, np.bool_)):
		return bool(value)
	if isinstance(value, (int, np.integer)):
		return int(value)
	if isinstance(value, (complex, np.complexfloating)):
		return [jsonable(value.real), jsonable(value.imag)]
	if isinstance(value, (float, np.floating)):
		value = float(value)
		if math.isinf(value):
			return "inf" if value > 0 else "-inf"
		if math.isnan(value):
			return "nan"
		return value
	if hasattr(value, "to_dict"):
		return jsonable(value.to_dict())
	return value


def write_report(report, out_buf, config):
	"""
	Writes report as JSON into out_buf, stamped with the config hash and
	tolerances.

	out_buf should implement io.IOBase, opened in 'wt' mode.
	"""
	data = dict(jsonable(report))
	data["config_hash"] = config.hash
	data["tolerances"] = config.tolerances
	json.dump(data, out_buf, sort_keys=True, indent=2)
	out_buf.write("\n")


def write_table(rows, columns, out_buf, config):
	"""
	Writes rows as CSV into out_buf under the given column headings,
	preceded by the config hash and tolerances as comment lines.

	out_buf should implement io.IOBase, opened in 'wt' mode with newline=''.
	"""
	out_buf.write("# config_hash={0}\n".format(config.hash))
	out_buf.write("# tolerances={0}\n".format(
		util.canonical_json(config.tolerances)))
	writer = csv.writer(out_buf, lineterminator="\n")
	writer.writerow(columns)
	for row in rows:
		if isinstance(row, dict):
			row = [row[column] for column in columns]
		writer.writerow([
				repr(float(value)) if isinstance(value, (float, np.floating))
				else value
				for value in row
			])


def read_table(in_buf):
	"""
	Returns (comments, columns, rows) from a CSV table written by
	write_table; comments maps each "# key=value" line.
	"""
	comments = {}
	lines = []
	for line in in_buf:
		if line.startswith("#"):
			key, _, value = line[1:].strip().partition("=")
			comments[key] = value
		else:
			lines.append(line)
	reader = csv.reader(lines)
	columns = next(reader)
	return comments, columns, [row for row in reader]
