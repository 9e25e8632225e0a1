# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The conespec command line: one verb per experiment, each reading a JSON
run configuration and writing CSV and JSON results into the output
directory.
"""
import argparse
import logging
import os
import os.path
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from conespec import constants as C
from conespec import io
from conespec.crosssection import (
		eigensolve,
		section_from_dict,
		verify_eigenfunction_bound,
		verify_weyl,
	)
from conespec.estimates import (
		alpha_and_palpha,
		counterexample_run,
		decay_fit,
		small_radius_profile,
		strichartz_ensemble,
	)
from conespec.geometry import (
		build_microlocalizers,
		check_nfc_sufficient,
		check_nrec,
		chord_distance,
		conjugate_radius,
		curvature_bounds,
		default_horizon,
		distance_spectrum,
		length_spectrum,
		max_patch_diameter,
	)
from conespec.propagator import cone_grid, kernel_grid
from conespec.spectral import (
		free_resolvent,
		free_spectral_measure,
		low_frequency_profile,
		spectral_measure_bessel,
		spectral_measure_ct,
		resolvent_kernel,
		stone_check,
	)
from conespec.util import panel_count, progress
from conespec.validate import (
		ConeError,
		DomainError,
		Inconclusive,
		NumericalFailure,
		InvalidConfig,
		exit_code,
	)


log = logging.getLogger(__name__)

# Longest length spectrum the geometry report lists.
LENGTH_HORIZON = 10.0

# Strichartz data live in the bands j = 0, 1, below this frequency.
STRICHARTZ_RHO_MAX = 4.5


class _Parser(argparse.ArgumentParser):
	"""
	An ArgumentParser that reports usage errors as InvalidConfig.
	"""

	def error(self, message):
		raise InvalidConfig(message)


def build_parser():
	parser = _Parser(prog="conespec",
			description="Spectral experiments on product cones.")
	parser.add_argument("verb", choices=C.COMMANDS,
			help="the experiment to run")
	parser.add_argument("--config", required=True, metavar="PATH",
			help="JSON run configuration")
	parser.add_argument("--out", default=None, metavar="DIR",
			help="output directory (default: the config's, or .)")
	parser.add_argument("--threads", type=int, default=None, metavar="N",
			help="worker threads")
	parser.add_argument("--tol-override", action="append", default=[],
			metavar="KEY=VAL", help="override one tolerance")
	parser.add_argument("--bundle", default=None, metavar="PATH",
			help="reuse the spectrum bundle written by an earlier eig run")
	parser.add_argument("-v", "--verbose", action="store_true",
			help="log debugging output")
	parser.add_argument("--quiet", action="store_true",
			help="no progress output")
	return parser


def _path(config, name):
	return os.path.join(config.out, name)


def _write_report(config, name, report):
	with open(_path(config, name), "wt") as out_buf:
		io.write_report(report, out_buf, config)
	log.info("wrote %s", _path(config, name))


def _write_table(config, name, rows, columns):
	with open(_path(config, name), "wt", newline="") as out_buf:
		io.write_table(rows, columns, out_buf, config)
	log.info("wrote %s", _path(config, name))


def _section(config):
	return section_from_dict(config["section"], config["n"])


def _spectrum(config, args):
	"""
	Returns the AngularSpectrum of the configured section, from --bundle when
	given.
	"""
	if args.bundle:
		with open(args.bundle, "rb") as in_buf:
			spectrum, meta = io.read_bundle(in_buf)
		if (meta["n"] != config["n"]
				or spectrum.section != _section(config)):
			raise InvalidConfig("bundle {0} holds a different cone than the "
					"config".format(args.bundle))
		return spectrum
	return eigensolve(_section(config), config["n"], config["count"],
			config.tolerances["galerkin"])


def _records(records):
	return [
			{
				"length": record.length,
				"degenerate": record.degenerate,
				"conjugate": record.conjugate,
			}
			for record in records
		]


def cmd_eig(config, args, executor):
	"""
	Solves the angular eigenproblem, writes the spectrum bundle and a
	summary with nu0, alpha, p(alpha) and the Weyl band.
	"""
	spectrum = _spectrum(config, args)
	with open(_path(config, "spectrum.bin"), "wb") as out_buf:
		io.write_bundle(spectrum, out_buf, config.hash)

	alpha, top = alpha_and_palpha(spectrum.nu0, spectrum.n)
	_write_report(config, "eig.json", {
			"n": spectrum.n,
			"count": len(spectrum),
			"nu0": spectrum.nu0,
			"alpha": alpha,
			"p_alpha": top,
			"nu": spectrum.nu,
			"weyl": verify_weyl(spectrum),
			"eigenfunction_bound": verify_eigenfunction_bound(spectrum),
		})


def cmd_geometry(config, args, executor):
	"""
	Writes distance spectra, the length spectrum, NREC, the NFC curvature
	criterion and conjugate radii of the section.
	"""
	section = _section(config)
	horizon = default_horizon(config["horizon_epsilon"])
	base = section.base_point()

	distances = []
	for angle in config["angles"]:
		records = distance_spectrum(section, section.point_at(angle), base,
				horizon)
		distances.append({"angle": angle, "records": _records(records)})

	try:
		nrec = check_nrec(section)
	except Inconclusive as e:
		nrec = {"holds": None, "inconclusive": str(e)}

	low, high, simple = curvature_bounds(section)
	report = {
			"horizon": horizon,
			"distance_spectra": distances,
			"length_spectrum": length_spectrum(section, LENGTH_HORIZON),
			"length_horizon": LENGTH_HORIZON,
			"nrec": nrec,
			"curvature": {"min": low, "max": high, "simply_connected": simple},
			"nfc_sufficient": check_nfc_sufficient(low, high, simple),
			"conjugate_radius": conjugate_radius(section, horizon=horizon),
		}
	try:
		report["max_patch_diameter"] = max_patch_diameter(section)
		parts = build_microlocalizers(section,
				0.9 * report["max_patch_diameter"])
		report["microlocalizers"] = len(parts)
	except (DomainError, NumericalFailure) as e:
		report["max_patch_diameter"] = None
		report["microlocalizers"] = str(e)
	_write_report(config, "geometry.json", report)


def _is_free(spectrum):
	section = spectrum.section
	return (spectrum.n == 3 and section.kind == C.ROUND_SPHERE
			and section.radius == 1.0 and section.a == 0.0)


def _sample_pairs(spectrum, config):
	"""
	Returns the (x, y) grid of the cross-checks: x over the base point at
	each radius, y at the matching radius and angle.
	"""
	section = spectrum.section
	base = section.base_point()
	ys = [(r, section.point_at(angle))
			for r, angle in zip(config["radii"], config["angles"])]
	return [((r, base), y) for r in config["radii"] for y in ys]


def cmd_crosscheck(config, args, executor):
	"""
	Compares the Bessel-series and Cheeger-Taylor spectral measures, checks
	Stone's formula and the low-frequency profile, and the free closed forms
	on the free cone.
	"""
	spectrum = _spectrum(config, args)
	pairs = _sample_pairs(spectrum, config)
	tasks = [(lam, x, y) for lam in config["lambdas"] for x, y in pairs]

	def evaluate(task):
		lam, x, y = task
		return (spectral_measure_bessel(spectrum, lam, x, y),
				spectral_measure_ct(spectrum, lam, x, y))

	rows = []
	gaps = []
	results = executor.map(evaluate, tasks)
	for series, ct in progress(results, len(tasks), not args.quiet):
		rows.append(series.row(spectrum.section))
		rows.append(ct.row(spectrum.section))
		gaps.append(abs(series.value - ct.value) / max(abs(series.value),
				1e-300))
	_write_table(config, "crosscheck.csv", rows, C.SAMPLE_COLUMNS)

	tolerance = config.tolerances["crosscheck"]
	lams = config["lambdas"]
	off = [(x, y) for x, y in pairs if x[0] != y[0]][:5]
	report = {
			"max_gap": max(gaps),
			"dual_representation_pass": max(gaps) <= tolerance,
			"stone": stone_check(spectrum, lams[len(lams) // 2], off,
				tolerance) if off else None,
			"low_frequency": low_frequency_profile(spectrum,
				np.geomspace(1e-3, 3e-2, 6), pairs[0][0], pairs[0][1]),
		}

	if _is_free(spectrum):
		free = []
		section = spectrum.section
		for lam in lams:
			for x, y in off:
				distance = chord_distance(x[0], y[0],
						float(section.distance(x[1], y[1])))
				measure = spectral_measure_bessel(spectrum, lam, x, y).value
				resolvent = resolvent_kernel(spectrum, lam, 1, x, y)
				exactMeasure = free_spectral_measure(lam, distance)
				exactResolvent = free_resolvent(lam, distance)
				measureGap = abs(measure - exactMeasure)
				resolventGap = abs(resolvent - exactResolvent)
				free.append({
						"lambda": lam,
						"distance": distance,
						"measure": exactMeasure,
						"measure_gap": measureGap,
						"measure_relative_gap": measureGap / max(
							abs(exactMeasure), 1e-300),
						"resolvent": exactResolvent,
						"resolvent_gap": resolventGap,
						"resolvent_relative_gap": resolventGap / max(
							abs(exactResolvent), 1e-300),
					})
		report["free"] = free
		freeTolerance = config.tolerances["free_closed_form"]
		report["free_pass"] = all(
				row["measure_relative_gap"] <= freeTolerance
				and row["resolvent_relative_gap"] <= freeTolerance
				for row in free)

	_write_report(config, "crosscheck.json", report)


def cmd_decay(config, args, executor):
	"""
	Fits the dispersive decay of the band kernel, with the small-radius
	weighted profile when nu0 < (n-2)/2, and exports a kernel grid.
	"""
	spectrum = _spectrum(config, args)
	k = config["band"]

	patch = None
	try:
		parts = build_microlocalizers(spectrum.section,
				0.9 * max_patch_diameter(spectrum.section))
		base = spectrum.section.base_point()[None, :]
		weights = parts.evaluate(base)[:, 0]
		patch = (int(np.argmax(weights)), parts)
	except (DomainError, NumericalFailure) as e:
		log.warning("decay fit without microlocalizers: %s", e)

	report = decay_fit(spectrum, k, config["times"], config["radii"],
			config["offsets"], patch, config.tolerances, executor=executor)
	_write_table(config, "decay.csv", zip(report.times, report.sups),
			C.DECAY_COLUMNS)

	res = {"fit": report}
	if spectrum.nu0 < (spectrum.n - 2) / 2.0:
		small = [r * 2.0 ** (-k) for r in (0.1, 0.2, 0.4, 0.8)]
		res["small_radius"] = small_radius_profile(spectrum, k, small,
				config["times"][:2])
	_write_report(config, "decay.json", res)

	section = spectrum.section
	points = [section.point_at(angle) for angle in config["angles"]]
	grid = kernel_grid(spectrum, "halfwave", config["radii"],
			[section.base_point()], config["radii"], points, band=k,
			t=float(config["times"][0]), executor=executor,
			meta={"config_hash": config.hash})
	with open(_path(config, "decay_kernels.bin"), "wb") as out_buf:
		io.write_kernel_grid(grid, out_buf)


def cmd_strichartz(config, args, executor):
	"""
	Writes the Strichartz ratios of a seeded ensemble for every configured
	(q, p, s), on the window and on its double.
	"""
	spectrum = _spectrum(config, args).truncated(4)
	window = config["window"]
	r_max = 2 * window + 8.0
	count = C.PANEL_ORDER * panel_count(r_max, STRICHARTZ_RHO_MAX)
	grid = cone_grid(spectrum, r_max=r_max, rho_max=STRICHARTZ_RHO_MAX,
			count=count)

	rows = []
	reports = []
	for q, p, s in config["pair_values"]:
		report = strichartz_ensemble(grid, (q, p), s, config["ensemble"],
				config["seed"], window, config.tolerances["strichartz_growth"],
				executor)
		rows.extend(report["rows"])
		reports.append(report)
	_write_table(config, "strichartz.csv", rows, C.STRICHARTZ_COLUMNS)
	_write_report(config, "strichartz.json", {
			"window": window,
			"radial_range": [0.0, r_max],
			"reports": reports,
		})


def cmd_counterexample(config, args, executor):
	"""
	Writes the growth table of the truncated Strichartz norm for every
	configured exponent p.
	"""
	spectrum = _spectrum(config, args)
	reports = []
	for p in config["exponents"]:
		report = counterexample_run(spectrum, float(p), config["epsilons"])
		_write_table(config, "counterexample_p{0:g}.csv".format(p),
				report["rows"], C.COUNTEREXAMPLE_COLUMNS)
		reports.append(report)
	_write_report(config, "counterexample.json", {"runs": reports})


COMMANDS = {
		C.CMD_EIG: cmd_eig,
		C.CMD_GEOMETRY: cmd_geometry,
		C.CMD_CROSSCHECK: cmd_crosscheck,
		C.CMD_DECAY: cmd_decay,
		C.CMD_STRICHARTZ: cmd_strichartz,
		C.CMD_COUNTEREXAMPLE: cmd_counterexample,
	}


def load_config(args):
	"""
	Returns the RunConfig named by args, with command-line overrides.
	"""
	try:
		with open(args.config, "rt") as in_buf:
			config = io.read_config(in_buf)
	except OSError as e:
		raise InvalidConfig("cannot read config: {0}".format(e))

	if args.out is not None:
		config.out = args.out
	if args.threads is not None:
		if args.threads < 1:
			raise InvalidConfig("--threads must be at least 1")
		config.threads = args.threads
	if args.tol_override:
		config = io.override_tolerances(config, args.tol_override)
	return config


def main(argv=None):
	"""
	Runs the command line and returns the process exit code.
	"""
	logging.captureWarnings(True)
	try:
		args = build_parser().parse_args(argv)
		logging.basicConfig(
				level=logging.DEBUG if args.verbose else logging.WARNING,
				format="%(levelname)s %(name)s: %(message)s")
		config = load_config(args)
		os.makedirs(config.out, exist_ok=True)
		with ThreadPoolExecutor(max_workers=config.threads) as executor:
			COMMANDS[args.verb](config, args, executor)
	except ConeError as e:
		log.error("%s: %s", type(e).__name__, e)
		sys.stderr.write("conespec: {0}\n".format(e))
		return exit_code(e)
	return C.EXIT_OK


if __name__ == "__main__":
	sys.exit(main())
