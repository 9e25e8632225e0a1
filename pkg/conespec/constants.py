# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

BUNDLE_MAGIC = b'CSPB'
KERNELGRID_MAGIC = b'CSKG'

# Kinds of cross-section understood by the config reader.
ROUND_SPHERE     = "round_sphere"
GALERKIN_SPHERE2 = "galerkin_sphere2"
FLAT_TORUS       = "flat_torus"
SPHEROID         = "spheroid"

SECTION_KINDS = (ROUND_SPHERE, GALERKIN_SPHERE2, FLAT_TORUS, SPHEROID)

# Magnetic potentials on the Galerkin sphere.
MAGNETIC_NONE       = "none"
MAGNETIC_ROTATIONAL = "rotational"
MAGNETIC_GRADIENT   = "gradient"

# CLI verbs.
CMD_EIG            = "eig"
CMD_GEOMETRY       = "geometry"
CMD_CROSSCHECK     = "crosscheck"
CMD_DECAY          = "decay"
CMD_STRICHARTZ     = "strichartz"
CMD_COUNTEREXAMPLE = "counterexample"

COMMANDS = (CMD_EIG, CMD_GEOMETRY, CMD_CROSSCHECK, CMD_DECAY, CMD_STRICHARTZ,
		CMD_COUNTEREXAMPLE)

# Exit codes.
EXIT_OK        = 0
EXIT_USAGE     = 1
EXIT_DOMAIN    = 2
EXIT_NUMERICAL = 3

# Representation tags for spectral-measure samples.
BESSEL_SERIES  = "bessel_series"
CHEEGER_TAYLOR = "cheeger_taylor"

# Evaluation branches of the Bessel function.
METHOD_SERIES     = "series"
METHOD_ASYMPTOTIC = "asymptotic"
METHOD_UNIFORM    = "uniform"

# Below this radius the power series is used, above it the j+/j- phase form
# outside the turning point and the uniform large-order expansion inside.
SERIES_RADIUS = 12.0
SERIES_TERMS  = 64

# Mode truncation: keep orders nu <= ceil(e * lambda * r / 2) + MODE_MARGIN.
MODE_MARGIN = 20

# Geometry.
HORIZON_EPSILON  = 0.05
SHOOTING_SAMPLES = 720
FLOW_RTOL        = 1e-10
FLOW_ATOL        = 1e-12

# Microlocalizers: the finest node grid centres are drawn from, and the number
# of centres whose bumps are evaluated at once.
MAX_COVER_DEGREE = 1024
BUMP_CHUNK       = 256

# Radial grid default: nodes on [RADIAL_MIN, RADIAL_MAX].
RADIAL_NODES = 400
RADIAL_MIN   = 0.05
RADIAL_MAX   = 8.0

# Oscillation resolution: phase advance per quadrature node.
MAX_PHASE_STEP = 0.5

# Galerkin basis.
GALERKIN_DEGREE = 24

# Strichartz time window.
STRICHARTZ_WINDOW = 64.0

POSITIVITY_EPS = 1e-12

# Tolerances a run may override with --tol-override KEY=VAL.
DEFAULT_TOLERANCES = {
		"galerkin": 1e-6,
		"tail": 1e-10,
		"quadrature": 1e-10,
		"crosscheck": 1e-3,
		"free_closed_form": 1e-4,
		"decay_slope": 0.15,
		"decay_refine": 0.03,
		"strichartz_growth": 0.25,
	}

# Headings of the CSV tables.
SAMPLE_COLUMNS = ("lambda", "r1", "r2", "angular_distance", "re", "im",
		"representation_tag")
DECAY_COLUMNS = ("t", "sup_abs_kernel")
STRICHARTZ_COLUMNS = ("member", "q", "p", "s", "window", "ratio")
COUNTEREXAMPLE_COLUMNS = ("epsilon", "norm", "norm_pow_p", "law")


# Every key a run configuration may carry, with its default. Lists are
# materialised into the output so a run can be audited afterwards.
DEFAULTS = {
		"n": 3,
		"section": {"kind": ROUND_SPHERE, "dim": 2, "radius": 1.0, "a": 0.0},
		"count": 400,
		"horizon_epsilon": HORIZON_EPSILON,
		"lambdas": [0.5, 1.0, 1.5, 2.0, 2.5],
		"radii": [1.0, 1.5, 2.0],
		"angles": [0.0, 0.7, 2.0],
		"band": 0,
		"times": [4.0, 8.0, 16.0, 32.0, 64.0],
		"offsets": [-0.5, 0.0, 0.5],
		"pairs": [["inf", 2, 0.0], [4, 4, 0.5]],
		"ensemble": 10,
		"seed": 0,
		"window": STRICHARTZ_WINDOW,
		"epsilons": [1e-1, 1e-2, 1e-3],
		"exponents": [6, 12, 24],
		"tolerances": DEFAULT_TOLERANCES,
	}

# Keys that do not change the mathematics of a run.
NON_SEMANTIC_KEYS = ("out", "threads")

# Composite Gauss-Legendre quadrature: nodes per panel, phase per panel and
# the number of geometric panels packed against a singular end point.
PANEL_ORDER     = 16
MAX_PANEL_PHASE = 6.0
GRADING_LEVELS  = 8

# Largest s-quadrature a Cheeger-Taylor evaluation may use, and the s beyond
# which the e^(-s nu) branch is integrated as a Fourier-weighted tail.
CT_NODE_BUDGET = 8192
POISSON_SPLIT  = 3.0
