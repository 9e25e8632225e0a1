#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

from setuptools import setup

setup(
		name="conespec",
		version="1",
		description="Spectral measures, propagators and Strichartz experiments "
			"for Schrodinger operators on product cones",
		license="WTFPL",
		packages=["conespec", "conespec.test"],
		package_data={"conespec.test": ["testdata/*"]},
		python_requires=">=3.8",
		install_requires=[
			"numpy>=1.20",
			"scipy>=1.7",
			],
		scripts=[
			"bin/conespec",
			],
		test_suite="conespec.test",
	)
