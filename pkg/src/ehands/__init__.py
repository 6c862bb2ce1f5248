"""Expectation-value arithmetic circuits: build, simulate, count."""
