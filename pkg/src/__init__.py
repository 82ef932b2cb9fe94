"""Verified sphere packings built from independent sets of lattice graphs."""
