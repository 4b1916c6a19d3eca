"""Exact combinatorics of sink-disk-free splittings for genus-one doubly pointed diagrams."""
