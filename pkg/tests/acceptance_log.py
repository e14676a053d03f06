"""Collects one verdict line per acceptance criterion for the end-of-run summary."""

RESULTS: list[str] = []
