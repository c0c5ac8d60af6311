"""Bundled scenario files (loaded via scenario.bundled_scenario)."""
