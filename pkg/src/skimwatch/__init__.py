"""skimwatch: a desk-scale water-care platform.

Three cooperating pieces:

- a deterministic 2D simulation of a solar-powered, twin-thruster
  trash-skimming surface bot with waypoint guidance (``world``, ``nav``,
  ``bot``),
- a shore-side virtual-fence engine that tracks moving bodies in grayscale
  frames and counts fence crossings (``fence``),
- a ground-control service that terminates a binary telemetry link, keeps an
  append-only event log, and fans alerts out to operator clients
  (``protocol``, ``gcs``).

Everything is driven from one CLI: ``skimwatch gcs|sim|fence|gen|version``.
"""

__version__ = "0.1.0"
