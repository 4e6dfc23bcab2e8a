"""Desk-scale limits for exact cyclotomic arithmetic.

Both caps exist to keep phi(n)-sized exact computations interactive.
They can be raised per call site (every validating constructor takes
optional overrides) but the defaults are deliberate.
"""

CONDUCTOR_CAP = 10_000
DEPTH_CAP = 8
