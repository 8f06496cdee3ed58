"""knotcsi: configuration space integrals for long knots and 2-strand links.

Numerical Gauss-map integrals (linking number, self-linking, the Casson
type-2 invariant, general diagram-weighted type-k sums) together with the
exact combinatorics that organizes them: diagram spaces, 1T/4T/STU/IHX
relations, weight systems, and the coboundary complex of diagrams.
"""

from . import algebra, cli, diagrams, exact, geometry, integrator, projection  # noqa: F401

__version__ = "0.1.0"
