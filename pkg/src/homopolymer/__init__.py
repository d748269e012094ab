"""Zero-range potential homopolymer model in three dimensions.

Closed-form and contour-quadrature evaluation of the point-interaction
heat kernel, exact sampling of the polymer Gibbs measure, and seeded
Monte Carlo experiments for the globular, critical and diffusive regimes.
"""

__version__ = "0.1.0"
