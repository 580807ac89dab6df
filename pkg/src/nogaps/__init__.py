"""Numerical laboratory for no-gaps delocalization of random-matrix eigenvectors.

Subpackages
-----------
ensembles   random matrix generators and distribution audits
densela     dense complex linear algebra and realification maps
structure   least common denominators, small coordinates, correlations
smallball   concentration functions and small ball bound evaluators
deloc       localization functionals, deterministic audits, experiment drivers
harness     configuration, seeded execution, statistics and the CLI
"""

__version__ = "0.1.0"
