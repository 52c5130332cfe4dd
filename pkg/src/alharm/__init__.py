"""Harmonic analysis on filtered abelian groups.

Modules, from the bottom up:

``finabel``   finite abelian groups, Fourier transform, image operations
``archimed``  Hermite-basis Schwartz space on R, tori and lattices
``filt1``     one-level filtered objects and admissible triples
``harm1``     Schwartz functions and distributions on one-level objects
``filt2``     two-level objects over F_q((u))((t)) and their automorphisms
``vmeas``     virtual measures between filtration levels
``harm2``     two-level Fourier transform, image operations, Poisson formulas
``centext``   central extension of automorphisms and its representation
``adelic``    truncated adelic complexes for curves and surfaces
``cli``       verification suites and reports
"""

__version__ = "0.1.0"
