"""Small quantum cohomology of Fano threefolds obtained by blowing up P^3 or
Q^3 along one or two disjoint rational curves."""

__version__ = "0.1.0"
