"""Matrix weight functions on the N-torus for vector-valued nonsymmetric
Jack polynomials.

The package builds the weight function K(x) = L(x)* H L(x) from its
defining differential system and verifies, at desk scale (N = 3, 4), the
orthogonality structure it induces.
"""

__version__ = "0.1.0"
