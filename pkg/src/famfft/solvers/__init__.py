"""Problem solvers built on multilinear monomial detection."""
