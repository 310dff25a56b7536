"""
Bound-state solvers: Numerov shooting and the finite-difference oracle
"""
