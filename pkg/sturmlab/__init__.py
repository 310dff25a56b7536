"""
STURMLAB - One-dimensional bound-state solver and Sturm oscillation laboratory
Numerov shooting, finite-difference oracle, node and Wronskian verification
"""

__version__ = "1.0.0"
__author__ = "STURMLAB Team"
