"""
Zero structure of eigenfunctions: nodes, interlacing, separation
"""
