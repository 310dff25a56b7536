"""
Wall-separation homotopy: sweeps, branches, analytic references
"""
