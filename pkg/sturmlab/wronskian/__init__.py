"""
Wronskian identities between eigenstates
"""
