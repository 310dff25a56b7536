"""
Base potentials and the walled family
"""
