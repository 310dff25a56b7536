"""
Configuration and tolerance defaults
"""
