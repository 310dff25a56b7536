"""
Logger setup
"""
