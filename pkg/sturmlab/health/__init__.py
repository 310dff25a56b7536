"""
Verification suite runner
"""
