"""
Test package for qfisher.
"""