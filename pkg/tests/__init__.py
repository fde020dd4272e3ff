"""
Test suite for glrank
"""
