"""
Utility modules for GLS Tail Toolkit
"""
