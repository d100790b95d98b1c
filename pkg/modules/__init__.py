"""
GLS Tail Toolkit - Computation Modules
"""

__version__ = "1.0.0"
