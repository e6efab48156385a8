"""
BBShift Utils package

This module contains utility functions shared by the entire system.
Console and file logging plus structured JSON run records are included
in this package.
"""
