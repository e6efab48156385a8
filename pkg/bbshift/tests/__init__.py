"""
BBShift Tests package

This module contains test files for system components.
Unit tests cover each module against exact oracles; integration tests run
the Monte-Carlo acceptance studies and the command line end to end.
"""
