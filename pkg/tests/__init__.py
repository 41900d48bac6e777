"""
Tests for the app.
"""
