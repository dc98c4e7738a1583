"""Tests for sdds_lab."""
