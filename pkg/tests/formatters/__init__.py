"""Tests for crestline report formatters."""
