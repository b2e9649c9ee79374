"""Tests for the boosting package."""
