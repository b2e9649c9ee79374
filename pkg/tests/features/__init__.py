"""Tests for the features package."""
