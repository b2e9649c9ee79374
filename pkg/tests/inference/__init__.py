"""Tests for the inference package."""
