"""Acceptance criteria: oracle agreement, gradient checks and synthetic-corpus runs."""
