"""E2E smoke test package."""
