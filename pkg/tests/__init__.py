"""Tests for AOL-CLI Fire Edition."""
