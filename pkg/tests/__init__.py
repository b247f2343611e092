"""Tests for asr-benchkit."""
