"""CLI package for asr-benchkit."""
