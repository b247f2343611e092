"""Command handlers and the runner that turns them into reports."""
