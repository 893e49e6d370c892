"""Command-line interface, scenario files and run reports."""
