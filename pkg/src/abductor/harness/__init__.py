"""File formats, generators, verification sweeps, benchmarks, and the CLI."""
