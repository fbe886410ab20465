"""Property-based tests for stream and serialization invariants."""
