"""Test suite for crestline.

Covers:
- Vorticity models and their registry
- Laminar streams, critical constants and the cusp diagram
- The dispersion root and onset waves
- The discrete height-function system and its Jacobian
- Certification bounds and branch classification
- Checkpoint/resume, branch logs and the command line
- Thread safety of the registries and parallel sweeps
"""
