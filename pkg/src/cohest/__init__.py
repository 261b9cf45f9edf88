"""Lower and upper bounds on the relative entropy of coherence of
multi-qubit states from a few simulated stabilizer measurements."""

__version__ = "0.1.0"
