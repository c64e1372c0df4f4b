"""mpcc: a compiler from an ownership-annotated imperative language to
oblivious circuits, with cost estimation and simulated execution backends."""

__version__ = "0.1.0"
