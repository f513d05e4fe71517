"""rackcheck: deterministic multi-agent adequacy checker for storage racks.

The package turns a natural-language description of a pallet-rack frame into
a structural verdict. A fixed cast of role agents cooperates over a shared
memory blackboard: the problem is decomposed, per-level loads are adjusted,
site hazard values are retrieved from a local corpus, equivalent lateral
forces are distributed over the load levels, member sections are sized, a 2D
frame model is generated and solved with an in-process direct-stiffness
solver, and limit-state checks produce the final adequacy verdict. Every run
emits a canonical JSON Lines trace that replays byte-for-byte.
"""

__version__ = "0.1.0"
