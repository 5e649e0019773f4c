"""fablink: links CAD design features with manufacturing process data.

Subsystems: step (Part 21 parsing), geometry (B-rep features + fixtures),
telemetry (machine protocol, subscriber, simulator), store (article-keyed
persistence and aggregation), model (regression training/inference),
server (HTTP platform), cli.
"""

__version__ = "0.1.0"
