"""Word embedding laboratory: CBOW training swept over context-window sampling scales.

Subpackages and modules:

corpus
    Text cleanup, vocabulary building, token-id streams.
cbow
    CBOW training with negative sampling and the scale-dependent window law.
embio
    Embedding persistence (native provenance format + interoperable binary format).
sweep
    Scale-grid training orchestration with replicas, resume, and manifests.
analogy
    4-tuple analogical reasoning evaluation and accuracy-vs-scale curves.
neighbors
    Similarity curves, crossover detection, neighbor catalogs, peak-scale histograms.
cli
    Command-line driver wiring the pipeline together.
"""

__version__ = "0.1.0"
