"""Card-driven AutoML assistant.

Data cards and model cards are composed into a fixed-format prompt, a
pluggable backend answers with a four-section response ending in a
predicted training log, and hyperparameters for unseen datasets are
recommended by similarity-weighted transfer from a registry of tuned
datasets.
"""

__version__ = "0.1.0"
