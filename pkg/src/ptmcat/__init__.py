"""ptmcat: mine a model hub for SE-relevant pre-trained models and catalogue them."""

__version__ = "0.1.0"
