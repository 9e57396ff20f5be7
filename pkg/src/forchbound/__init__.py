"""forchbound: Forchheimer gas-flow solver and explicit a-priori bound certification."""

__version__ = "0.1.0"
