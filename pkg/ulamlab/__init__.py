# ulamlab: moments of the generalized Ulam problem

__version__ = "1.0.0"
