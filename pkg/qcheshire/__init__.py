"""qcheshire - desk-scale simulation of a single-photon quantum Cheshire cat
"""

__version__ = "0.3.0"
