"""laxlab: numerical laboratory for Lax integrable hierarchies.

Dense complex matrix kernels, Lie dialgebra splittings and r-matrix kernels,
a catalogue of integrable models behind one interface, multitime flow
integration, and an identity-certification suite (isospectrality,
involutivity, commutativity, closure, double-zero, Sklyanin brackets).
"""

__version__ = "0.1.0"
