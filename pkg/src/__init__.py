"""moebius-band: bending-energy equilibria of inextensible Moebius bands."""

__version__ = "1.0.0"
