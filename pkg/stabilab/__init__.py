"""
stabilab - stabilization policy as feedback control.

Library entry points live in ``stabilab.services``; the ``stabilab`` command
is defined in ``stabilab.main``.
"""

__version__ = "1.0.0"
