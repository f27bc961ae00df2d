class CapabilityError(RuntimeError):
    """Problem size exceeds what the chosen engine supports."""


class NumericalError(ArithmeticError):
    """A numerical self-check failed (e.g. non-negligible imaginary part)."""
