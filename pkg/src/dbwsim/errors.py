"""Exception types shared across the package."""


class RangeError(ValueError):
    """An input is outside its admissible range."""


class EncodeError(ValueError):
    """A wire frame violates its invariants and cannot be encoded."""


class SupplyFaultError(RuntimeError):
    """Measured logic-supply voltage outside the plausible band.

    Callers translate this into a SupplyReading event for the safety
    supervisor rather than continuing to drive.
    """

    def __init__(self, volts: float, band: tuple):
        self.volts = volts
        self.band = band
        super().__init__(f"supply {volts:.3f} V outside plausible band {band}")


class BusError(ValueError):
    """Unknown topic or payload/schema mismatch on the in-process bus."""


class ConfigError(ValueError):
    """A configuration file is missing keys or carries invalid values."""
