"""
Exception hierarchy for the link simulator
"""


class LinkSimError(ValueError):
    """Base class for every error the simulator raises on bad input."""


class ConfigError(LinkSimError):
    """
    Invalid scenario configuration.

    Args:
        key (str): Dotted path of the offending key, e.g. ``interferers[0].freq_hz``
        message (str): What is wrong with it
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class WaveformError(LinkSimError):
    """Waveform invariant, shape or sample-rate violation."""


class NoEyeFoundError(LinkSimError):
    """Raised when a waveform carries no transitions to align on."""
