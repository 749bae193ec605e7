class DarkvizError(Exception):
    """Base class for processing errors raised by darkviz."""


class OutOfGamut(DarkvizError, ValueError):
    """An LCh color has no displayable sRGB equivalent."""


class AllBackground(DarkvizError):
    """Masking removed every pixel; the image has no foreground."""


class DimensionMismatch(DarkvizError, ValueError):
    pass


class InvalidConfig(DarkvizError, ValueError):
    pass


class KTooLarge(UserWarning):
    """Requested k exceeds the number of distinct foreground colors; k was clamped."""
