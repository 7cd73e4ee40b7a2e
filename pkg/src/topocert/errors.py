"""Exception hierarchy shared by all topocert modules."""


class TopoCertError(Exception):
    """Base class for every error raised by this package."""


class OverlapError(TopoCertError, ValueError):
    pass


class CoverError(TopoCertError, ValueError):
    pass


class EmptyBlockError(TopoCertError, ValueError):
    pass


class DimensionCapError(TopoCertError, ValueError):
    pass


class GridError(TopoCertError, ValueError):
    pass


class ShapeError(TopoCertError, ValueError):
    pass


class ExclusivityError(TopoCertError, ValueError):
    pass


class MissingSettingError(TopoCertError, LookupError):
    pass


class ConfigError(TopoCertError, ValueError):
    """Invalid run configuration; the message names the offending field or line."""
