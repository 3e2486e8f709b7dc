"""Exception types raised by coinwalk."""


class CoinwalkError(Exception):
    """Base class for all library errors."""

    hint: str = ""


class NotUnitary(CoinwalkError, ValueError):
    pass


class InvalidCoin(CoinwalkError, ValueError):
    pass


class InvalidChannel(CoinwalkError, ValueError):
    pass


class DimensionMismatch(CoinwalkError, ValueError):
    pass


class DomainError(CoinwalkError, ValueError):
    pass


class SingularOnSubspace(CoinwalkError, ArithmeticError):
    hint = (
        "the restricted resolvent is ill-conditioned; the noise angle is too "
        "close to 0, where the long-time linear law breaks down"
    )


class WindowOverflow(CoinwalkError, RuntimeError):
    hint = "raise the density window (--steps sets it) or use --method kspace for long horizons"


class GridTooCoarse(CoinwalkError, ValueError):
    hint = "the k-grid needs at least 2*steps+1 nodes; drop --kgrid or raise it"


class EmptyWindow(CoinwalkError, ValueError):
    hint = "the fit window selects no steps of the series"


class ConfigError(CoinwalkError, ValueError):
    pass
