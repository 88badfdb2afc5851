"""Exception types shared across the toolkit."""


class LogPrismError(Exception):
    pass


class RingMismatch(LogPrismError):
    """Operands live over different ring descriptors."""


class NotDivisible(LogPrismError):
    """Exact division requested but the dividend is not in the divisor's ideal
    at the current precision."""


class UnsupportedDivisor(LogPrismError):
    """Divisor is not a declared nonzerodivisor of the truncated model."""


class TruncationLoss(LogPrismError):
    """Window too small to represent the requested result faithfully."""


class WindowNotStable(LogPrismError):
    """A map pushed a basis element outside its declared window box."""


class DepthExhausted(LogPrismError):
    """delta applied past the symbolic tower depth."""


class NotARootTower(LogPrismError):
    pass


class UnsupportedPushout(LogPrismError):
    pass


class ExactifyRequiresSurjection(LogPrismError):
    pass


class UnsupportedUnits(LogPrismError):
    pass


class NotALogRing(LogPrismError):
    pass


class BadEisenstein(LogPrismError):
    pass


class NotRegular(LogPrismError):
    pass


class NotCommuting(LogPrismError):
    pass


class ExtensionFailure(LogPrismError):
    pass


class ProbeFailure(LogPrismError):
    pass
