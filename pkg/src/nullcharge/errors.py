"""Exception hierarchy shared by all modules."""


class NullChargeError(Exception):
    """Base class for library errors."""


class PreconditionError(NullChargeError, ValueError):
    pass


class NoIntersection(NullChargeError):
    """The past light cone of the observation point misses the worldline domain."""


class SingularRay(NullChargeError):
    """Observation point on (or within r_min of) the forward tangent null ray."""


class AmbiguousRoot(NullChargeError):
    pass


class RadiusUnderflow(NullChargeError):
    pass


class QuadratureError(NullChargeError):
    pass


class RadiationDivergence(NullChargeError):
    """The charge would have to change velocity, which radiates without bound."""

    def __init__(self, msg, t=None, states=None):
        super().__init__(msg)
        self.t = t
        self.states = states or []


class MultiplierVanished(NullChargeError):
    def __init__(self, msg, t=None, states=None):
        super().__init__(msg)
        self.t = t
        self.states = states or []


class DipoleCoreViolation(NullChargeError):
    pass


class DegenerateD(NullChargeError):
    pass


class LightConePoint(NullChargeError):
    pass
