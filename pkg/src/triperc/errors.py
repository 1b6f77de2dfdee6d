"""Exception hierarchy shared by every module of the package."""


class TriPercError(Exception):
    """Base class for all validation and usage failures raised by triperc."""


class InvalidInput(TriPercError):
    pass


class NonInvolutionTwin(InvalidInput):
    pass


class NonTriangularInnerFace(InvalidInput):
    pass


class SelfLoop(InvalidInput):
    pass


class NonSimpleBoundary(InvalidInput):
    pass


class Disconnected(InvalidInput):
    pass


class NotBoundaryEdge(TriPercError):
    pass


class NotMonochromatic(TriPercError):
    pass


class NotMonochromaticBoundary(TriPercError):
    pass


class NotAMember(TriPercError):
    pass


class IndexOutOfRange(TriPercError):
    pass


class BudgetExceeded(TriPercError):
    pass


class InconsistentNode(TriPercError):
    pass


class NodeNotFound(TriPercError):
    pass


class NotInnerVertex(TriPercError):
    pass


class BadArcSpecification(TriPercError):
    pass


class DegenerateArcs(BadArcSpecification):
    pass


class InsufficientData(TriPercError):
    pass


class BadBoundarySplit(TriPercError):
    pass
