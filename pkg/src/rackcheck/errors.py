"""Exception types raised across the pipeline.

Every module-specific error derives from RackcheckError so callers can catch
the whole family, and the failure classifier can map exception class names to
failure labels without importing each module.
"""


class RackcheckError(Exception):
    """Base class for all pipeline errors."""


# --- memory ---

class InvalidKey(RackcheckError):
    """Memory key is empty or not a string."""


class InvalidValue(RackcheckError):
    """Memory value is not canonically serializable (NaN, Inf, non-JSON type)."""


class SnapshotError(RackcheckError):
    """Snapshot file could not be read or written."""


class ParseError(RackcheckError):
    """Snapshot or trace file is not valid JSON."""


# --- protocol ---

class UnknownSchema(RackcheckError):
    """validate_payload was given a schema id that is not registered."""


class ExtractionFailed(RackcheckError):
    """No complete JSON value could be extracted from a text blob."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class TerminalState(RackcheckError):
    """advance() was called on the final pipeline state."""


# --- problem parsing ---

class DecompositionError(RackcheckError):
    """Problem text is missing a field required for decomposition."""


class ExtractionError(RackcheckError):
    """A sub-description is missing data a downstream extractor needs."""


class AdjustmentError(RackcheckError):
    """Pallet weight adjustment produced a non-positive design load."""


class GeometryError(RackcheckError):
    """Geometry text describes an inconsistent frame."""


# --- seismic retrieval ---

class IndexBuildError(RackcheckError):
    """Document is empty, nothing to index."""


class MalformedRow(RackcheckError):
    """A city row in the hazard table is missing a field."""


# --- load calculation ---

class InputError(RackcheckError):
    """Elevation/weight vectors are empty, mismatched, or out of order."""


class DegenerateDistribution(RackcheckError):
    """Sum of weight*height is zero, lateral distribution undefined."""


# --- sections ---

class SectionError(RackcheckError):
    """Section dimensions are not physically meaningful."""


class CapacityError(RackcheckError):
    """Capacity calculation is missing a required input (length, overrides)."""


# --- model building ---

class ModelError(RackcheckError):
    """Model cannot be generated from the given geometry and loads."""


class ModelValidationError(RackcheckError):
    """Generated model violates a structural consistency check."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


# --- frame analysis ---

class SingularSystem(RackcheckError):
    """Stiffness matrix is singular (mechanism or missing supports)."""

    def __init__(self, message: str, dofs: list[str] | None = None):
        super().__init__(message)
        self.dofs = dofs or []


class ComboError(RackcheckError):
    """A load combination references an unknown load case."""


# --- verification ---

class VerificationError(RackcheckError):
    """A demanded limit state has no matching capacity."""


class ContextError(RackcheckError):
    """A required memory key is absent when building the analysis context."""

    def __init__(self, key: str):
        super().__init__(f"required context key absent: {key}")
        self.key = key


# --- orchestration ---

class RegistryError(RackcheckError):
    """Duplicate or unknown tool registration."""


class ConfigError(RackcheckError):
    """Pipeline configuration is inconsistent or unusable."""


class BackendError(RackcheckError):
    """A decision backend cannot produce or deliver its step program."""


class ScoreError(RackcheckError):
    """Ground-truth document is malformed."""


class FailedStep(RackcheckError):
    """Internal carrier for a step failure before classification."""

    def __init__(self, message: str, error_type: str, step: int):
        super().__init__(message)
        self.error_type = error_type
        self.step = step


class PipelineFailure(RackcheckError):
    """Unrecoverable pipeline failure, carries the partial trace and label."""

    def __init__(self, message: str, label: str, step: int, trace=None):
        super().__init__(message)
        self.label = label
        self.step = step
        self.trace = trace
