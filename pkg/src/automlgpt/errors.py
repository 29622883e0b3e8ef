"""Exception types shared across the package.

Grouped here so the CLI and HTTP service can map error classes to exit
codes / status codes in one place.
"""


class AutoMlError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"


# --- card parsing -----------------------------------------------------------

class CardError(AutoMlError):
    """Base for card-document failures; carries an optional field path."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class MalformedDocument(CardError):
    code = "malformed_document"


class SchemaViolation(CardError):
    code = "schema_violation"


class EmptyLabelSpace(CardError):
    """Label space empty, or degenerate after canonicalization."""

    code = "empty_label_space"


class DefaultOutOfDomain(CardError):
    code = "default_out_of_domain"


# --- registry ---------------------------------------------------------------

class RegistryError(AutoMlError):
    pass


class InvalidRecord(RegistryError):
    code = "invalid_record"


class RegressionRejected(RegistryError):
    code = "regression_rejected"


class UnknownModelCard(RegistryError):
    code = "unknown_model_card"


class IoFailure(RegistryError):
    code = "io_failure"


class CorruptRegistry(RegistryError):
    code = "corrupt_registry"


# --- composer ---------------------------------------------------------------

class EmptyLog(AutoMlError):
    code = "empty_log"


# --- encoder ----------------------------------------------------------------

class DimensionMismatch(AutoMlError):
    code = "dimension_mismatch"


# --- transfer ---------------------------------------------------------------

class NoNeighbors(AutoMlError):
    code = "no_neighbors"


class IncompatibleConfigs(AutoMlError):
    code = "incompatible_configs"


# --- backend ----------------------------------------------------------------

class BackendError(AutoMlError):
    pass


class MalformedPrompt(BackendError):
    code = "malformed_prompt"


class MissingSection(BackendError):
    code = "missing_section"


class EmptyHyperparameters(BackendError):
    code = "empty_hyperparameters"


class BadLogLine(BackendError):
    code = "bad_log_line"

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class NonMonotoneEpochs(BackendError):
    code = "non_monotone_epochs"


class EndpointUnreachable(BackendError):
    code = "endpoint_unreachable"


class AuthFailure(BackendError):
    code = "auth_failure"


class BudgetExceeded(BackendError):
    code = "budget_exceeded"


# --- tuner ------------------------------------------------------------------

class BadConstraint(AutoMlError):
    code = "bad_constraint"

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class AllCandidatesFiltered(AutoMlError):
    code = "all_candidates_filtered"


class EmptyGrid(AutoMlError):
    code = "empty_grid"


# --- bench ------------------------------------------------------------------

class DivergedTraining(AutoMlError):
    code = "diverged_training"


# --- service ----------------------------------------------------------------

class UnknownSession(AutoMlError):
    code = "unknown_session"


class WrongState(AutoMlError):
    code = "wrong_state"


class SessionBusy(AutoMlError):
    code = "session_busy"
