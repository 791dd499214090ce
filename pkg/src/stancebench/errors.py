"""Error types raised across the workbench.

Every error carries a stable ``name`` used by the CLI for its single-line,
machine-parsable failure category.
"""


class StancebenchError(Exception):
    """Base class; ``name`` is the stable error category."""

    @property
    def name(self) -> str:
        return type(self).__name__


# corpus
class MalformedLine(StancebenchError):
    def __init__(self, line_number: int, detail: str):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


class DanglingParent(StancebenchError):
    def __init__(self, utterance_id: str, parent_id: str):
        super().__init__(f"utterance {utterance_id!r} references missing parent {parent_id!r}")
        self.utterance_id = utterance_id
        self.parent_id = parent_id


class CycleDetected(StancebenchError):
    def __init__(self, thread_id: str):
        super().__init__(f"thread {thread_id!r} contains a parent cycle")
        self.thread_id = thread_id


class EmptyCorpus(StancebenchError):
    pass


class InsufficientThreads(StancebenchError):
    def __init__(self, target: str, count: int):
        super().__init__(f"target {target!r} has only {count} thread(s); need at least 3")
        self.target = target
        self.count = count


# annotation
class NeedsMoreAnnotators(StancebenchError):
    pass


class DegenerateMarginals(StancebenchError):
    pass


class NoEligiblePairs(StancebenchError):
    pass


class LeaseInvalid(StancebenchError):
    pass


class AlreadyLabeled(StancebenchError):
    pass


# prompt
class TemplateInvalid(StancebenchError):
    pass


class EmptyConversation(StancebenchError):
    pass


class TokenOutOfRange(StancebenchError):
    pass


class ImageMissing(StancebenchError):
    pass


# vision / fusion
class PatchGridError(StancebenchError):
    pass


class DimensionError(StancebenchError):
    pass


class NumericalError(StancebenchError):
    pass


class SequenceTooLong(StancebenchError):
    def __init__(self, required: int, maximum: int):
        super().__init__(f"sequence needs {required} positions but the maximum is {maximum}")
        self.required = required
        self.maximum = maximum


class NoTargetTokens(StancebenchError):
    pass


class ConfigInvalid(StancebenchError):
    pass


# evaluation
class PredictionGoldMismatch(StancebenchError):
    def __init__(self, missing: list[str], extra: list[str]):
        super().__init__(
            f"{len(missing)} gold id(s) without predictions, "
            f"{len(extra)} prediction(s) without gold: "
            f"missing={sorted(missing)[:5]} extra={sorted(extra)[:5]}"
        )
        self.missing = sorted(missing)
        self.extra = sorted(extra)


class DepthOutOfRange(StancebenchError):
    pass


class ProtocolError(StancebenchError):
    pass
