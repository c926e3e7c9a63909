class McNieError(Exception):
    pass


class ParameterError(McNieError, ValueError):
    pass


class ShapeError(McNieError, ValueError):
    pass


class SingularMatrixError(McNieError, ArithmeticError):
    pass


class StructureError(McNieError, ValueError):
    """Input does not have the claimed circulant/block structure."""


class GenerationError(McNieError, RuntimeError):
    """Key or code generation ran out of resampling attempts."""


class DecryptionFailure(McNieError):
    """The LRPC decoder could not recover the error (probabilistic failure)."""

    def __init__(self, reason):
        super().__init__(f"decoding failure: {reason.value}")
        self.reason = reason


class IntegrityError(McNieError):
    """Decoded error is inconsistent with c1; the ciphertext was altered."""


class FormatError(McNieError, ValueError):

    def __init__(self, msg: str, offset: int | None = None):
        if offset is not None:
            msg = f"{msg} (at byte offset {offset})"
        super().__init__(msg)
        self.offset = offset


class UnsupportedError(McNieError, NotImplementedError):
    pass
