"""
--- Errors ---

This module defines the exceptions raised by the library. Every exception
carries the process exit code the command line interface reports for it.

License:  Apache-2.0 license
"""

from typing import Optional, Sequence


class SubRiemError(Exception):
    """
    Base class for all errors raised by SubRiem.
    """

    exit_code: int = 1


class SpecError(SubRiemError):
    """
    A spec file or expression could not be parsed or is inconsistent.
    """

    exit_code = 2


class ExpressionSyntaxError(SpecError):
    """
    Raised when an expression does not follow the grammar.
    """


    def __init__(self, message: str, source: str, position: int) -> None:
        """
        Args:
            message (str): What went wrong.
            source (str): The full expression text.
            position (int): Zero based character offset of the offending token.
        """

        super().__init__(f"{message} at position {position} in '{source}'")
        self.source = source
        self.position = position


class UnknownIdentifierError(ExpressionSyntaxError):
    """
    Raised when an identifier is neither a coordinate nor a named constant.
    """


class UnknownFunctionError(ExpressionSyntaxError):
    """
    Raised when a function call names an unsupported function.
    """


class DomainError(SubRiemError):
    """
    A computation left the domain of the chart or of an expression.
    """

    exit_code = 3


class ExpressionDomainError(DomainError):
    """
    Raised when an expression is evaluated outside of its domain.
    """


    def __init__(self, message: str, subexpression: str,
                 point: Optional[Sequence[float]] = None) -> None:
        """
        Args:
            message (str): What went wrong.
            subexpression (str): Source of the failing subexpression.
            point (Optional[Sequence[float]]): The evaluation point, when known.
        """

        text = f"{message} in '{subexpression}'"
        if point is not None:
            text += " at point (" + ", ".join(repr(float(value)) for value in point) + ")"

        super().__init__(text)
        self.subexpression = subexpression
        self.point = None if point is None else tuple(float(value) for value in point)


class SingularFrameError(DomainError):
    """
    Raised when the frame matrix is not invertible at a point.
    """


class NonPositiveDensityError(DomainError):
    """
    Raised when a volume density or modular function is not strictly positive.
    """


class NotASubLaplacianError(DomainError):
    """
    Raised when an operator's second order part differs from the cometric.
    """


class FlowDomainError(DomainError):
    """
    Raised when a Hamilton-Jacobi trajectory leaves the domain or blows up.
    """


    def __init__(self, message: str, step: int) -> None:
        """
        Args:
            message (str): What went wrong.
            step (int): Index of the integration step that failed.
        """

        super().__init__(f"{message} (step {step})")
        self.step = step


class MissingInputError(SubRiemError):
    """
    Raised when an operation needs an input the caller did not provide.
    """

    exit_code = 4


if __name__ == "__main__":
    print("errors.py: This file is not designed to be executed.")
