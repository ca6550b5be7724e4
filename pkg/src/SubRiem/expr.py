"""
--- Expressions ---

This module parses scalar expressions written in the chart coordinates
and evaluates them on plain floats or on (nested) dual numbers. Nesting
one dual number inside another gives exact first and second partial
derivatives, which the geometry module needs for Christoffel symbols
and density derivatives.

Grammar (lowest to highest precedence):
    sum      := product (('+' | '-') product)*
    product  := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' unary)?
    atom     := number | identifier | function '(' sum ')' | '(' sum ')'

License:  Apache-2.0 license
"""

import re
import math
from dataclasses import dataclass
from typing import Final, Tuple, Sequence, List, Optional, Union, Dict, FrozenSet

import numpy as np

try:
    from src.SubRiem.utils.errors import (
        ExpressionSyntaxError, UnknownIdentifierError, UnknownFunctionError,
        ExpressionDomainError
    )
except ImportError:
    from utils.errors import (
        ExpressionSyntaxError, UnknownIdentifierError, UnknownFunctionError,
        ExpressionDomainError
    )


SUPPORTED_FUNCTIONS: Final[Tuple[str, ...]] = (
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "abs"
)
NAMED_CONSTANTS: Final[Dict[str, float]] = {"pi": math.pi}
BINARY_OPERATORS: Final[Tuple[str, ...]] = ("+", "-", "*", "/", "^")

TOKEN_PATTERN: Final[re.Pattern] = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<identifier>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<operator>[-+*/^()]))"
)

MAX_INTEGER_EXPONENT: Final[int] = 1_000_000


@dataclass(frozen = True)
class ExprNode:
    """
    A node of a parsed expression tree.

    kind is one of "constant", "variable", "unary", "binary" or "call".
    For variables, name is the coordinate and index its position; for
    operators name is the symbol; for calls name is the function.
    """

    kind: str
    children: Tuple["ExprNode", ...] = ()
    value: float = 0.0
    name: str = ""
    index: int = -1


@dataclass(frozen = True, eq = False)
class Jet2:
    """
    Value, gradient and symmetric Hessian of a scalar at a point.
    """

    value: float
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen = True, eq = False)
class Jet1:
    """
    Value and gradient of a scalar at a point.
    """

    value: float
    grad: np.ndarray


Number = Union[float, "Dual"]


class Dual:
    """
    Dual number real + eps·ε with ε² = 0. Both parts may themselves be
    Dual numbers, which is how second derivatives are obtained.
    """

    __slots__ = ("real", "eps")


    def __init__(self, real: Number, eps: Number = 0.0) -> None:
        self.real = real
        self.eps = eps


    def __repr__(self) -> str:
        return f"Dual({self.real!r}, {self.eps!r})"


    def __add__(self, other: Number) -> "Dual":
        if isinstance(other, Dual):
            return Dual(self.real + other.real, self.eps + other.eps)

        return Dual(self.real + other, self.eps)


    __radd__ = __add__


    def __sub__(self, other: Number) -> "Dual":
        if isinstance(other, Dual):
            return Dual(self.real - other.real, self.eps - other.eps)

        return Dual(self.real - other, self.eps)


    def __rsub__(self, other: Number) -> "Dual":
        return Dual(other - self.real, -self.eps)


    def __mul__(self, other: Number) -> "Dual":
        if isinstance(other, Dual):
            return Dual(self.real * other.real, self.real * other.eps + self.eps * other.real)

        return Dual(self.real * other, self.eps * other)


    __rmul__ = __mul__


    def __truediv__(self, other: Number) -> "Dual":
        if isinstance(other, Dual):
            if real_value(other) == 0.0:
                raise ZeroDivisionError("division by zero")

            inverse = 1.0 / other.real
            return Dual(
                self.real * inverse,
                (self.eps * other.real - self.real * other.eps) * (inverse * inverse)
            )

        if other == 0.0:
            raise ZeroDivisionError("division by zero")

        return Dual(self.real / other, self.eps / other)


    def __rtruediv__(self, other: Number) -> "Dual":
        return Dual(other, 0.0) / self


    def __neg__(self) -> "Dual":
        return Dual(-self.real, -self.eps)


def real_value(number: Number) -> float:
    """
    The innermost real part of a (nested) dual number.
    """

    while isinstance(number, Dual):
        number = number.real

    return float(number)


def _part(number: Number, take_eps: bool) -> Number:
    if isinstance(number, Dual):
        return number.eps if take_eps else number.real

    return 0.0 if take_eps else number


class _EvaluationFailure(Exception):
    """
    Internal signal carrying the failing node up to the public entry points.
    """


    def __init__(self, node: ExprNode, message: str) -> None:
        super().__init__(message)
        self.node = node
        self.message = message


def _real_function(name: str, argument: float) -> float:
    if name == "log":
        if argument <= 0.0:
            raise ValueError("log of a non-positive argument")
        return math.log(argument)

    if name == "sqrt":
        if argument <= 0.0:
            raise ValueError("sqrt of a non-positive argument")
        return math.sqrt(argument)

    if name == "tan":
        if math.cos(argument) == 0.0:
            raise ValueError("tan at a pole")
        return math.tan(argument)

    if name == "abs":
        return abs(argument)

    return getattr(math, name)(argument)


def _derivative(name: str, argument: Number) -> Number:
    if name == "sin":
        return apply_function("cos", argument)
    if name == "cos":
        return -apply_function("sin", argument)
    if name == "tan":
        tangent = apply_function("tan", argument)
        return 1.0 + tangent * tangent
    if name == "exp":
        return apply_function("exp", argument)
    if name == "log":
        return 1.0 / argument
    if name == "sqrt":
        return 0.5 / apply_function("sqrt", argument)
    if name == "sinh":
        return apply_function("cosh", argument)
    if name == "cosh":
        return apply_function("sinh", argument)

    # abs
    sign = real_value(argument)
    if sign == 0.0:
        raise ValueError("abs is not differentiable at 0")
    return 1.0 if sign > 0.0 else -1.0


def apply_function(name: str, argument: Number) -> Number:
    """
    Apply a supported function to a float or a (nested) dual number.

    Args:
        name (str): One of SUPPORTED_FUNCTIONS.
        argument (Number): The argument.

    Returns:
        Number: The result, of the same nesting depth as the argument.

    Raises:
        ValueError: If the argument is outside of the function's domain.
    """

    if isinstance(argument, Dual):
        return Dual(
            apply_function(name, argument.real),
            _derivative(name, argument.real) * argument.eps
        )

    return _real_function(name, float(argument))


def _integer_power(base: Number, exponent: int) -> Number:
    if exponent < 0:
        if real_value(base) == 0.0:
            raise ValueError("zero raised to a negative power")
        return 1.0 / _integer_power(base, -exponent)

    result: Number = 1.0
    factor = base
    while exponent > 0:
        if exponent & 1:
            result = factor * result
        exponent >>= 1
        if exponent:
            factor = factor * factor

    return result


def variables(node: ExprNode) -> FrozenSet[int]:
    """
    Coordinate indices referenced by an expression.
    """

    if node.kind == "variable":
        return frozenset((node.index,))

    found: FrozenSet[int] = frozenset()
    for child in node.children:
        found = found | variables(child)

    return found


def is_constant(node: ExprNode) -> bool:
    """
    Whether an expression references no coordinate.
    """

    return len(variables(node)) == 0


def _evaluate(node: ExprNode, values: Sequence[Number]) -> Number:
    kind = node.kind

    if kind == "constant":
        return node.value

    if kind == "variable":
        return values[node.index]

    if kind == "unary":
        return -_evaluate(node.children[0], values)

    if kind == "call":
        argument = _evaluate(node.children[0], values)
        try:
            return apply_function(node.name, argument)
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise _EvaluationFailure(node, str(exc)) from exc

    left_node, right_node = node.children

    if node.name == "^":
        return _evaluate_power(node, left_node, right_node, values)

    left = _evaluate(left_node, values)
    right = _evaluate(right_node, values)

    try:
        if node.name == "+":
            return left + right
        if node.name == "-":
            return left - right
        if node.name == "*":
            return left * right
        return left / right
    except (ZeroDivisionError, OverflowError) as exc:
        raise _EvaluationFailure(node, str(exc)) from exc


def _evaluate_power(node: ExprNode, left_node: ExprNode, right_node: ExprNode,
                    values: Sequence[Number]) -> Number:
    base = _evaluate(left_node, values)

    try:
        if right_node.kind == "constant" or is_constant(right_node):
            exponent = real_value(_evaluate(right_node, values))
            if exponent == round(exponent) and abs(exponent) <= MAX_INTEGER_EXPONENT:
                return _integer_power(base, int(round(exponent)))

            if real_value(base) <= 0.0:
                raise ValueError("non-integer power of a non-positive base")
            return apply_function("exp", exponent * apply_function("log", base))

        exponent = _evaluate(right_node, values)
        if real_value(base) <= 0.0:
            raise ValueError("variable power of a non-positive base")
        return apply_function("exp", exponent * apply_function("log", base))

    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise _EvaluationFailure(node, str(exc)) from exc


def evaluate(node: ExprNode, values: Sequence[Number]) -> Number:
    """
    Evaluate an expression on floats or (nested) dual numbers.

    Args:
        node (ExprNode): The expression.
        values (Sequence[Number]): One value per coordinate.

    Returns:
        Number: The value, with the nesting depth of the inputs.

    Raises:
        ExpressionDomainError: If a subexpression is evaluated outside of its domain.
    """

    try:
        result = _evaluate(node, values)
    except _EvaluationFailure as failure:
        raise ExpressionDomainError(
            failure.message, to_source(failure.node),
            [real_value(value) for value in values]
        ) from failure

    if not math.isfinite(real_value(result)):
        raise ExpressionDomainError(
            "non-finite value", to_source(node), [real_value(value) for value in values]
        )

    return result


def eval_value(node: ExprNode, point: Sequence[float]) -> float:
    """
    Evaluate an expression to a float at a point.
    """

    return real_value(evaluate(node, [float(value) for value in point]))


def gradient_seeds(point: Sequence[float]) -> List[Dual]:
    """
    Dual numbers whose eps parts are the unit vectors, so that a single
    evaluation carries the whole gradient.
    """

    identity = np.eye(len(point))
    return [Dual(float(coordinate), identity[k]) for k, coordinate in enumerate(point)]


def gradient_of(result: Number, dimension: int) -> np.ndarray:
    """
    The gradient carried by a result of an evaluation on gradient_seeds.
    """

    if isinstance(result, Dual):
        return np.broadcast_to(np.asarray(result.eps, dtype = float), (dimension,)).copy()

    return np.zeros(dimension)


def eval_jet1(node: ExprNode, point: Sequence[float]) -> Jet1:
    """
    Value and exact gradient in one forward pass.

    Args:
        node (ExprNode): The expression.
        point (Sequence[float]): The evaluation point.

    Returns:
        Jet1: The value and gradient.
    """

    result = evaluate(node, gradient_seeds(point))
    return Jet1(real_value(result), gradient_of(result, len(point)))


def _nested_seeds(point: Sequence[float], first: int, second: int) -> List[Dual]:
    return [
        Dual(
            Dual(coordinate, 1.0 if k == first else 0.0),
            Dual(1.0 if k == second else 0.0, 0.0)
        )
        for k, coordinate in enumerate(point)
    ]


def eval_mixed_partial(node: ExprNode, point: Sequence[float], first: int, second: int) -> float:
    """
    The second partial derivative with the inner dual seeded along `first`
    and the outer dual along `second`.
    """

    result = evaluate(node, _nested_seeds([float(value) for value in point], first, second))
    return real_value(_part(_part(result, True), True))


def eval_jet2(node: ExprNode, point: Sequence[float]) -> Jet2:
    """
    Value, gradient and Hessian via nested dual numbers. Each pair i <= j
    is seeded once and the Hessian is filled symmetrically.

    Args:
        node (ExprNode): The expression.
        point (Sequence[float]): The evaluation point.

    Returns:
        Jet2: The exact second order jet.

    Raises:
        ExpressionDomainError: If the point is outside of the expression's domain.
    """

    point = [float(value) for value in point]
    dimension = len(point)
    grad = np.zeros(dimension)
    hess = np.zeros((dimension, dimension))

    used = sorted(variables(node))
    if not used:
        return Jet2(eval_value(node, point), grad, hess)

    value = None
    for position, first in enumerate(used):
        for second in used[position:]:
            result = evaluate(node, _nested_seeds(point, first, second))
            inner = _part(result, False)
            value = real_value(_part(inner, False))
            if first == second:
                grad[first] = real_value(_part(inner, True))

            mixed = real_value(_part(_part(result, True), True))
            hess[first, second] = mixed
            hess[second, first] = mixed

    return Jet2(value, grad, hess)


def _syntax_error(error_class: type, message: str, source: str, position: int):
    return error_class(message, source, position)


def _tokenize(source: str) -> List[Tuple[str, str, int]]:
    tokens = []
    position = 0
    length = len(source)

    while position < length:
        if source[position:].strip() == "":
            break

        match = TOKEN_PATTERN.match(source, position)
        if match is None or match.end() == position:
            offset = position + (len(source[position:]) - len(source[position:].lstrip()))
            raise ExpressionSyntaxError(
                f"unexpected character '{source[offset]}'", source, offset
            )

        for kind in ("number", "identifier", "operator"):
            text = match.group(kind)
            if text is not None:
                tokens.append((kind, text, match.start(kind)))
                break

        position = match.end()

    tokens.append(("end", "", length))
    return tokens


def parse(source: str, coords: Sequence[str]) -> ExprNode:
    """
    Parse an expression over the given coordinate names.

    Args:
        source (str): The expression text.
        coords (Sequence[str]): The declared coordinate names, in chart order.

    Returns:
        ExprNode: The expression tree.

    Raises:
        ExpressionSyntaxError: On malformed input, with the character position.
        UnknownIdentifierError: If an identifier is not a coordinate or `pi`.
        UnknownFunctionError: If a called function is not supported.
    """

    if not isinstance(source, str) or source.strip() == "":
        raise ExpressionSyntaxError("empty expression", str(source), 0)

    coordinate_index = {name: index for index, name in enumerate(coords)}
    tokens = _tokenize(source)
    cursor = 0

    def peek() -> Tuple[str, str, int]:
        return tokens[cursor]

    def advance() -> Tuple[str, str, int]:
        nonlocal cursor
        token = tokens[cursor]
        cursor += 1
        return token

    def expect(text: str) -> None:
        kind, token_text, position = advance()
        if kind != "operator" or token_text != text:
            found = "end of input" if kind == "end" else f"'{token_text}'"
            raise ExpressionSyntaxError(f"expected '{text}' but found {found}", source, position)

    def parse_sum() -> ExprNode:
        result = parse_product()
        while peek()[0] == "operator" and peek()[1] in ("+", "-"):
            operator = advance()[1]
            result = binary(operator, result, parse_product())
        return result

    def parse_product() -> ExprNode:
        result = parse_unary()
        while peek()[0] == "operator" and peek()[1] in ("*", "/"):
            operator = advance()[1]
            result = binary(operator, result, parse_unary())
        return result

    def parse_unary() -> ExprNode:
        if peek()[0] == "operator" and peek()[1] == "-":
            advance()
            return ExprNode("unary", (parse_unary(),), name = "-")
        return parse_power()

    def parse_power() -> ExprNode:
        base = parse_atom()
        if peek()[0] == "operator" and peek()[1] == "^":
            advance()
            return binary("^", base, parse_unary())
        return base

    def parse_atom() -> ExprNode:
        kind, text, position = advance()

        if kind == "number":
            return ExprNode("constant", value = float(text))

        if kind == "identifier":
            is_call = peek()[0] == "operator" and peek()[1] == "("

            if is_call:
                if text not in SUPPORTED_FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function '{text}'", source, position)
                advance()
                argument = parse_sum()
                expect(")")
                return ExprNode("call", (argument,), name = text)

            if text in coordinate_index:
                return ExprNode("variable", name = text, index = coordinate_index[text])
            if text in NAMED_CONSTANTS:
                return ExprNode("constant", value = NAMED_CONSTANTS[text], name = text)
            if text in SUPPORTED_FUNCTIONS:
                raise ExpressionSyntaxError(
                    f"expected '(' after function '{text}'", source, position + len(text)
                )
            raise UnknownIdentifierError(f"unknown identifier '{text}'", source, position)

        if kind == "operator" and text == "(":
            inner = parse_sum()
            expect(")")
            return inner

        found = "end of input" if kind == "end" else f"'{text}'"
        raise ExpressionSyntaxError(f"unexpected {found}", source, position)

    tree = parse_sum()
    kind, text, position = peek()
    if kind != "end":
        raise ExpressionSyntaxError(f"unexpected '{text}'", source, position)

    return tree


def to_source(node: ExprNode) -> str:
    """
    Pretty print an expression fully parenthesised; the text parses back
    to an equal tree.
    """

    if node.kind == "constant":
        if node.name:
            return node.name
        return repr(float(node.value))

    if node.kind == "variable":
        return node.name

    if node.kind == "unary":
        return "(-" + to_source(node.children[0]) + ")"

    if node.kind == "call":
        return node.name + "(" + to_source(node.children[0]) + ")"

    left, right = node.children
    return "(" + to_source(left) + " " + node.name + " " + to_source(right) + ")"


# Builders

def constant(value: float) -> ExprNode:
    """
    A constant node; negative values become a negation so that the tree
    survives a print/parse round trip.
    """

    value = float(value)
    if value < 0.0:
        return ExprNode("unary", (ExprNode("constant", value = -value),), name = "-")

    return ExprNode("constant", value = value)


def variable(name: str, index: int) -> ExprNode:
    return ExprNode("variable", name = name, index = index)


def negate(node: ExprNode) -> ExprNode:
    return ExprNode("unary", (node,), name = "-")


def binary(operator: str, left: ExprNode, right: ExprNode) -> ExprNode:
    """
    A binary operator node.
    """

    if operator not in BINARY_OPERATORS:
        raise ValueError(f"unsupported operator '{operator}'")

    return ExprNode("binary", (left, right), name = operator)


def call(function: str, argument: ExprNode) -> ExprNode:
    if function not in SUPPORTED_FUNCTIONS:
        raise ValueError(f"unsupported function '{function}'")

    return ExprNode("call", (argument,), name = function)


def determinant_expression(grid: Sequence[Sequence[ExprNode]]) -> ExprNode:
    """
    The determinant of a square grid of expressions by cofactor expansion
    along the first row.

    Args:
        grid (Sequence[Sequence[ExprNode]]): grid[i][j] is the (i, j) entry.

    Returns:
        ExprNode: An expression for the determinant.
    """

    size = len(grid)
    if size == 1:
        return grid[0][0]

    result: Optional[ExprNode] = None
    for column in range(size):
        minor = [
            [row[k] for k in range(size) if k != column]
            for row in grid[1:]
        ]
        term = binary("*", grid[0][column], determinant_expression(minor))

        if result is None:
            result = term if column % 2 == 0 else negate(term)
        elif column % 2 == 0:
            result = binary("+", result, term)
        else:
            result = binary("-", result, term)

    return result


if __name__ == "__main__":
    print("expr.py: This file is not designed to be executed.")
