"""
Potential Expression Parser
===========================
Tokenizes and parses the small arithmetic language used for potentials V
and drifts f. Produces an immutable expression tree over x1..xd.

Grammar:
    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' ['-'] INTEGER)?
    primary := NUMBER | VARIABLE | FUNCTION '(' expr ')' | '(' expr ')'
"""

import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

logger = logging.getLogger(__name__)


FUNCTIONS = ('sin', 'cos', 'exp', 'sinh', 'cosh', 'tanh', 'sqrt', 'abs')

# Primitives whose second derivatives are not defined everywhere
NON_SMOOTH_FUNCTIONS = ('sqrt', 'abs')

_TOKEN_PATTERN = re.compile(
    r'\s*(?:'
    r'(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<op>[-+*/^()])'
    r')'
)


class ExpressionSyntaxError(ValueError):
    """Raised when expression text does not follow the grammar"""

    def __init__(self, message: str, position: int, source: str = ''):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class DimensionMismatchError(ValueError):
    """Raised when an expression references a coordinate beyond its dimension"""


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    """Non-negative numeric literal"""
    value: float


@dataclass(frozen=True)
class Variable:
    """Coordinate x_index (1-based)"""
    index: int


@dataclass(frozen=True)
class Negate:
    """Unary minus"""
    operand: 'Node'


@dataclass(frozen=True)
class BinaryOp:
    """One of + - * /"""
    op: str
    left: 'Node'
    right: 'Node'


@dataclass(frozen=True)
class Power:
    """Integer power, exponent may be negative"""
    base: 'Node'
    exponent: int


@dataclass(frozen=True)
class Call:
    """Elementary function application"""
    func: str
    argument: 'Node'


Node = Union[Number, Variable, Negate, BinaryOp, Power, Call]


@dataclass(frozen=True)
class Token:
    kind: str  # number, name, op, end
    text: str
    position: int


@dataclass(frozen=True)
class PotentialExpr:
    """
    Parsed scalar field V: R^d -> R (also used for drifts f).

    lower_bound_shift is the constant alpha >= 0 that makes V + alpha
    non-negative on the working box; it is 0 until estimated.
    """
    ast: Node
    dim: int
    source: str = ''
    lower_bound_shift: float = 0.0
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def is_c2(self) -> bool:
        """False when a non-smooth primitive (abs, sqrt) appears"""
        return not _contains_call(self.ast, NON_SMOOTH_FUNCTIONS)

    @property
    def max_variable_index(self) -> int:
        return max(collect_variables(self.ast), default=0)

    def with_shift(self, alpha: float) -> 'PotentialExpr':
        """Copy with a new lower_bound_shift"""
        if alpha < 0:
            raise ValueError(f"lower_bound_shift must be >= 0, got {alpha}")
        return PotentialExpr(self.ast, self.dim, self.source, float(alpha), self.warnings)

    def __str__(self) -> str:
        return to_source(self.ast)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

def tokenize(source: str) -> List[Token]:
    """Split expression text into tokens with their character offsets"""
    tokens: List[Token] = []
    position = 0
    length = len(source)

    while position < length:
        if source[position:].strip() == '':
            break
        match = _TOKEN_PATTERN.match(source, position)
        if match is None or match.end() == position:
            offset = position + (len(source[position:]) - len(source[position:].lstrip()))
            raise ExpressionSyntaxError(
                f"unexpected character {source[offset]!r}", offset, source
            )
        kind = match.lastgroup
        text = match.group(kind)
        tokens.append(Token(kind, text, match.start(kind)))
        position = match.end()

    tokens.append(Token('end', '', length))
    return tokens


# ---------------------------------------------------------------------------
# Recursive descent parser
# ---------------------------------------------------------------------------

class _Parser:
    """Recursive descent over a token list"""

    def __init__(self, source: str, dim: int):
        self.source = source
        self.dim = dim
        self.tokens = tokenize(source)
        self.index = 0
        self.warnings: List[str] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None) -> ExpressionSyntaxError:
        token = token or self.current
        return ExpressionSyntaxError(message, token.position, self.source)

    def _expect(self, text: str) -> Token:
        if self.current.kind != 'op' or self.current.text != text:
            found = 'end of input' if self.current.kind == 'end' else repr(self.current.text)
            raise self._error(f"expected {text!r}, found {found}")
        return self._advance()

    def parse(self) -> Node:
        node = self._expr()
        if self.current.kind != 'end':
            raise self._error(f"unexpected token {self.current.text!r}")
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self.current.kind == 'op' and self.current.text in '+-':
            op = self._advance().text
            node = BinaryOp(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self.current.kind == 'op' and self.current.text in '*/':
            op = self._advance().text
            node = BinaryOp(op, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self.current.kind == 'op' and self.current.text == '-':
            self._advance()
            return Negate(self._unary())
        return self._power()

    def _power(self) -> Node:
        base = self._primary()
        if self.current.kind == 'op' and self.current.text == '^':
            self._advance()
            sign = 1
            if self.current.kind == 'op' and self.current.text == '-':
                self._advance()
                sign = -1
            token = self.current
            if token.kind != 'number' or not token.text.isdigit():
                raise self._error("exponent must be an integer literal", token)
            self._advance()
            base = Power(base, sign * int(token.text))
            if self.current.kind == 'op' and self.current.text == '^':
                raise self._error("chained exponents need parentheses")
        return base

    def _primary(self) -> Node:
        token = self.current

        if token.kind == 'number':
            self._advance()
            return Number(float(token.text))

        if token.kind == 'name':
            self._advance()
            variable = re.fullmatch(r'x(\d+)', token.text)
            if variable:
                index = int(variable.group(1))
                if index < 1:
                    raise self._error("variables are numbered from x1", token)
                if index > self.dim:
                    raise DimensionMismatchError(
                        f"variable x{index} at offset {token.position} exceeds dimension {self.dim}"
                    )
                return Variable(index)
            if token.text in FUNCTIONS:
                self._expect('(')
                argument = self._expr()
                self._expect(')')
                if token.text in NON_SMOOTH_FUNCTIONS:
                    self.warnings.append(
                        f"non-smooth primitive '{token.text}' at offset {token.position}; "
                        f"second derivatives may not exist everywhere"
                    )
                return Call(token.text, argument)
            raise self._error(f"unknown identifier {token.text!r}", token)

        if token.kind == 'op' and token.text == '(':
            self._advance()
            node = self._expr()
            self._expect(')')
            return node

        if token.kind == 'end':
            raise self._error("expected an operand, found end of input", token)
        raise self._error(f"expected an operand, found {token.text!r}", token)


def parse(source: str, dim: int) -> PotentialExpr:
    """
    Parse expression text into a PotentialExpr.

    Args:
        source: Expression text, e.g. "x1^2 + x2^2"
        dim: Spatial dimension d >= 1

    Returns:
        PotentialExpr with non-smoothness warnings attached

    Raises:
        ExpressionSyntaxError: Malformed text (carries the offending offset)
        DimensionMismatchError: A variable index exceeds dim
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    parser = _Parser(source, dim)
    ast = parser.parse()
    for warning in parser.warnings:
        logger.warning(warning)
    return PotentialExpr(ast=ast, dim=dim, source=source, warnings=tuple(parser.warnings))


# ---------------------------------------------------------------------------
# Canonical printer and tree helpers
# ---------------------------------------------------------------------------

def to_source(node: Node) -> str:
    """Print a tree in canonical, fully parenthesised form"""
    if isinstance(node, Number):
        return repr(float(node.value))
    if isinstance(node, Variable):
        return f"x{node.index}"
    if isinstance(node, Negate):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinaryOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Power):
        return f"({to_source(node.base)}^{node.exponent})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.argument)})"
    raise TypeError(f"not an expression node: {node!r}")


def collect_variables(node: Node) -> List[int]:
    """Sorted distinct variable indices referenced by a tree"""
    found = set()
    stack = [node]
    while stack:
        current = stack.pop()
        if isinstance(current, Variable):
            found.add(current.index)
        elif isinstance(current, Negate):
            stack.append(current.operand)
        elif isinstance(current, BinaryOp):
            stack.extend((current.left, current.right))
        elif isinstance(current, Power):
            stack.append(current.base)
        elif isinstance(current, Call):
            stack.append(current.argument)
    return sorted(found)


def _contains_call(node: Node, names: Tuple[str, ...]) -> bool:
    if isinstance(node, Call):
        return node.func in names or _contains_call(node.argument, names)
    if isinstance(node, Negate):
        return _contains_call(node.operand, names)
    if isinstance(node, BinaryOp):
        return _contains_call(node.left, names) or _contains_call(node.right, names)
    if isinstance(node, Power):
        return _contains_call(node.base, names)
    return False
