"""Circuit descriptions: the text format, compilation, and the Mach-Zehnder.

Text format, one statement per line, ``#`` comments to end of line::

    modes <M>                       # first significant line, M >= 1
    bs <i> <j> <theta> [aux_phase]  # beam splitter on modes i, j
    ph <i> <phi>                    # phase shift (or path phase kL) on mode i

Indices are 0-based; elements act in file order. Input port ``a1`` of the
two-mode devices is mode 0 and ``a2`` is mode 1.
"""
from dataclasses import dataclass, field
import math
import re

from .errors import CircuitSemanticError, CircuitSyntaxError, InvalidParameterError
from .transfer import TransferMatrix, compose, embed, make_beam_splitter, make_phase

BEAM_SPLITTER = "beam_splitter"
PHASE = "phase"

_KEYWORDS = {"bs": BEAM_SPLITTER, "ph": PHASE}
_INT_RE = re.compile(r"[0-9]+\Z")
_REAL_RE = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?\Z")


@dataclass(frozen=True)
class CircuitElement:
    kind: str
    modes: tuple
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(i) for i in self.modes))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == BEAM_SPLITTER:
            if len(self.modes) != 2 or len(self.params) not in (1, 2):
                raise InvalidParameterError("beam splitter needs 2 modes and theta[, aux_phase]")
            if len(self.params) == 1:
                object.__setattr__(self, "params", self.params + (0.0,))
        elif self.kind == PHASE:
            if len(self.modes) != 1 or len(self.params) != 1:
                raise InvalidParameterError("phase needs 1 mode and phi")
        else:
            raise InvalidParameterError(f"unknown element kind {self.kind!r}")
        if any(i < 0 for i in self.modes):
            raise InvalidParameterError(f"negative mode index in {self.modes}")
        if not all(math.isfinite(p) for p in self.params):
            raise InvalidParameterError(f"non-finite parameter in {self.params}")

    def matrix(self):
        if self.kind == BEAM_SPLITTER:
            return make_beam_splitter(*self.params)
        return make_phase(self.params[0])


def beam_splitter(i, j, theta, aux_phase=0.0):
    return CircuitElement(BEAM_SPLITTER, (i, j), (theta, aux_phase))


def phase(i, phi):
    return CircuitElement(PHASE, (i,), (phi,))


@dataclass(frozen=True)
class CircuitSpec:
    modes: int
    elements: tuple = ()
    source_text: str = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.modes < 1:
            raise InvalidParameterError(f"modes must be >= 1, got {self.modes}")
        for el in self.elements:
            if len(set(el.modes)) != len(el.modes):
                raise InvalidParameterError(f"repeated mode index in {el.modes}")
            for i in el.modes:
                if i >= self.modes:
                    raise InvalidParameterError(f"mode index {i} out of range")


def _tokens(line):
    """Yield ``(column, token)`` pairs, columns 1-based."""
    for m in re.finditer(r"\S+", line):
        yield m.start() + 1, m.group()


def parse_circuit(text, source=None):
    """Parse circuit text into a :class:`CircuitSpec`.

    Raises :class:`CircuitSyntaxError` or :class:`CircuitSemanticError` with
    the 1-based line and column of the offending token.
    """
    modes = None
    elements = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        col, word = toks[0]

        def syntax(msg, c):
            return CircuitSyntaxError(msg, lineno, c, source)

        def semantic(msg, c):
            return CircuitSemanticError(msg, lineno, c, source)

        def integer(c, tok):
            if not _INT_RE.match(tok):
                raise syntax(f"expected non-negative integer, got {tok!r}", c)
            return int(tok)

        def real(c, tok):
            if not _REAL_RE.match(tok):
                raise syntax(f"expected decimal number, got {tok!r}", c)
            return float(tok)

        if word == "modes":
            if len(toks) != 2:
                c = toks[2][0] if len(toks) > 2 else len(line.rstrip()) + 1
                raise syntax("'modes' takes exactly one integer", c)
            if modes is not None:
                raise semantic("duplicate 'modes' line", col)
            if elements:
                raise semantic("'modes' must come before any element", col)
            modes = integer(*toks[1])
            if modes < 1:
                raise semantic("mode count must be >= 1", toks[1][0])
            continue

        if word not in _KEYWORDS:
            raise syntax(f"unknown statement {word!r}", col)
        if modes is None:
            raise semantic("missing 'modes' header before first element", col)
        kind = _KEYWORDS[word]
        n_idx = 2 if kind == BEAM_SPLITTER else 1
        n_min, n_max = (n_idx + 1, n_idx + 2) if kind == BEAM_SPLITTER else (2, 2)
        args = toks[1:]
        if not n_min <= len(args) <= n_max:
            c = args[n_max][0] if len(args) > n_max else len(line.rstrip()) + 1
            raise syntax(f"'{word}' takes {n_min}" + (f" or {n_max}" if n_max != n_min else "")
                         + f" arguments, got {len(args)}", c)
        idx = [integer(c, t) for c, t in args[:n_idx]]
        params = [real(c, t) for c, t in args[n_idx:]]
        for (c, _), i in zip(args, idx):
            if i >= modes:
                raise semantic(f"mode index {i} out of range", c)
        if len(set(idx)) != len(idx):
            raise semantic(f"repeated mode index {idx[0]}", args[1][0])
        for (c, t), p in zip(args[n_idx:], params):
            if not math.isfinite(p):
                raise semantic(f"parameter {t!r} is not finite", c)
        elements.append(CircuitElement(kind, idx, params))

    if modes is None:
        raise CircuitSemanticError("missing 'modes' header", max(last_line, 1), 1, source)
    return CircuitSpec(modes, elements, text)


def format_circuit(spec):
    """Render ``spec`` in the text format; ``parse_circuit`` inverts it exactly."""
    lines = [f"modes {spec.modes}"]
    for el in spec.elements:
        if el.kind == BEAM_SPLITTER:
            theta, aux = el.params
            tail = f" {aux!r}" if aux != 0.0 else ""
            lines.append(f"bs {el.modes[0]} {el.modes[1]} {theta!r}{tail}")
        else:
            lines.append(f"ph {el.modes[0]} {el.params[0]!r}")
    return "\n".join(lines) + "\n"


def compile_circuit(spec):
    """Fold the elements into one transfer matrix (first element acts first)."""
    u = TransferMatrix.identity(spec.modes)
    for el in spec.elements:
        u = compose(embed(el.matrix(), el.modes, spec.modes), u)
    return u


# the contract name; ``compile_circuit`` avoids shadowing the builtin internally
compile = compile_circuit


def mach_zehnder(theta1, theta2, kl1, kl2, phi):
    """Two-mode Mach-Zehnder interferometer.

    Input beam splitter ``theta1``, arm phases ``kl1`` on mode 0 (the path
    through both transmissions) and ``kl2 + phi`` on mode 1, then the output
    beam splitter ``theta2``.
    """
    for name, v in dict(theta1=theta1, theta2=theta2, kl1=kl1, kl2=kl2, phi=phi).items():
        if not math.isfinite(v):
            raise InvalidParameterError(f"{name} must be finite, got {v!r}")
    return CircuitSpec(2, (
        beam_splitter(0, 1, theta1),
        phase(0, kl1),
        phase(1, kl2 + phi),
        beam_splitter(0, 1, theta2),
    ))


def random_circuit(modes, depth, rng):
    """Random sequence of ``depth`` beam splitters and phases on ``modes`` modes."""
    elements = []
    for _ in range(depth):
        if modes >= 2 and rng.random() < 0.6:
            i, j = rng.choice(modes, size=2, replace=False)
            elements.append(beam_splitter(i, j, rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)))
        else:
            elements.append(phase(rng.integers(modes), rng.uniform(0, 2 * math.pi)))
    return CircuitSpec(modes, elements)
