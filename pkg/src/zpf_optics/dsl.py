"""Line-oriented experiment description language.

A program declares modes, sources, an ordered element pipeline, detectors,
and post-selection predicates; parameters may carry sweep ranges.  Angles
accept `deg` or `rad` suffixes and are normalized to radians internally.
The hidden-variable draw plan of a parsed spec is fixed by declaration
order: sources first, then vacuum-consuming elements (polarizers) in
pipeline order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .core import GlobalConfig
from .detect import And, Click, NoClick, Not, Or, Predicate, predicate_detectors

ELEMENT_KINDS = ("bs", "hwp", "phase", "mirror_swap", "polarizer", "pbs", "pdbs")
TWO_MODE_KINDS = ("bs", "mirror_swap", "pbs", "pdbs")
ANGLE_KINDS = ("hwp", "phase", "polarizer")
SOURCE_KINDS = ("laser", "vacuum", "entangled")

DEG = math.pi / 180.0


# --- errors ----------------------------------------------------------------

class DslError(Exception):
    """Base class for all DSL rejections; carries a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class LexicalError(DslError):
    pass


class ParseError(DslError):
    pass


class SemanticError(DslError):
    pass


class UnknownBuiltinError(DslError):
    pass


# --- tokens ----------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # WORD, NUMBER, STRING, SYMBOL, NEWLINE, EOF
    text: str
    line: int
    col: int
    value: object = None
    unit: Optional[str] = None


_SYMBOLS = ("->", "(", ")", ",", "=", "&", "|", "!")
_WORD_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_WORD_CHARS = _WORD_START | set("0123456789")
_DIGITS = set("0123456789")


def tokenize(text: str) -> List[Token]:
    """Split a program into tokens; numbers absorb a following deg/rad
    unit word.  Raises LexicalError with position on illegal input."""

    tokens: List[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                advance()
            continue
        if ch == "\n":
            if tokens and tokens[-1].kind != "NEWLINE":
                tokens.append(Token("NEWLINE", "\n", line, col))
            advance()
            continue
        if ch in " \t\r":
            advance()
            continue
        if ch in _WORD_START:
            start_line, start_col = line, col
            j = i
            while j < n and text[j] in _WORD_CHARS:
                j += 1
            word = text[i:j]
            advance(j - i)
            tokens.append(Token("WORD", word, start_line, start_col))
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] not in ('"', "\n"):
                j += 1
            if j >= n or text[j] != '"':
                raise LexicalError("unterminated string literal", start_line, start_col)
            value = text[i + 1:j]
            advance(j - i + 1)
            tokens.append(Token("STRING", value, start_line, start_col, value=value))
            continue
        if ch in _DIGITS or ch == "." or (ch == "-" and i + 1 < n and (text[i + 1] in _DIGITS or text[i + 1] == ".")):
            tokens.append(_lex_number(text, i, line, col, advance))
            continue
        if ch == "-" and text[i:i + 2] == "->":
            tokens.append(Token("SYMBOL", "->", line, col))
            advance(2)
            continue
        if ch in "(),=&|!":
            tokens.append(Token("SYMBOL", ch, line, col))
            advance()
            continue
        raise LexicalError(f"illegal character {ch!r}", line, col)
    return tokens


def _lex_number(text: str, i: int, line: int, col: int, advance) -> Token:
    n = len(text)
    j = i
    if text[j] == "-":
        j += 1
    int_digits = 0
    while j < n and text[j] in _DIGITS:
        j += 1
        int_digits += 1
    frac_digits = 0
    if j < n and text[j] == ".":
        j += 1
        while j < n and text[j] in _DIGITS:
            j += 1
            frac_digits += 1
    if int_digits == 0 and frac_digits == 0:
        raise LexicalError("malformed number", line, col)
    if j < n and text[j] in "eE":
        j += 1
        if j < n and text[j] in "+-":
            j += 1
        exp_digits = 0
        while j < n and text[j] in _DIGITS:
            j += 1
            exp_digits += 1
        if exp_digits == 0:
            raise LexicalError("malformed exponent in number", line, col)
    if j < n and text[j] in _WORD_START:
        # a directly attached word is either a unit suffix or an error
        k = j
        while k < n and text[k] in _WORD_CHARS:
            k += 1
        suffix = text[j:k]
        if suffix not in ("deg", "rad"):
            raise LexicalError(f"malformed number suffix {suffix!r}", line, col)
        value = float(text[i:j])
        advance(k - i)
        return Token("NUMBER", text[i:k], line, col, value=value, unit=suffix)
    literal = text[i:j]
    end = j
    # a unit word separated by spaces also attaches to the number
    k = j
    while k < n and text[k] in " \t":
        k += 1
    if k < n and text[k] in _WORD_START:
        m = k
        while m < n and text[m] in _WORD_CHARS:
            m += 1
        if text[k:m] in ("deg", "rad"):
            advance(m - i)
            return Token("NUMBER", text[i:m], line, col, value=float(literal), unit=text[k:m])
    advance(end - i)
    return Token("NUMBER", literal, line, col, value=float(literal))


# --- spec data model ---------------------------------------------------------

@dataclass(frozen=True)
class SweepRange:
    """Inclusive arithmetic range start..stop by step, or an explicit
    value list."""

    start: float = 0.0
    stop: float = 0.0
    step: float = 0.0
    values: Optional[Tuple[float, ...]] = None

    def expand(self) -> Tuple[float, ...]:
        if self.values is not None:
            if not self.values:
                raise ValueError("empty sweep value list")
            return tuple(self.values)
        if self.step <= 0.0:
            raise ValueError("sweep step must be positive")
        if self.stop < self.start:
            raise ValueError("sweep stop must be >= start")
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return tuple(self.start + k * self.step for k in range(count))


ParamValue = Union[float, SweepRange]
AngleArg = Union[float, str]


@dataclass(frozen=True)
class SourceDecl:
    kind: str
    params: Tuple[Tuple[str, AngleArg], ...]
    targets: Tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ElementDecl:
    kind: str
    modes: Tuple[str, ...]
    angle: Optional[AngleArg] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DetectorDecl:
    name: str
    mode: str
    gamma: Optional[float] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ExperimentSpec:
    """A parsed, validated experiment pipeline."""

    name: str
    config: GlobalConfig
    params: Tuple[Tuple[str, ParamValue], ...]
    modes: Tuple[str, ...]
    sources: Tuple[SourceDecl, ...]
    elements: Tuple[ElementDecl, ...]
    detectors: Tuple[DetectorDecl, ...]
    postselect: Optional[Predicate] = None
    condition: Optional[Predicate] = None
    trials: int = 1_000_000
    seed: int = 0
    witness_settings: object = field(default=None, compare=False)

    @property
    def param_dict(self) -> Dict[str, ParamValue]:
        return dict(self.params)

    def with_params(self, **overrides: ParamValue) -> "ExperimentSpec":
        known = self.param_dict
        for name in overrides:
            if name not in known:
                raise KeyError(f"experiment {self.name!r} has no parameter {name!r}")
        new = tuple((k, overrides.get(k, v)) for k, v in self.params)
        return replace(self, params=new)

    def with_run_options(self, trials: Optional[int] = None,
                         seed: Optional[int] = None) -> "ExperimentSpec":
        return replace(self,
                       trials=self.trials if trials is None else trials,
                       seed=self.seed if seed is None else seed)

    def detector_names(self) -> Tuple[str, ...]:
        return tuple(d.name for d in self.detectors)


def expand_sweeps(spec: ExperimentSpec) -> List[ExperimentSpec]:
    """Concrete specs for the cartesian product of all sweep ranges, in
    parameter declaration order."""

    swept = [(name, value.expand()) for name, value in spec.params
             if isinstance(value, SweepRange)]
    if not swept:
        return [spec]
    names = [name for name, _ in swept]
    out = []
    for combo in itertools.product(*(vals for _, vals in swept)):
        out.append(spec.with_params(**dict(zip(names, combo))))
    return out


def sweep_axes(spec: ExperimentSpec) -> List[str]:
    return [name for name, value in spec.params if isinstance(value, SweepRange)]


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        if self.tokens:
            last = self.tokens[-1]
            return Token("EOF", "", last.line, last.col + len(last.text))
        return Token("EOF", "", 1, 1)

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect_symbol(self, sym: str) -> Token:
        tok = self.next()
        if tok.kind != "SYMBOL" or tok.text != sym:
            raise ParseError(f"expected {sym!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def expect_word(self, *words: str) -> Token:
        tok = self.next()
        if tok.kind != "WORD" or (words and tok.text not in words):
            expected = " or ".join(repr(w) for w in words) if words else "identifier"
            raise ParseError(f"expected {expected}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def expect_number(self) -> Token:
        tok = self.next()
        if tok.kind != "NUMBER":
            raise ParseError(f"expected number, got {tok.text!r}", tok.line, tok.col)
        return tok

    def at_symbol(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYMBOL" and tok.text == sym

    def skip_newlines(self) -> None:
        while self.peek().kind == "NEWLINE":
            self.next()

    def end_statement(self) -> None:
        tok = self.peek()
        if tok.kind == "NEWLINE":
            self.next()
        elif tok.kind != "EOF":
            raise ParseError(f"expected end of statement, got {tok.text!r}", tok.line, tok.col)


def _angle_value(tok: Token) -> float:
    value = float(tok.value)
    return value * DEG if tok.unit == "deg" else value


def _plain_value(tok: Token, what: str) -> float:
    if tok.unit is not None:
        raise ParseError(f"{what} takes no angle unit", tok.line, tok.col)
    return float(tok.value)


def _int_value(tok: Token, what: str) -> int:
    value = _plain_value(tok, what)
    if value != int(value) or value < 0:
        raise ParseError(f"{what} must be a nonnegative integer", tok.line, tok.col)
    return int(value)


def parse(text_or_tokens: Union[str, List[Token]]) -> ExperimentSpec:
    """Parse and validate a program.  Angles are normalized to radians;
    omitted trials default to 10^6."""

    tokens = tokenize(text_or_tokens) if isinstance(text_or_tokens, str) else text_or_tokens
    p = _Parser(tokens)

    name = ""
    config_kw: Dict[str, float] = {}
    params: List[Tuple[str, ParamValue]] = []
    modes: List[str] = []
    sources: List[SourceDecl] = []
    elements: List[ElementDecl] = []
    detectors: List[DetectorDecl] = []
    postselect: Optional[Predicate] = None
    condition: Optional[Predicate] = None
    trials: Optional[int] = None
    seed = 0

    p.skip_newlines()
    while p.peek().kind != "EOF":
        tok = p.next()
        if tok.kind != "WORD":
            raise ParseError(f"expected statement keyword, got {tok.text!r}", tok.line, tok.col)
        kw = tok.text
        if kw == "experiment":
            stok = p.next()
            if stok.kind != "STRING":
                raise ParseError("expected quoted experiment name", stok.line, stok.col)
            name = str(stok.value)
        elif kw == "config":
            while True:
                key = p.expect_word("sigma0", "gamma")
                p.expect_symbol("=")
                config_kw[key.text] = _plain_value(p.expect_number(), f"config {key.text}")
                if p.at_symbol(","):
                    p.next()
                else:
                    break
        elif kw == "param":
            pname = p.expect_word()
            p.expect_symbol("=")
            nxt = p.peek()
            if nxt.kind == "WORD" and nxt.text == "sweep":
                params.append((pname.text, _parse_sweep(p)))
            else:
                params.append((pname.text, _angle_value(p.expect_number())))
        elif kw == "mode":
            while True:
                modes.append(p.expect_word().text)
                if p.at_symbol(","):
                    p.next()
                else:
                    break
        elif kw == "source":
            sources.append(_parse_source(p, tok.line))
        elif kw == "element":
            elements.append(_parse_element(p, tok.line))
        elif kw == "detector":
            dname = p.expect_word()
            p.expect_word("on")
            dmode = p.expect_word()
            detectors.append(DetectorDecl(dname.text, dmode.text, line=tok.line))
        elif kw == "postselect":
            postselect = _parse_pred(p)
        elif kw == "condition":
            p.expect_word("on")
            condition = _parse_pred(p)
        elif kw == "trials":
            trials = _int_value(p.expect_number(), "trials")
        elif kw == "seed":
            seed = _int_value(p.expect_number(), "seed")
        else:
            raise ParseError(f"unknown statement {kw!r}", tok.line, tok.col)
        p.end_statement()
        p.skip_newlines()

    try:
        config = GlobalConfig(**config_kw)
    except ValueError as exc:
        raise SemanticError(str(exc), 1, 1) from None
    spec = ExperimentSpec(
        name=name,
        config=config,
        params=tuple(params),
        modes=tuple(modes),
        sources=tuple(sources),
        elements=tuple(elements),
        detectors=tuple(detectors),
        postselect=postselect,
        condition=condition,
        trials=1_000_000 if trials is None else trials,
        seed=seed,
    )
    validate(spec)
    return spec


def _parse_sweep(p: _Parser) -> SweepRange:
    p.expect_word("sweep")
    p.expect_symbol("(")
    nums = [_plain_value(p.expect_number(), "sweep bound")]
    for _ in range(2):
        p.expect_symbol(",")
        nums.append(_plain_value(p.expect_number(), "sweep bound"))
    p.expect_symbol(")")
    scale = 1.0
    nxt = p.peek()
    if nxt.kind == "WORD" and nxt.text in ("deg", "rad"):
        p.next()
        if nxt.text == "deg":
            scale = DEG
    return SweepRange(start=nums[0] * scale, stop=nums[1] * scale, step=nums[2] * scale)


def _parse_source(p: _Parser, line: int) -> SourceDecl:
    kind_tok = p.expect_word(*SOURCE_KINDS)
    kind = kind_tok.text
    src_params: List[Tuple[str, AngleArg]] = []
    if kind in ("laser", "entangled"):
        pname = "alpha" if kind == "laser" else "r"
        p.expect_symbol("(")
        key = p.expect_word(pname)
        p.expect_symbol("=")
        val = p.next()
        if val.kind == "NUMBER":
            src_params.append((key.text, _plain_value(val, f"source {pname}")))
        elif val.kind == "WORD":
            src_params.append((key.text, val.text))
        else:
            raise ParseError(f"expected number or parameter name, got {val.text!r}",
                             val.line, val.col)
        p.expect_symbol(")")
    p.expect_symbol("->")
    targets = [p.expect_word().text]
    while p.at_symbol(","):
        p.next()
        targets.append(p.expect_word().text)
    return SourceDecl(kind, tuple(src_params), tuple(targets), line=line)


def _parse_element(p: _Parser, line: int) -> ElementDecl:
    kind_tok = p.expect_word()
    kind = kind_tok.text
    if kind not in ELEMENT_KINDS:
        raise SemanticError(f"unknown element kind {kind!r}", kind_tok.line, kind_tok.col)
    p.expect_symbol("(")
    mode_names = [p.expect_word().text]
    angle: Optional[AngleArg] = None
    if kind in TWO_MODE_KINDS:
        p.expect_symbol(",")
        mode_names.append(p.expect_word().text)
    else:
        p.expect_symbol(",")
        tok = p.next()
        if tok.kind == "NUMBER":
            angle = _angle_value(tok)
        elif tok.kind == "WORD":
            if p.at_symbol("="):  # named form: theta=VALUE
                p.next()
                val = p.next()
                if val.kind == "NUMBER":
                    angle = _angle_value(val)
                elif val.kind == "WORD":
                    angle = val.text
                else:
                    raise ParseError(f"expected angle value, got {val.text!r}", val.line, val.col)
            else:
                angle = tok.text
        else:
            raise ParseError(f"expected angle argument, got {tok.text!r}", tok.line, tok.col)
    p.expect_symbol(")")
    return ElementDecl(kind, tuple(mode_names), angle, line=line)


def _parse_pred(p: _Parser) -> Predicate:
    return _parse_or(p)


def _parse_or(p: _Parser) -> Predicate:
    node = _parse_and(p)
    while p.at_symbol("|"):
        p.next()
        node = Or(node, _parse_and(p))
    return node


def _parse_and(p: _Parser) -> Predicate:
    node = _parse_unary(p)
    while p.at_symbol("&"):
        p.next()
        node = And(node, _parse_unary(p))
    return node


def _parse_unary(p: _Parser) -> Predicate:
    if p.at_symbol("!"):
        p.next()
        return Not(_parse_unary(p))
    if p.at_symbol("("):
        p.next()
        node = _parse_or(p)
        p.expect_symbol(")")
        return node
    tok = p.expect_word("click", "noclick")
    p.expect_symbol("(")
    det = p.expect_word()
    p.expect_symbol(")")
    return Click(det.text) if tok.text == "click" else NoClick(det.text)


# --- validation ---------------------------------------------------------------

def validate(spec: ExperimentSpec) -> None:
    """Static checks guaranteeing run_trial cannot hit an evaluation error."""

    declared = set()
    for m in spec.modes:
        if m in declared:
            raise SemanticError(f"duplicate mode {m!r}")
        declared.add(m)

    param_names = {name for name, _ in spec.params}
    seen_params = set()
    for pname, _ in spec.params:
        if pname in seen_params:
            raise SemanticError(f"duplicate parameter {pname!r}")
        seen_params.add(pname)

    sourced = set()
    for src in spec.sources:
        want = 2 if src.kind == "entangled" else 1
        if len(src.targets) != want:
            raise SemanticError(
                f"source {src.kind!r} needs {want} target mode(s), got {len(src.targets)}",
                src.line)
        for t in src.targets:
            if t not in declared:
                raise SemanticError(f"source targets undeclared mode {t!r}", src.line)
            if t in sourced:
                raise SemanticError(f"mode {t!r} sourced more than once", src.line)
            sourced.add(t)
        for _, value in src.params:
            if isinstance(value, str) and value not in param_names:
                raise SemanticError(f"source references unknown parameter {value!r}", src.line)

    unsourced = [m for m in spec.modes if m not in sourced]
    if unsourced:
        raise SemanticError(f"modes never sourced: {unsourced}")

    for el in spec.elements:
        if el.kind not in ELEMENT_KINDS:
            raise SemanticError(f"unknown element kind {el.kind!r}", el.line)
        want = 2 if el.kind in TWO_MODE_KINDS else 1
        if len(el.modes) != want:
            raise SemanticError(f"element {el.kind!r} needs {want} mode(s)", el.line)
        if want == 2 and el.modes[0] == el.modes[1]:
            raise SemanticError(f"element {el.kind!r} needs two distinct modes", el.line)
        for m in el.modes:
            if m not in declared:
                raise SemanticError(f"element references undeclared mode {m!r}", el.line)
        if el.kind in ANGLE_KINDS:
            if el.angle is None:
                raise SemanticError(f"element {el.kind!r} requires an angle", el.line)
            if isinstance(el.angle, str) and el.angle not in param_names:
                raise SemanticError(f"element references unknown parameter {el.angle!r}", el.line)

    det_names = set()
    for det in spec.detectors:
        if det.name in det_names:
            raise SemanticError(f"duplicate detector {det.name!r}", det.line)
        det_names.add(det.name)
        if det.mode not in declared:
            raise SemanticError(f"detector {det.name!r} on undeclared mode {det.mode!r}", det.line)

    for which, pred in (("postselect", spec.postselect), ("condition", spec.condition)):
        if pred is None:
            continue
        unknown = predicate_detectors(pred) - det_names
        if unknown:
            raise SemanticError(f"{which} references undeclared detectors {sorted(unknown)}")

    if spec.trials <= 0:
        raise SemanticError("trials must be positive")


# --- printing -------------------------------------------------------------------

def pred_to_text(pred: Predicate) -> str:
    if isinstance(pred, Click):
        return f"click({pred.detector})"
    if isinstance(pred, NoClick):
        return f"noclick({pred.detector})"
    if isinstance(pred, Not):
        return f"!{pred_to_text(pred.inner)}" if isinstance(pred.inner, (Click, NoClick, Not)) \
            else f"!({pred_to_text(pred.inner)})"
    if isinstance(pred, And):
        return f"({pred_to_text(pred.left)} & {pred_to_text(pred.right)})"
    if isinstance(pred, Or):
        return f"({pred_to_text(pred.left)} | {pred_to_text(pred.right)})"
    raise TypeError(f"cannot print predicate {pred!r}")


def _num(value: float) -> str:
    return repr(float(value))


def _value_text(value: AngleArg) -> str:
    return value if isinstance(value, str) else _num(value)


def to_text(spec: ExperimentSpec) -> str:
    """Canonical program text; parse(to_text(spec)) == spec."""

    lines = [f'experiment "{spec.name}"']
    lines.append(f"config sigma0 = {_num(spec.config.sigma0)}, gamma = {_num(spec.config.gamma)}")
    for pname, value in spec.params:
        if isinstance(value, SweepRange):
            if value.values is not None:
                raise ValueError("explicit sweep lists have no DSL form")
            lines.append(f"param {pname} = sweep({_num(value.start)}, {_num(value.stop)}, "
                         f"{_num(value.step)})")
        else:
            lines.append(f"param {pname} = {_num(value)}")
    if spec.modes:
        lines.append("mode " + ", ".join(spec.modes))
    for src in spec.sources:
        head = src.kind
        if src.params:
            head += "(" + ", ".join(f"{k} = {_value_text(v)}" for k, v in src.params) + ")"
        lines.append(f"source {head} -> " + ", ".join(src.targets))
    for el in spec.elements:
        args = list(el.modes)
        if el.angle is not None:
            args.append(_value_text(el.angle))
        lines.append(f"element {el.kind}(" + ", ".join(args) + ")")
    for det in spec.detectors:
        lines.append(f"detector {det.name} on {det.mode}")
    if spec.postselect is not None:
        lines.append("postselect " + pred_to_text(spec.postselect))
    if spec.condition is not None:
        lines.append("condition on " + pred_to_text(spec.condition))
    lines.append(f"trials {spec.trials}")
    lines.append(f"seed {spec.seed}")
    return "\n".join(lines) + "\n"
