"""The set-expression DSL: parsing to RealSets and printing back.

Grammar (whitespace-insensitive)::

    expr     := term ("u" term)*
    term     := interval | points | tail | ifs | func
    interval := ("[" | "(") num "," num ("]" | ")")
    points   := "{" num ("," num)* "}"
    tail     := "tail(b=FORM, c=FORM, from=INT [, to=INT])"
    ifs      := "ifs(" preset ")"          presets: cantor3 cantor4 dim13 dim09
    func     := shift(expr, NUM) | scale(expr, NUM) | clip(expr, NUM, NUM)
                | recip(expr)
    num      := rational ("1/3", "2^-5", "0.25", "inf", "-inf")

Sequence FORMs are arithmetic over ``n`` with ``+ - * / ^`` whose factors
are rationals, ``n`` powers and geometric terms (``2^n``, ``2^-n``,
``(1/3)^n``); they lower to the closed-form algebra exactly.  All numerals
parse to exact rationals (decimals included).  Errors carry the offending
column.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .extreal import ExtReal, NEG_INF, POS_INF
from .seqform import SeqForm
from .sets import (
    BlockFamily,
    FractalPart,
    Interval,
    MappedFamily,
    RealSet,
    clip,
    iv,
    normalize,
    reciprocal,
    affine,
)

PRESETS = {
    "cantor3": ((Fraction(1, 3), Fraction(0)), (Fraction(1, 3), Fraction(2, 3))),
    "cantor4": ((Fraction(1, 4), Fraction(0)), (Fraction(1, 4), Fraction(3, 4))),
    "dim13": ((Fraction(1, 8), Fraction(0)), (Fraction(1, 8), Fraction(7, 8))),
    "dim09": (
        (Fraction(463, 1000), Fraction(0)),
        (Fraction(463, 1000), Fraction(537, 1000)),
    ),
}


class DslError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"column {pos + 1}: {message}")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[\[\](){},=^*/+u-]))",
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise DslError(f"unexpected character {stripped[0]!r}", pos)
            if m.group("num"):
                self.toks.append(("num", m.group("num"), m.start("num")))
            elif m.group("name"):
                self.toks.append(("name", m.group("name"), m.start("name")))
            else:
                self.toks.append(("op", m.group("op"), m.start("op")))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Tuple[str, str, int]:
        t = self.peek()
        if t is None:
            raise DslError("unexpected end of input", len(self.text))
        self.i += 1
        return t

    def expect_op(self, op: str) -> None:
        t = self.next()
        if t[0] != "op" or t[1] != op:
            raise DslError(f"expected {op!r}, found {t[1]!r}", t[2])

    def at_op(self, op: str) -> bool:
        t = self.peek()
        return t is not None and t[0] == "op" and t[1] == op

    def pos(self) -> int:
        t = self.peek()
        return t[2] if t is not None else len(self.text)


def parse_set_expr(text: str) -> RealSet:
    toks = _Tokens(text)
    out = _parse_union(toks)
    t = toks.peek()
    if t is not None:
        raise DslError(f"unexpected trailing input {t[1]!r}", t[2])
    return out


def _parse_union(toks: _Tokens) -> RealSet:
    components = [_parse_term(toks)]
    while True:
        t = toks.peek()
        if t is not None and (
            (t[0] == "name" and t[1] == "u") or (t[0] == "op" and t[1] == "u")
        ):
            toks.next()
            components.append(_parse_term(toks))
        else:
            break
    pieces = []
    for comp in components:
        if isinstance(comp, list):
            pieces.extend(comp)
        else:
            pieces.append(comp)
    return normalize(pieces)


def _parse_term(toks: _Tokens):
    t = toks.peek()
    if t is None:
        raise DslError("expected a set term", len(toks.text))
    kind, val, pos = t
    if kind == "op" and val in "[(":
        return _parse_interval(toks)
    if kind == "op" and val == "{":
        return _parse_points(toks)
    if kind == "name":
        if val == "tail":
            return _parse_tail(toks)
        if val == "ifs":
            return _parse_ifs(toks)
        if val in ("shift", "scale", "clip", "recip"):
            return _parse_func(toks)
        raise DslError(f"unknown construct {val!r}", pos)
    raise DslError(f"expected a set term, found {val!r}", pos)


def _parse_interval(toks: _Tokens) -> Interval:
    kind, val, pos = toks.next()
    lo_closed = val == "["
    lo = _parse_num(toks)
    toks.expect_op(",")
    hi = _parse_num(toks)
    kind, val, pos2 = toks.next()
    if kind != "op" or val not in ")]":
        raise DslError("expected ')' or ']' to close the interval", pos2)
    hi_closed = val == "]"
    if hi < lo:
        raise DslError("interval endpoints out of order", pos)
    return Interval(lo, hi, lo_closed, hi_closed)


def _parse_points(toks: _Tokens) -> List[Fraction]:
    toks.expect_op("{")
    pts = [_parse_finite_num(toks)]
    while toks.at_op(","):
        toks.next()
        pts.append(_parse_finite_num(toks))
    toks.expect_op("}")
    return pts


def _parse_tail(toks: _Tokens):
    toks.next()  # 'tail'
    toks.expect_op("(")
    fields = {}
    while True:
        t = toks.next()
        if t[0] != "name":
            raise DslError("expected a field name in tail(...)", t[2])
        fname = t[1]
        toks.expect_op("=")
        if fname in ("b", "c"):
            fields[fname] = _parse_form(toks)
        elif fname in ("from", "to"):
            fields[fname] = _parse_int(toks)
        else:
            raise DslError(f"unknown tail field {fname!r}", t[2])
        if toks.at_op(","):
            toks.next()
            continue
        break
    toks.expect_op(")")
    if "b" not in fields or "c" not in fields or "from" not in fields:
        raise DslError("tail(...) needs b=, c= and from=", toks.pos())
    return BlockFamily(fields["b"], fields["c"], fields["from"], fields.get("to"))


def _parse_ifs(toks: _Tokens) -> FractalPart:
    toks.next()
    toks.expect_op("(")
    t = toks.next()
    if t[0] != "name" or t[1] not in PRESETS:
        raise DslError(
            f"unknown ifs preset {t[1]!r} (known: {', '.join(sorted(PRESETS))})", t[2]
        )
    toks.expect_op(")")
    return FractalPart(PRESETS[t[1]])


def _parse_func(toks: _Tokens):
    t = toks.next()
    fn = t[1]
    toks.expect_op("(")
    inner_set = _parse_union(toks)
    if fn == "recip":
        toks.expect_op(")")
        return reciprocal(inner_set)
    if fn in ("shift", "scale"):
        toks.expect_op(",")
        arg = _parse_finite_num(toks)
        toks.expect_op(")")
        out = affine(inner_set, 1, arg) if fn == "shift" else affine(inner_set, arg, 0)
        return out
    if fn == "clip":
        toks.expect_op(",")
        a = _parse_num(toks)
        toks.expect_op(",")
        b = _parse_num(toks)
        toks.expect_op(")")
        return clip(inner_set, a, b)
    raise DslError(f"unknown function {fn!r}", t[2])


def _parse_int(toks: _Tokens) -> int:
    neg = False
    if toks.at_op("-"):
        toks.next()
        neg = True
    t = toks.next()
    if t[0] != "num" or "." in t[1]:
        raise DslError("expected an integer", t[2])
    return -int(t[1]) if neg else int(t[1])


def _parse_num(toks: _Tokens) -> ExtReal:
    neg = False
    if toks.at_op("-"):
        toks.next()
        neg = True
    t = toks.peek()
    if t is not None and t[0] == "name" and t[1] == "inf":
        toks.next()
        return NEG_INF if neg else POS_INF
    v = _parse_rational(toks)
    return ExtReal(-v if neg else v)


def _parse_finite_num(toks: _Tokens) -> Fraction:
    v = _parse_num(toks)
    if not v.is_finite:
        raise DslError("expected a finite number", toks.pos())
    return v.finite


def _parse_rational(toks: _Tokens) -> Fraction:
    t = toks.next()
    if t[0] != "num":
        raise DslError(f"expected a number, found {t[1]!r}", t[2])
    if "." in t[1]:
        whole, frac = t[1].split(".")
        base = Fraction(int(whole or 0)) + Fraction(int(frac), 10 ** len(frac))
    else:
        base = Fraction(int(t[1]))
    # power suffix: 2^-5, 2^8
    if toks.at_op("^"):
        toks.next()
        neg = False
        if toks.at_op("-"):
            toks.next()
            neg = True
        e = toks.next()
        if e[0] != "num" or "." in e[1]:
            raise DslError("expected an integer exponent", e[2])
        k = int(e[1])
        base = base ** (-k if neg else k)
    if toks.at_op("/"):
        toks.next()
        d = toks.next()
        if d[0] != "num" or "." in d[1]:
            raise DslError("expected an integer denominator", d[2])
        base = base / int(d[1])
    return base


# -- sequence forms ----------------------------------------------------------


def _parse_form(toks: _Tokens) -> SeqForm:
    form = _parse_form_product(toks)
    while True:
        if toks.at_op("+"):
            toks.next()
            form = form + _parse_form_product(toks)
        elif toks.at_op("-"):
            toks.next()
            form = form - _parse_form_product(toks)
        else:
            return form


def _parse_form_product(toks: _Tokens) -> SeqForm:
    form = _parse_form_factor(toks)
    while True:
        if toks.at_op("*"):
            toks.next()
            form = form * _parse_form_factor(toks)
        elif toks.at_op("/"):
            op_pos = toks.pos()
            toks.next()
            rhs = _parse_form_factor(toks)
            const = _form_constant(rhs)
            if const is not None:
                if const == 0:
                    raise DslError("division by zero", op_pos)
                form = form * (1 / const)
            else:
                inv = rhs.reciprocal_term()
                if inv is None:
                    raise DslError(
                        "can only divide by constants or single power terms", op_pos
                    )
                form = form * inv
        else:
            return form


def _form_constant(form: SeqForm) -> Optional[Fraction]:
    if form.is_zero:
        return Fraction(0)
    if len(form.terms) == 1:
        ((rho, k), c), = form.terms.items()
        if rho == 1 and k == 0:
            return c
    return None


def _parse_form_factor(toks: _Tokens) -> SeqForm:
    neg = False
    if toks.at_op("-"):
        toks.next()
        neg = True
    t = toks.peek()
    if t is None:
        raise DslError("expected a form factor", len(toks.text))
    if t[0] == "op" and t[1] == "(":
        toks.next()
        inner = _parse_form(toks)
        toks.expect_op(")")
        base = inner
        if toks.at_op("^"):
            base = _parse_form_power(toks, base, t[2])
        return -base if neg else base
    if t[0] == "name" and t[1] == "n":
        toks.next()
        base = SeqForm.var()
        if toks.at_op("^"):
            base = _parse_form_power(toks, base, t[2])
        return -base if neg else base
    if t[0] == "num":
        # rational literal, possibly a geometric base: 2^n, 2^-n, 2^-5
        lit_pos = t[2]
        toks.next()
        if "." in t[1]:
            whole, frac = t[1].split(".")
            val = Fraction(int(whole or 0)) + Fraction(int(frac), 10 ** len(frac))
        else:
            val = Fraction(int(t[1]))
        if toks.at_op("^"):
            form = _parse_form_power(toks, val, lit_pos)
        else:
            form = SeqForm.const(val)
        if toks.at_op("/") and _peek_is_plain_int(toks):
            toks.next()
            d = toks.next()
            form = form * Fraction(1, int(d[1]))
        return -form if neg else form
    raise DslError(f"unexpected token {t[1]!r} in a form", t[2])


def _peek_is_plain_int(toks: _Tokens) -> bool:
    # lookahead for "/ INT" not followed by ^ or n (else treat as division op)
    if toks.i + 1 >= len(toks.toks):
        return False
    nxt = toks.toks[toks.i + 1]
    if nxt[0] != "num" or "." in nxt[1]:
        return False
    if toks.i + 2 < len(toks.toks):
        after = toks.toks[toks.i + 2]
        if after[0] == "op" and after[1] == "^":
            return False
    return True


def _parse_form_power(toks: _Tokens, base, pos: int) -> SeqForm:
    toks.expect_op("^")
    neg = False
    if toks.at_op("-"):
        toks.next()
        neg = True
    t = toks.next()
    if t[0] == "name" and t[1] == "n":
        if isinstance(base, SeqForm):
            c = _form_constant(base)
            if c is None:
                raise DslError("geometric base must be a constant", pos)
            base = c
        if base <= 0:
            raise DslError("geometric base must be positive", pos)
        rho = 1 / base if neg else base
        return SeqForm.term(1, rho, 0)
    if t[0] == "num" and "." not in t[1]:
        k = int(t[1])
        k = -k if neg else k
        if isinstance(base, SeqForm):
            c = _form_constant(base)
            if c is not None:
                return SeqForm.const(c**k)
            if base == SeqForm.var():
                return SeqForm.term(1, 1, k)
            if k < 0:
                inv = base.reciprocal_term()
                if inv is None:
                    raise DslError("cannot invert a multi-term form", pos)
                base, k = inv, -k
            out = SeqForm.const(1)
            for _ in range(k):
                out = out * base
            return out
        return SeqForm.const(Fraction(base) ** k)
    raise DslError("exponent must be an integer or n", t[2])


# ---------------------------------------------------------------------------
# printing


def set_to_dsl(h: RealSet) -> str:
    """Round-trippable DSL text for sets built of DSL-expressible parts."""
    if h.is_empty:
        raise ValueError("the empty set has no DSL form")
    parts: List[str] = []
    for itv in h.intervals:
        lb = "[" if itv.lo_closed else "("
        rb = "]" if itv.hi_closed else ")"
        parts.append(f"{lb}{_num_text(itv.lo)},{_num_text(itv.hi)}{rb}")
    if h.points:
        parts.append("{" + ", ".join(_frac_text(p) for p in h.points) + "}")
    for fam in h.families:
        parts.append(_family_text(fam))
    for fr in h.fractals:
        parts.append(_fractal_text(fr))
    if h.rows:
        raise ValueError("IFS rows have no DSL form")
    return " u ".join(parts)


def _num_text(e: ExtReal) -> str:
    if e.is_pos_inf:
        return "inf"
    if e.is_neg_inf:
        return "-inf"
    return _frac_text(e.finite)


def _frac_text(q: Fraction) -> str:
    return str(q)


def _family_text(fam) -> str:
    if isinstance(fam, BlockFamily):
        core = f"tail(b={fam.b.to_text()}, c={fam.c.to_text()}, from={fam.n_start}"
        if fam.n_end is not None:
            core += f", to={fam.n_end}"
        return core + ")"
    assert isinstance(fam, MappedFamily)
    text = _family_text(fam.base)
    for op in fam.ops:
        if op[0] == "recip":
            text = f"recip({text})"
        else:
            alpha, t = op[1], op[2]
            if alpha != 1:
                text = f"scale({text}, {_frac_text(alpha)})"
            if t != 0:
                text = f"shift({text}, {_frac_text(t)})"
    return text


def _fractal_text(fr: FractalPart) -> str:
    for name, maps in PRESETS.items():
        if tuple(fr.maps) == tuple(maps):
            text = f"ifs({name})"
            if fr.scale != 1:
                text = f"scale({text}, {_frac_text(fr.scale)})"
            if fr.shift != 0:
                text = f"shift({text}, {_frac_text(fr.shift)})"
            return text
    raise ValueError("attractor does not match a DSL preset")
