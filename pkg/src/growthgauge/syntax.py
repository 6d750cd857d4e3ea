"""Text form of expressions: a recursive-descent parser and a printer.

Grammar (``log`` and ``ln`` are both the natural logarithm)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
    NUMBER := digits ["." digits]

Functions: ``exp``, ``log``, ``ln``, ``log2``, ``sqrt``.  ``p/q`` is simply a
division of two integers and folds to an exact rational.

The printer emits text that parses back to the identical canonical tree.
"""

import re
from fractions import Fraction

from . import expr as E
from .errors import ArityError, ExprSyntaxError, UnknownFunction

__all__ = ["parse", "format_expr", "FUNCTIONS"]

FUNCTIONS = {
    "exp": E.exp,
    "log": E.ln,
    "ln": E.ln,
    "log2": E.log2,
    "sqrt": E.sqrt,
}

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))", re.S)

_ATOM_START = ("number", "identifier", "(", "-", "+")
MAX_DEPTH = 100


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0
        self.depth = 0

    def _offset(self, char_index):
        return len(self.text[:char_index].encode("utf-8"))

    def _tokenize(self, text):
        out = []
        i = 0
        n = len(text)
        while i < n:
            m = _TOKEN.match(text, i)
            if m is None or m.end() == i:
                break  # only trailing whitespace left
            if m.group(1) is not None:
                out.append(("number", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                out.append(("identifier", m.group(2), m.start(2)))
            else:
                ch = m.group(3)
                if ch not in "+-*/^(),":
                    raise ExprSyntaxError("unexpected character %r" % ch,
                                          self._offset(m.start(3)), _ATOM_START)
                out.append((ch, ch, m.start(3)))
            i = m.end()
        out.append(("end", "", len(text)))
        return out

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExprSyntaxError("unexpected %s" % what, self._offset(tok[2]), expected)

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            self.fail((kind,))
        return self.take()

    def parse(self):
        if self.peek()[0] == "end":
            self.fail(_ATOM_START)
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(("+", "-", "*", "/", "^", "end"))
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            e = E.add(e, rhs) if op == "+" else E.sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            e = E.mul(e, rhs) if op == "*" else E.div(e, rhs)
        return e

    def unary(self):
        # every recursive path passes through here
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError("nesting deeper than %d levels" % MAX_DEPTH,
                                  self._offset(self.peek()[2]))
        try:
            kind = self.peek()[0]
            if kind == "-":
                self.take()
                return E.neg(self.unary())
            if kind == "+":
                self.take()
                return self.unary()
            return self.power()
        finally:
            self.depth -= 1

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            return E.power(base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "number":
            self.take()
            return E.Const(Fraction(tok[1]))
        if kind == "identifier":
            self.take()
            if self.peek()[0] == "(":
                return self.call(tok)
            return E.Var(tok[1])
        if kind == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(_ATOM_START)

    def call(self, name_tok):
        name = name_tok[1]
        fn = FUNCTIONS.get(name)
        if fn is None:
            raise UnknownFunction("unknown function %r" % name,
                                  self._offset(name_tok[2]), sorted(FUNCTIONS))
        self.expect("(")
        if self.peek()[0] == ")":
            self.take()
            raise ArityError("%s takes 1 argument, got 0" % name, self._offset(name_tok[2]))
        args = [self.expr()]
        while self.peek()[0] == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError("%s takes 1 argument, got %d" % (name, len(args)),
                             self._offset(name_tok[2]))
        return fn(args[0])


def parse(text):
    """Parse ``text`` into a canonical expression tree."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def format_expr(e):
    """Human-readable text that reparses to the same canonical tree."""
    return _fmt(e)[0]


def _wrap(e, min_prec):
    s, p = _fmt(e)
    return s if p >= min_prec else "(" + s + ")"


def _fmt_fraction(v):
    if v.denominator == 1:
        return str(v.numerator), (_ATOM if v >= 0 else _UNARY)
    return str(v), (_MUL if v > 0 else _UNARY)


def _exp_base(e):
    """For exp(ln(a) * rest) return (a, rest) so it prints as a^rest."""
    if not isinstance(e.arg, E.Mul):
        return None
    args = e.arg.args
    for i, f in enumerate(args):
        if isinstance(f, E.Ln) and isinstance(f.arg, E.Const) and f.arg.value > 0 \
                and f.arg.value != 1:
            rest = args[:i] + args[i + 1:]
            return f.arg.value, (rest[0] if len(rest) == 1 else E.Mul(rest))
    return None


def _fmt(e):
    if isinstance(e, E.Const):
        return _fmt_fraction(e.value)
    if isinstance(e, E.Var):
        return e.name, _ATOM
    if isinstance(e, E.Ln):
        return "ln(%s)" % _fmt(e.arg)[0], _ATOM
    if isinstance(e, E.Exp):
        based = _exp_base(e)
        if based is not None:
            a, rest = based
            base = str(a) if a.denominator == 1 else "(%s)" % a
            return "%s^%s" % (base, _wrap(rest, _ATOM)), _POW
        return "exp(%s)" % _fmt(e.arg)[0], _ATOM
    if isinstance(e, E.Pow):
        if isinstance(e.exp, E.Const) and e.exp.value < 0:
            return _fmt_product([e])
        return "%s^%s" % (_wrap(e.base, _ATOM), _wrap(e.exp, _ATOM)), _POW
    if isinstance(e, E.Mul):
        return _fmt_product(e.args)
    if isinstance(e, E.Add):
        return _fmt_sum(e.args)
    raise TypeError("not an expression node: %r" % (e,))


def _is_negative_term(t):
    if isinstance(t, E.Const):
        return t.value < 0
    return isinstance(t, E.Mul) and isinstance(t.args[0], E.Const) and t.args[0].value < 0


def _fmt_sum(terms):
    # constant term printed last ("x - 1", not "-1 + x"), and a positive term leads
    terms = list(terms)
    if isinstance(terms[0], E.Const):
        terms = terms[1:] + terms[:1]
    if _is_negative_term(terms[0]):
        lead = next((t for t in terms if not _is_negative_term(t)), None)
        if lead is not None:
            terms.remove(lead)
            terms.insert(0, lead)
    parts = [_wrap(terms[0], _ADD)]
    for t in terms[1:]:
        if _is_negative_term(t):
            parts.append(" - " + _wrap(E.neg(t), _MUL))
        else:
            parts.append(" + " + _wrap(t, _MUL))
    return "".join(parts), _ADD


def _fmt_product(factors):
    coef = Fraction(1)
    num, den = [], []
    for f in factors:
        if isinstance(f, E.Const):
            coef *= f.value
        elif isinstance(f, E.Pow) and isinstance(f.exp, E.Const) and f.exp.value < 0:
            flipped = -f.exp.value
            den.append(f.base if flipped == 1 else E.Pow(f.base, E.Const(flipped)))
        else:
            num.append(f)
    negative = coef < 0
    coef = abs(coef)
    num_parts = ([str(coef.numerator)] if coef.numerator != 1 else []) + \
        [_wrap(f, _UNARY) for f in num]
    den_parts = ([str(coef.denominator)] if coef.denominator != 1 else []) + \
        [_wrap(f, _POW) for f in den]
    if not num_parts:
        num_parts = ["1"]
    body = " * ".join(num_parts)
    if den_parts:
        den_s = " * ".join(den_parts)
        if len(den_parts) > 1:
            den_s = "(" + den_s + ")"
        body = body + "/" + den_s
        prec = _MUL
    elif len(num_parts) == 1 and not negative and len(num) == 1:
        return body, _fmt(num[0])[1]
    else:
        prec = _MUL
    if negative:
        return "-" + body, _UNARY
    return body, prec
