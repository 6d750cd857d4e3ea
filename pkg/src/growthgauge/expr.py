"""Immutable expression trees for growth functions.

Seven node types cover everything the analyzer needs::

    Const(Fraction)   Var(name)   Add(args)   Mul(args)
    Pow(base, exp)    Exp(arg)    Ln(arg)

Nodes are never built directly by callers. The smart constructors
:func:`add`, :func:`mul`, :func:`power`, :func:`exp` and :func:`ln` assume
canonical children and always return a canonical tree:

* constants folded exactly (``Fraction``), no zero denominators;
* nested sums and products flattened, operands sorted by a fixed total order;
* like terms collected (``x + x -> 2*x``) and like bases collected
  (``x * x**-1 -> 1``, ``exp(a) * exp(b) -> exp(a + b)``);
* ``a**u`` with constant ``a > 0`` and non-constant ``u`` lowered to
  ``exp(ln(a) * u)``.

Hashes, ordering keys, tree sizes and free-variable sets are computed once at
construction, so trees can be used freely as dict keys.
"""

from fractions import Fraction
import math

from .errors import DomainError

__all__ = [
    "Expr", "Const", "Var", "Add", "Mul", "Pow", "Exp", "Ln",
    "const", "var", "add", "mul", "power", "exp", "ln", "sqrt", "log2",
    "neg", "sub", "div", "canonicalize", "substitute", "to_json", "from_json",
    "ZERO", "ONE",
]

# exact integer powers are folded only while the result stays this small
_MAX_FOLD_BITS = 65536


class Expr:
    __slots__ = ("_hash", "_key", "size", "free")

    def _fields(self):
        raise NotImplementedError

    def children(self):
        return ()

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._fields() == other._fields()

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self._key < other._key

    def __str__(self):
        from .syntax import format_expr
        return format_expr(self)

    # arithmetic sugar, used heavily by tests and closed-form oracles
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __pow__(self, other):
        return power(self, _coerce(other))

    def __rpow__(self, other):
        return power(_coerce(other), self)

    def __neg__(self):
        return neg(self)


def _coerce(value):
    if isinstance(value, Expr):
        return value
    return const(value)


def _category(children):
    # ordering puts constants first, then variable-free subtrees, then the rest
    return 2 if any(c._key[0] == 2 for c in children) else 1


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value
        self._hash = hash(("c", value))
        self._key = (0, 0, value)
        self.size = 1
        self.free = frozenset()

    def _fields(self):
        return self.value

    def __repr__(self):
        return "Const(%s)" % self.value


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        self._hash = hash(("v", name))
        self._key = (2, 1, name)
        self.size = 1
        self.free = frozenset((name,))

    def _fields(self):
        return self.name

    def __repr__(self):
        return "Var(%r)" % self.name


class _Unary(Expr):
    __slots__ = ("arg",)
    _rank = None

    def __init__(self, arg):
        self.arg = arg
        self._hash = hash((self._rank, arg._hash))
        self._key = (_category((arg,)), self._rank, arg._key)
        self.size = 1 + arg.size
        self.free = arg.free

    def _fields(self):
        return self.arg

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return "%s(%r)" % (type(self).__name__, self.arg)


class Ln(_Unary):
    __slots__ = ()
    _rank = 2


class Exp(_Unary):
    __slots__ = ()
    _rank = 4


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        self.base = base
        self.exp = exp
        self._hash = hash((3, base._hash, exp._hash))
        self._key = (_category((base, exp)), 3, base._key, exp._key)
        self.size = 1 + base.size + exp.size
        self.free = base.free | exp.free

    def _fields(self):
        return (self.base, self.exp)

    def children(self):
        return (self.base, self.exp)

    def __repr__(self):
        return "Pow(%r, %r)" % (self.base, self.exp)


class _Nary(Expr):
    __slots__ = ("args",)
    _rank = None

    def __init__(self, args):
        self.args = tuple(args)
        self._hash = hash((self._rank,) + tuple(a._hash for a in self.args))
        self._key = (_category(self.args), self._rank, tuple(a._key for a in self.args))
        self.size = 1 + sum(a.size for a in self.args)
        free = frozenset()
        for a in self.args:
            if a.free:
                free = free | a.free
        self.free = free

    def _fields(self):
        return self.args

    def children(self):
        return self.args

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, ", ".join(repr(a) for a in self.args))


class Mul(_Nary):
    __slots__ = ()
    _rank = 5


class Add(_Nary):
    __slots__ = ()
    _rank = 6


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
MINUS_ONE = Const(Fraction(-1))


def const(value):
    """Exact constant from an int, Fraction, decimal string or float."""
    if isinstance(value, Const):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("constants must be finite, got %r" % value)
        value = Fraction(repr(value))
    return Const(Fraction(value))


def var(name):
    return Var(name)


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------

def _split_coef(term):
    if isinstance(term, Mul) and isinstance(term.args[0], Const):
        rest = term.args[1:]
        return term.args[0].value, (rest[0] if len(rest) == 1 else Mul(rest))
    return Fraction(1), term


def _with_coef(c, rest):
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.args)
    return Mul((Const(c), rest))


def add(*args):
    terms = []
    for a in args:
        if isinstance(a, Add):
            terms.extend(a.args)
        else:
            terms.append(a)
    total = Fraction(0)
    collected = {}
    for t in terms:
        if isinstance(t, Const):
            total += t.value
            continue
        c, rest = _split_coef(t)
        collected[rest] = collected.get(rest, 0) + c
    out = [_with_coef(c, rest) for rest, c in collected.items() if c != 0]
    if total != 0:
        out.append(Const(total))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda e: e._key)
    return Add(out)


def mul(*args):
    factors = []
    for a in args:
        if isinstance(a, Mul):
            factors.extend(a.args)
        else:
            factors.append(a)
    coef = Fraction(1)
    groups = {}
    exp_args = []
    for f in factors:
        if isinstance(f, Const):
            coef *= f.value
        elif isinstance(f, Exp):
            exp_args.append(f)
        elif isinstance(f, Pow):
            groups.setdefault(f.base, []).append(f)
        else:
            groups.setdefault(f, []).append(f)
    if coef == 0:
        return ZERO
    out = []
    merged = False
    for base, members in groups.items():
        if len(members) == 1:
            out.append(members[0])
        else:
            merged = True
            exps = [m.exp if isinstance(m, Pow) else ONE for m in members]
            out.append(power(base, add(*exps)))
    if len(exp_args) == 1:
        out.append(exp_args[0])
    elif exp_args:
        merged = True
        out.append(exp(add(*[e.arg for e in exp_args])))
    if merged:
        # merged factors may have folded to constants or split into products
        return mul(Const(coef), *out)
    if not out:
        return Const(coef)
    out.sort(key=lambda e: e._key)
    if coef != 1:
        return Mul([Const(coef)] + out)
    if len(out) == 1:
        return out[0]
    return Mul(out)


def _exact_root(q, n):
    """n-th root of a positive Fraction when it is rational, else None."""
    def iroot(k):
        r = round(k ** (1.0 / n)) if k < 2 ** 1000 else _int_root(k, n)
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == k:
                return cand
        return None
    p = iroot(q.numerator)
    d = iroot(q.denominator)
    if p is None or d is None:
        return None
    return Fraction(p, d)


def _int_root(k, n):
    lo, hi = 0, 1 << (k.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** n <= k:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _fold_const_power(a, c):
    if c.denominator == 1:
        k = c.numerator
        if a == 0 and k < 0:
            raise DomainError("division by zero: 0^(%s)" % c)
        bits = max(a.numerator.bit_length(), a.denominator.bit_length())
        if abs(k) * bits > _MAX_FOLD_BITS:
            return None
        return Const(a ** k)
    if a == 0:
        if c < 0:
            raise DomainError("division by zero: 0^(%s)" % c)
        return ZERO
    if a > 0:
        root = _exact_root(a, c.denominator)
        if root is not None:
            return _fold_const_power(root, Fraction(c.numerator))
    return None


def power(base, exponent):
    if isinstance(exponent, Const):
        c = exponent.value
        if c == 0:
            return ONE
        if c == 1:
            return base
        if isinstance(base, Const):
            if base.value == 1:
                return ONE
            folded = _fold_const_power(base.value, c)
            return folded if folded is not None else Pow(base, exponent)
        if isinstance(base, Exp):
            return exp(mul(base.arg, exponent))
        if c.denominator == 1:
            if isinstance(base, Pow):
                return power(base.base, mul(base.exp, exponent))
            if isinstance(base, Mul):
                return mul(*[power(f, exponent) for f in base.args])
        return Pow(base, exponent)
    if isinstance(base, Const):
        if base.value == 1:
            return ONE
        if base.value > 0:
            return exp(mul(Ln(base), exponent))
        return Pow(base, exponent)
    if isinstance(base, Exp):
        return exp(mul(base.arg, exponent))
    return Pow(base, exponent)


def _log_term(term):
    """(c, w) when term is c*ln(w) with rational c, else None."""
    if isinstance(term, Ln):
        return Fraction(1), term.arg
    if isinstance(term, Mul) and len(term.args) == 2 and isinstance(term.args[0], Const) \
            and isinstance(term.args[1], Ln):
        return term.args[0].value, term.args[1].arg
    return None


def exp(u):
    if isinstance(u, Const) and u.value == 0:
        return ONE
    if isinstance(u, Ln):
        return u.arg
    lt = _log_term(u)
    if lt is not None:
        return power(lt[1], Const(lt[0]))
    if isinstance(u, Add):
        pulled, rest = [], []
        for t in u.args:
            lt = _log_term(t)
            if lt is None:
                rest.append(t)
            else:
                pulled.append(power(lt[1], Const(lt[0])))
        if pulled:
            return mul(*pulled, exp(add(*rest)))
    return Exp(u)


def ln(u):
    if isinstance(u, Const) and u.value == 1:
        return ZERO
    if isinstance(u, Exp):
        return u.arg
    return Ln(u)


def neg(u):
    return mul(MINUS_ONE, u)


def sub(a, b):
    return add(a, neg(b))


def div(a, b):
    return mul(a, power(b, MINUS_ONE))


def sqrt(u):
    return power(u, Const(Fraction(1, 2)))


def log2(u):
    return mul(ln(u), power(Ln(Const(Fraction(2))), MINUS_ONE))


# ---------------------------------------------------------------------------
# whole-tree operations
# ---------------------------------------------------------------------------

def _rebuild(e, leaf, memo):
    got = memo.get(e)
    if got is not None:
        return got
    if isinstance(e, Const):
        out = e
    elif isinstance(e, Var):
        out = leaf(e)
    elif isinstance(e, Add):
        out = add(*[_rebuild(a, leaf, memo) for a in e.args])
    elif isinstance(e, Mul):
        out = mul(*[_rebuild(a, leaf, memo) for a in e.args])
    elif isinstance(e, Pow):
        out = power(_rebuild(e.base, leaf, memo), _rebuild(e.exp, leaf, memo))
    elif isinstance(e, Exp):
        out = exp(_rebuild(e.arg, leaf, memo))
    elif isinstance(e, Ln):
        out = ln(_rebuild(e.arg, leaf, memo))
    else:
        raise TypeError("not an expression node: %r" % (e,))
    memo[e] = out
    return out


def canonicalize(e):
    """Return the canonical form of ``e``; idempotent and value-preserving."""
    for _ in range(16):
        out = _rebuild(e, lambda v: v, {})
        if out == e:
            return out
        e = out
    return e


def substitute(e, name, replacement):
    """Replace every ``Var(name)`` with ``replacement`` and canonicalize."""
    if name not in e.free:
        return canonicalize(e)
    return canonicalize(_rebuild(e, lambda v: replacement if v.name == name else v, {}))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

_OPS = {Add: "add", Mul: "mul", Pow: "pow", Exp: "exp", Ln: "ln"}


def to_json(e):
    """Nested ``{"op": ..., "args": [...]}`` form; constants as "p/q" strings."""
    if isinstance(e, Const):
        return {"op": "const", "args": [str(e.value)]}
    if isinstance(e, Var):
        return {"op": "var", "args": [e.name]}
    return {"op": _OPS[type(e)], "args": [to_json(c) for c in e.children()]}


def from_json(obj):
    op, args = obj["op"], obj["args"]
    if op == "const":
        return const(Fraction(args[0]))
    if op == "var":
        return Var(args[0])
    kids = [from_json(a) for a in args]
    if op == "add":
        return add(*kids)
    if op == "mul":
        return mul(*kids)
    if op == "pow":
        return power(*kids)
    if op == "exp":
        return exp(*kids)
    if op == "ln":
        return ln(*kids)
    raise ValueError("unknown op %r" % op)
