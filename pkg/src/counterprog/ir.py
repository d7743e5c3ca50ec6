"""Counter programs: syntax tree, accounting, classification, text format.

A program is built from ``inc c``, ``dec c`` and ``test c`` commands with
``loop``, series composition and non-deterministic choice.  ``Repeat`` is
sugar for a k-fold series composition and ``Skip`` is the empty program.

``Seq`` and ``Choice`` are kept right-associated: ``Seq(Seq(a, b), c)``
normalizes to ``Seq(a, Seq(b, c))``.  Both operators are associative for
the semantics, and the normal form is what makes ``parse(render(p)) == p``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

CounterId = str

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*(?:::[A-Za-z0-9_]+)*'*"
_IDENT_RE = re.compile(_IDENT + r"\Z")


def check_counter(name: str) -> CounterId:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise ValueError(f"invalid counter name {name!r}")
    return name


class Program:
    """Base class of all program nodes (immutable)."""

    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, repr=False)
class Skip(Program):
    def __repr__(self):
        return "Skip()"


@dataclass(frozen=True, repr=False)
class Inc(Program):
    c: CounterId

    def __post_init__(self):
        check_counter(self.c)

    def __repr__(self):
        return f"Inc({self.c!r})"


@dataclass(frozen=True, repr=False)
class Dec(Program):
    c: CounterId

    def __post_init__(self):
        check_counter(self.c)

    def __repr__(self):
        return f"Dec({self.c!r})"


@dataclass(frozen=True, repr=False)
class Test(Program):
    c: CounterId

    def __post_init__(self):
        check_counter(self.c)

    def __repr__(self):
        return f"Test({self.c!r})"


Command = Union[Inc, Dec, Test]


@dataclass(frozen=True, repr=False)
class Loop(Program):
    body: Program

    def __repr__(self):
        return f"Loop({self.body!r})"


@dataclass(frozen=True, repr=False)
class Seq(Program):
    first: Program
    second: Program

    def __post_init__(self):
        if isinstance(self.first, Seq):
            inner = self.first
            object.__setattr__(self, "first", inner.first)
            object.__setattr__(self, "second", Seq(inner.second, self.second))

    def __repr__(self):
        return f"Seq({self.first!r}, {self.second!r})"


@dataclass(frozen=True, repr=False)
class Choice(Program):
    left: Program
    right: Program

    def __post_init__(self):
        if isinstance(self.left, Choice):
            inner = self.left
            object.__setattr__(self, "left", inner.left)
            object.__setattr__(self, "right", Choice(inner.right, self.right))

    def __repr__(self):
        return f"Choice({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Repeat(Program):
    body: Program
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError("repeat count must be a non-negative integer")

    def __repr__(self):
        return f"Repeat({self.body!r}, {self.k})"


SKIP = Skip()


def seq(*parts: Program) -> Program:
    """Series composition of any number of programs (``Skip`` if none)."""
    parts = [p for p in parts if p is not None]
    if not parts:
        return SKIP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


def choice(*parts: Program) -> Program:
    if not parts:
        raise ValueError("choice needs at least one branch")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Choice(p, out)
    return out


def incs(*cs: CounterId) -> Program:
    return seq(*(Inc(c) for c in cs))


def decs(*cs: CounterId) -> Program:
    return seq(*(Dec(c) for c in cs))


def tests(*cs: CounterId) -> Program:
    return seq(*(Test(c) for c in cs))


def seq_items(p: Program) -> list[Program]:
    """Flatten a right-associated ``Seq`` chain into its items."""
    items = []
    while isinstance(p, Seq):
        items.append(p.first)
        p = p.second
    items.append(p)
    return items


def choice_items(p: Program) -> list[Program]:
    items = []
    while isinstance(p, Choice):
        items.append(p.left)
        p = p.right
    items.append(p)
    return items


def children(p: Program) -> tuple[Program, ...]:
    if isinstance(p, Loop) or isinstance(p, Repeat):
        return (p.body,)
    if isinstance(p, Seq):
        return (p.first, p.second)
    if isinstance(p, Choice):
        return (p.left, p.right)
    return ()


def walk(p: Program) -> Iterator[Program]:
    """Pre-order traversal (iterative; gadget trees can be deep)."""
    stack = [p]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def is_command(p: Program) -> bool:
    return isinstance(p, (Inc, Dec, Test))


# -- accounting ---------------------------------------------------------------


def size(p: Program) -> int:
    """Size of the program; ``Repeat`` counts as its expansion, ``Skip`` is 0."""
    if isinstance(p, Skip):
        return 0
    if is_command(p):
        return 1
    if isinstance(p, Loop):
        return 1 + size(p.body)
    if isinstance(p, Seq):
        return sum(1 + size(q) for q in seq_items(p)) - 1
    if isinstance(p, Choice):
        return sum(1 + size(q) for q in choice_items(p)) - 1
    if isinstance(p, Repeat):
        return p.k * size(p.body) + max(p.k - 1, 0)
    raise TypeError(f"not a program: {p!r}")


def counters(p: Program) -> tuple[CounterId, ...]:
    """Counters occurring syntactically in ``p``, sorted by name.

    ``Repeat(_, 0)`` is the empty program and contributes nothing.
    """
    found: set[str] = set()
    stack = [p]
    while stack:
        node = stack.pop()
        if is_command(node):
            found.add(node.c)
        elif isinstance(node, Repeat):
            if node.k > 0:
                stack.append(node.body)
        else:
            stack.extend(children(node))
    return tuple(sorted(found))


def dimension(p: Program) -> int:
    return len(counters(p))


def has_test(p: Program) -> bool:
    stack = [p]
    while stack:
        node = stack.pop()
        if isinstance(node, Test):
            return True
        if isinstance(node, Repeat) and node.k == 0:
            continue
        stack.extend(children(node))
    return False


def count_commands(p: Program) -> int:
    """Number of command occurrences after expanding repeats."""
    if is_command(p):
        return 1
    if isinstance(p, Repeat):
        return p.k * count_commands(p.body)
    return sum(count_commands(q) for q in children(p))


def expand_repeats(p: Program) -> Program:
    """Replace every ``Repeat`` by its series composition."""
    if isinstance(p, Repeat):
        body = expand_repeats(p.body)
        return seq(*([body] * p.k)) if p.k else SKIP
    if isinstance(p, Loop):
        return Loop(expand_repeats(p.body))
    if isinstance(p, Seq):
        return seq(*(expand_repeats(q) for q in seq_items(p)))
    if isinstance(p, Choice):
        return choice(*(expand_repeats(q) for q in choice_items(p)))
    return p


def rename(p: Program, mapping: Mapping[CounterId, CounterId]) -> Program:
    """Rename counters; names absent from ``mapping`` are kept."""
    if isinstance(p, (Inc, Dec, Test)):
        return type(p)(mapping.get(p.c, p.c))
    if isinstance(p, Loop):
        return Loop(rename(p.body, mapping))
    if isinstance(p, Repeat):
        return Repeat(rename(p.body, mapping), p.k)
    if isinstance(p, Seq):
        return seq(*(rename(q, mapping) for q in seq_items(p)))
    if isinstance(p, Choice):
        return choice(*(rename(q, mapping) for q in choice_items(p)))
    return p


# -- classification ------------------------------------------------------------


@dataclass(frozen=True)
class TestFree:
    pass


@dataclass(frozen=True)
class Checking:
    core: Program
    tested: tuple[CounterId, ...]


@dataclass(frozen=True)
class General:
    pass


def _flat_seq(p: Program) -> list[Program]:
    out = []
    for q in seq_items(p):
        if isinstance(q, Skip) or (isinstance(q, Repeat) and q.k == 0):
            continue
        if isinstance(q, Repeat) and q.k > 0 and has_test(q.body):
            # keep test repeats visible to the trailing-run scan
            for r in seq_items(expand_repeats(q)):
                out.extend(_flat_seq(r))
            continue
        out.append(q)
    return out


def classify(p: Program) -> Union[TestFree, Checking, General]:
    """Return ``TestFree()``, ``Checking(core, tested)`` or ``General()``."""
    if not has_test(p):
        return TestFree()
    items = _flat_seq(p)
    i = len(items)
    while i > 0 and isinstance(items[i - 1], Test):
        i -= 1
    core = items[:i]
    if any(has_test(q) for q in core):
        return General()
    return Checking(seq(*core), tuple(t.c for t in items[i:]))


# -- configurations ------------------------------------------------------------


class Configuration(Mapping[CounterId, int]):
    """Immutable finite map from counters to naturals; zeros are not stored."""

    __slots__ = ("_items", "_hash")

    def __init__(self, values: Union[Mapping[CounterId, int], Iterable, None] = None, **kw):
        data = dict(values or {}, **kw)
        items = []
        for c, v in data.items():
            v = int(v)
            if v < 0:
                raise ValueError(f"negative value for counter {c!r}")
            if v:
                items.append((check_counter(c), v))
        self._items = tuple(sorted(items))
        self._hash = hash(self._items)

    def __getitem__(self, c):
        for k, v in self._items:
            if k == c:
                return v
        return 0

    def get(self, c, default=0):
        v = self[c]
        return v if v else default

    def __contains__(self, c):
        return any(k == c for k, _ in self._items)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Configuration):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == Configuration(other)
        return NotImplemented

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return self._items

    def total(self) -> int:
        return sum(v for _, v in self._items)

    def updated(self, **changes) -> "Configuration":
        d = dict(self._items)
        d.update(changes)
        return Configuration(d)

    def restrict(self, cs: Iterable[CounterId]) -> "Configuration":
        keep = set(cs)
        return Configuration({k: v for k, v in self._items if k in keep})

    def to_json_obj(self) -> dict[str, str]:
        return {k: str(v) for k, v in self._items}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: Union[str, Mapping]) -> "Configuration":
        obj = json.loads(text) if isinstance(text, str) else text
        if not isinstance(obj, Mapping):
            raise ValueError("configuration JSON must be an object")
        out = {}
        for k, v in obj.items():
            if isinstance(v, bool) or not isinstance(v, (str, int)):
                raise ValueError(f"bad value for {k!r}: {v!r}")
            if isinstance(v, str) and not v.isdigit():
                raise ValueError(f"bad decimal string for {k!r}: {v!r}")
            out[k] = int(v)
        return cls(out)

    def __repr__(self):
        inner = ", ".join(f"{k}:{v}" for k, v in self._items)
        return "{" + inner + "}"


ZERO = Configuration()


# -- text format -----------------------------------------------------------------


class ProgramSyntaxError(SyntaxError):
    def __init__(self, msg, line, col):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    rf"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<int>[0-9]+)"
    rf"|(?P<ident>{_IDENT})|(?P<punct>[;{{}},])"
)
_KEYWORDS = {"inc", "dec", "test", "loop", "choice", "or", "repeat", "skip"}


def _tokenize(text: str):
    pos, line, col = 0, 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind in ("int", "ident", "punct"):
            out.append((kind, val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            col = len(val) - val.rfind("\n")
        else:
            col += len(val)
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ProgramSyntaxError(msg, tok[2], tok[3])

    def expect(self, val):
        t = self.next()
        if t[1] != val or t[0] == "eof":
            self.fail(f"expected {val!r}, got {t[1] or 'end of input'!r}", t)
        return t

    def counter(self):
        t = self.next()
        if t[0] != "ident" or t[1] in _KEYWORDS:
            self.fail(f"expected counter name, got {t[1] or 'end of input'!r}", t)
        return t[1]

    def program(self, closing):
        tok = self.peek()
        if tok[0] == "eof" or (tok[0] == "punct" and tok[1] == closing):
            return SKIP
        stmts = [self.stmt()]
        while self.peek()[1] == ";":
            self.next()
            stmts.append(self.stmt())
        return seq(*stmts)

    def block(self):
        self.expect("{")
        p = self.program("}")
        self.expect("}")
        return p

    def command_args(self):
        if self.peek()[1] == "{":
            self.next()
            cs = [self.counter()]
            while self.peek()[1] == ",":
                self.next()
                cs.append(self.counter())
            self.expect("}")
            return cs
        return [self.counter()]

    def stmt(self):
        t = self.next()
        kw = t[1] if t[0] == "ident" else None
        if kw in ("inc", "dec", "test"):
            cls = {"inc": Inc, "dec": Dec, "test": Test}[kw]
            return seq(*(cls(c) for c in self.command_args()))
        if kw == "loop":
            return Loop(self.block())
        if kw == "choice":
            branches = [self.block()]
            if self.peek()[1] != "or":
                self.fail("choice needs at least two branches")
            while self.peek()[1] == "or" and self.peek()[0] == "ident":
                self.next()
                branches.append(self.block())
            return choice(*branches)
        if kw == "repeat":
            n = self.next()
            if n[0] != "int":
                self.fail("expected repeat count", n)
            return Repeat(self.block(), int(n[1]))
        if kw == "skip":
            return SKIP
        self.fail(f"unexpected {t[1] or 'end of input'!r}", t)


def parse(text: str) -> Program:
    """Parse the textual program format (raises :class:`ProgramSyntaxError`)."""
    p = _Parser(text)
    prog = p.program(None)
    if p.peek()[0] != "eof":
        p.fail(f"unexpected {p.peek()[1]!r}")
    return prog


def _render_lines(p: Program, indent: str, out: list[str]):
    items = seq_items(p)
    for j, q in enumerate(items):
        sep = ";" if j < len(items) - 1 else ""
        if isinstance(q, (Inc, Dec, Test)):
            kw = type(q).__name__.lower()
            out.append(f"{indent}{kw} {q.c}{sep}")
        elif isinstance(q, Skip):
            out.append(f"{indent}skip{sep}")
        elif isinstance(q, Loop):
            out.append(f"{indent}loop {{")
            _render_lines(q.body, indent + "  ", out)
            out.append(f"{indent}}}{sep}")
        elif isinstance(q, Repeat):
            out.append(f"{indent}repeat {q.k} {{")
            _render_lines(q.body, indent + "  ", out)
            out.append(f"{indent}}}{sep}")
        elif isinstance(q, Choice):
            branches = choice_items(q)
            out.append(f"{indent}choice {{")
            for b in branches[:-1]:
                _render_lines(b, indent + "  ", out)
                out.append(f"{indent}}} or {{")
            _render_lines(branches[-1], indent + "  ", out)
            out.append(f"{indent}}}{sep}")
        else:
            raise TypeError(f"not a program: {q!r}")


def render(p: Program) -> str:
    """Normalized text: one statement per line, two-space indentation."""
    if isinstance(p, Skip):
        return ""
    out: list[str] = []
    _render_lines(p, "", out)
    return "\n".join(out) + "\n"


def enumerate_programs(max_size: int, names: Sequence[CounterId]) -> list[Program]:
    """Every distinct Skip- and Repeat-free program of size at most ``max_size``.

    Programs equal up to the associativity of ``;`` and ``or`` are emitted once;
    the order is deterministic (by size, then by rendering).
    """
    by_size: list[set] = [set() for _ in range(max_size + 1)]
    if max_size >= 1:
        for c in names:
            by_size[1] |= {Inc(c), Dec(c), Test(c)}
    for s in range(2, max_size + 1):
        by_size[s] |= {Loop(q) for q in by_size[s - 1]}
        for sa in range(1, s - 1):
            for a in by_size[sa]:
                for b in by_size[s - 1 - sa]:
                    by_size[s].add(Seq(a, b))
                    by_size[s].add(Choice(a, b))
    return [p for ps in by_size for p in sorted(ps, key=repr)]
