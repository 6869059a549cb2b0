"""Problem instances: validation, native text format, OR-Library reader, generator."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

INT64_MAX = 2**63 - 1


class InstanceError(ValueError):
    """An instance violates the model assumptions."""


class ParseError(ValueError):
    """Malformed instance text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Instance:
    """n tasks on one machine around a common due date ``d``.

    Task ``j`` (0-based internally, 1-based in every file and JSON output) has
    processing time ``p[j]``, unit earliness penalty ``alpha[j]`` and unit
    tardiness penalty ``beta[j]``. The due date must be unrestrictive,
    ``d >= sum(p)``.
    """

    p: tuple[int, ...]
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    d: int

    def __post_init__(self):
        for name in ("p", "alpha", "beta"):
            values = tuple(int(v) for v in getattr(self, name))
            object.__setattr__(self, name, values)
        object.__setattr__(self, "d", int(self.d))
        n = len(self.p)
        if n < 1:
            raise InstanceError("an instance needs at least one task")
        if len(self.alpha) != n or len(self.beta) != n:
            raise InstanceError("p, alpha and beta must have the same length")
        for name in ("p", "alpha", "beta"):
            if any(v <= 0 for v in getattr(self, name)):
                raise InstanceError(f"{name} must be positive")
        total = sum(self.p)
        if self.d < total:
            raise InstanceError(f"due date {self.d} is restrictive (sum of p is {total})")
        if n * (max(self.alpha) + max(self.beta)) * total > INT64_MAX:
            raise InstanceError("penalties may overflow 64-bit integers")

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def total_time(self) -> int:
        return sum(self.p)

    def with_due_date(self, d: int) -> "Instance":
        return Instance(self.p, self.alpha, self.beta, d)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], d: int | None = None) -> "Instance":
        """Build from ``(p, alpha, beta)`` rows; ``d`` defaults to ``sum(p)``."""
        p, alpha, beta = (tuple(col) for col in zip(*rows)) if rows else ((), (), ())
        return cls(p, alpha, beta, sum(p) if d is None else d)


def parse_native(text: str) -> Instance:
    """Parse the native format.

    Line 1 holds ``n``, an optional ``d <int>`` line follows, then ``n`` lines
    ``p alpha beta``. Blank lines are ignored.
    """
    lines = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise ParseError("empty input")

    no, toks = lines[0]
    if len(toks) != 1:
        raise ParseError("first line must hold the task count", no)
    n = _to_int(toks[0], no)
    if n < 1:
        raise ParseError("task count must be positive", no)

    rest = lines[1:]
    d = None
    if rest and rest[0][1][0] == "d":
        no, toks = rest[0]
        if len(toks) != 2:
            raise ParseError("due date line must read 'd <int>'", no)
        d = _to_int(toks[1], no)
        rest = rest[1:]

    if len(rest) != n:
        last = rest[-1][0] if rest else lines[-1][0]
        raise ParseError(f"expected {n} task lines, found {len(rest)}", last)

    rows = []
    for no, toks in rest:
        if len(toks) != 3:
            raise ParseError("task line must hold three integers 'p alpha beta'", no)
        row = [_to_int(t, no) for t in toks]
        for name, value in zip(("p", "alpha", "beta"), row):
            if value <= 0:
                raise ParseError(f"{name} must be positive", no)
        rows.append(row)

    try:
        return Instance.from_rows(rows, d)
    except InstanceError as exc:
        raise ParseError(str(exc)) from exc


def serialize_native(inst: Instance, with_due_date: bool = True) -> str:
    lines = [str(inst.n)]
    if with_due_date:
        lines.append(f"d {inst.d}")
    lines += [f"{p} {a} {b}" for p, a, b in zip(inst.p, inst.alpha, inst.beta)]
    return "\n".join(lines) + "\n"


def _orlib_blocks(text: str, n: int) -> list[list[int]]:
    try:
        tokens = [int(t) for t in text.split()]
    except ValueError as exc:
        raise ParseError(f"non-integer token: {exc}") from exc
    if n < 1:
        raise ParseError("task count must be positive")
    block = 3 * n
    if tokens and len(tokens) - 1 == tokens[0] * block:
        body = tokens[1:]
        return [body[k * block:(k + 1) * block] for k in range(tokens[0])]
    if tokens and len(tokens) - 1 == tokens[0] * (block + 1):
        body = tokens[1:]
        chunks = [body[k * (block + 1):(k + 1) * (block + 1)] for k in range(tokens[0])]
        if all(chunk[0] == n for chunk in chunks):
            return [chunk[1:] for chunk in chunks]
    if tokens and len(tokens) % block == 0:
        return [tokens[k:k + block] for k in range(0, len(tokens), block)]
    raise ParseError(f"token count {len(tokens)} does not match any layout for n={n}")


def _block_instance(flat: list[int], n: int) -> Instance:
    rows = [flat[3 * j:3 * j + 3] for j in range(n)]
    try:
        return Instance.from_rows(rows)
    except InstanceError as exc:
        raise ParseError(str(exc)) from exc


def parse_orlib(text: str, n: int, instance_index: int) -> Instance:
    """Extract one instance from an OR-Library common due date file.

    The file holds several instances of ``n`` tasks each. Three layouts are
    accepted: a leading instance count followed by raw ``p alpha beta`` rows,
    the same with each instance preceded by its task count, or raw rows only.
    The due date is always ``sum(p)``; restrictive factors are ignored.
    """
    blocks = _orlib_blocks(text, n)
    if not 1 <= instance_index <= len(blocks):
        raise ParseError(f"index out of range: {instance_index} not in 1..{len(blocks)}")
    return _block_instance(blocks[instance_index - 1], n)


def parse_orlib_all(text: str, n: int) -> list[Instance]:
    return [_block_instance(flat, n) for flat in _orlib_blocks(text, n)]


def generate_random(
    n: int,
    seed: int,
    p_range: tuple[int, int] = (1, 20),
    a_range: tuple[int, int] = (1, 10),
    b_range: tuple[int, int] = (1, 10),
) -> Instance:
    """Uniform integer instance with ``d = sum(p)``; deterministic in ``seed``."""
    if n < 1:
        raise InstanceError("n must be positive")
    for name, (lo, hi) in (("p", p_range), ("alpha", a_range), ("beta", b_range)):
        if lo <= 0 or hi <= 0:
            raise InstanceError(f"{name} range bounds must be positive")
        if lo > hi:
            raise InstanceError(f"{name} range is empty")
    rng = np.random.default_rng(seed)
    p = rng.integers(p_range[0], p_range[1], endpoint=True, size=n)
    alpha = rng.integers(a_range[0], a_range[1], endpoint=True, size=n)
    beta = rng.integers(b_range[0], b_range[1], endpoint=True, size=n)
    return Instance(tuple(p.tolist()), tuple(alpha.tolist()), tuple(beta.tolist()), int(p.sum()))


def load_instance(path: str | Path, orlib_n: int | None = None, index: int = 1) -> Instance:
    text = Path(path).read_text(encoding="utf-8")
    if orlib_n is not None:
        return parse_orlib(text, orlib_n, index)
    return parse_native(text)


def _to_int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", line) from None
