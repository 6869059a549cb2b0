"""Compact MIP formulations and their LP-format text.

Variables are ``d_j`` (binary, 1 = task ``j`` early) and ``x_i_j`` for
``i < j`` (continuous in [0, 1], equal to ``|d_i - d_j|`` at binary points).
Four variants are available:

``f2``   Fortet linking rows only
``fi``   f2 plus the insert rows of every task
``fs``   f2 plus the swap rows of every ordered pair
``fis``  f2 plus both
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dominance import INSERT_EARLY, INSERT_TARDY, SWAP, big_m_insert, big_m_swap, insert_form, swap_form
from .instance_io import Instance
from .partition import ratio_orders

VARIANTS = ("f2", "fi", "fs", "fis")
SENSES = (">=", "<=", "=")


def d_name(j: int) -> str:
    return f"d_{j + 1}"


def x_name(i: int, j: int) -> str:
    if i > j:
        i, j = j, i
    return f"x_{i + 1}_{j + 1}"


@dataclass
class LinearInequality:
    name: str
    coefs: dict[str, Fraction]
    sense: str
    rhs: Fraction
    tag: str

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"unknown sense {self.sense!r}")
        self.coefs = {k: Fraction(v) for k, v in self.coefs.items() if v != 0}
        self.rhs = Fraction(self.rhs)

    def lhs(self, point: Mapping[str, Fraction | int]) -> Fraction:
        return sum((c * point[k] for k, c in self.coefs.items()), Fraction(0))

    def satisfied(self, point: Mapping[str, Fraction | int]) -> bool:
        value = self.lhs(point)
        if self.sense == ">=":
            return value >= self.rhs
        if self.sense == "<=":
            return value <= self.rhs
        return value == self.rhs


@dataclass
class MipModel:
    n: int
    variant: str
    binaries: list[str]
    continuous: list[str]
    objective: dict[str, Fraction]
    objective_constant: Fraction
    constraints: list[LinearInequality] = field(default_factory=list)

    def objective_value(self, point: Mapping[str, Fraction | int]) -> Fraction:
        return self.objective_constant + sum(c * point[k] for k, c in self.objective.items())

    def is_feasible(self, point: Mapping[str, Fraction | int]) -> bool:
        for name in self.binaries:
            if point[name] not in (0, 1):
                return False
        for name in self.continuous:
            if not 0 <= point[name] <= 1:
                return False
        return all(c.satisfied(point) for c in self.constraints)

    def count(self, tag_prefix: str) -> int:
        return sum(1 for c in self.constraints if c.tag.startswith(tag_prefix))


def point_from_delta(delta: Sequence[int]) -> dict[str, int]:
    """Binary point with the Fortet-consistent ``x`` values."""
    n = len(delta)
    point = {d_name(j): int(delta[j]) for j in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            point[x_name(i, j)] = int(delta[i] != delta[j])
    return point


def _objective(inst: Instance) -> tuple[dict[str, Fraction], Fraction]:
    # Expand the linearized penalty: alpha_j p_i (d_j + d_i - x_ij) / 2 for i
    # before j in rho, beta_j p_i (2 - d_j - d_i - x_ij) / 2 for i before j in
    # sigma, and beta_j p_j (1 - d_j).
    orders = ratio_orders(inst)
    n = inst.n
    half = Fraction(1, 2)
    obj: dict[str, Fraction] = {d_name(j): Fraction(0) for j in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            obj[x_name(i, j)] = Fraction(0)
    const = Fraction(0)
    for j in range(n):
        for k in range(orders.rho_rank[j]):
            i = orders.rho[k]
            w = inst.alpha[j] * inst.p[i] * half
            obj[d_name(j)] += w
            obj[d_name(i)] += w
            obj[x_name(i, j)] -= w
        for k in range(orders.sigma_rank[j]):
            i = orders.sigma[k]
            w = inst.beta[j] * inst.p[i] * half
            const += 2 * w
            obj[d_name(j)] -= w
            obj[d_name(i)] -= w
            obj[x_name(i, j)] -= w
        const += inst.beta[j] * inst.p[j]
        obj[d_name(j)] -= inst.beta[j] * inst.p[j]
    return {k: v for k, v in obj.items() if v != 0}, const


def _fortet_rows(n: int) -> list[LinearInequality]:
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            x, di, dj = x_name(i, j), d_name(i), d_name(j)
            tag = f"{i + 1}_{j + 1}"
            rows.append(LinearInequality(f"fortet1_{tag}", {x: 1, di: -1, dj: 1}, ">=", 0, "fortet-1"))
            rows.append(LinearInequality(f"fortet2_{tag}", {x: 1, di: 1, dj: -1}, ">=", 0, "fortet-2"))
            rows.append(LinearInequality(f"fortet3_{tag}", {x: 1, di: -1, dj: -1}, "<=", 0, "fortet-3"))
            rows.append(LinearInequality(f"fortet4_{tag}", {x: 1, di: 1, dj: 1}, "<=", 2, "fortet-4"))
    return rows


def _delta_terms(coef: Sequence[int]) -> dict[str, Fraction]:
    return {d_name(i): Fraction(c) for i, c in enumerate(coef)}


def _insert_rows(inst: Instance) -> list[LinearInequality]:
    rows = []
    for u in range(inst.n):
        form = insert_form(inst, u)
        m = big_m_insert(inst, u)
        du = d_name(u)
        # Delta_u >= -M_u (1 - d_u)  ->  coef.d - M_u d_u >= -M_u - const
        early = _delta_terms(form.coef)
        early[du] = early.get(du, 0) - m.M
        rows.append(LinearInequality(f"insert_early_{u + 1}", early, ">=", -m.M - form.const, INSERT_EARLY))
        # -Delta_u >= -M'_u d_u  ->  -coef.d + M'_u d_u >= const
        tardy = {k: -v for k, v in _delta_terms(form.coef).items()}
        tardy[du] = tardy.get(du, 0) + m.M_prime
        rows.append(LinearInequality(f"insert_tardy_{u + 1}", tardy, ">=", form.const, INSERT_TARDY))
    return rows


def _swap_rows(inst: Instance) -> list[LinearInequality]:
    rows = []
    for u in range(inst.n):
        for v in range(inst.n):
            if u == v:
                continue
            form = swap_form(inst, u, v)
            m = big_m_swap(inst, u, v).M
            # Delta_uv >= -M (d_v + 1 - d_u)  ->  coef.d + M d_v - M d_u >= -M - const
            terms = _delta_terms(form.coef)
            terms[d_name(v)] = terms.get(d_name(v), 0) + m
            terms[d_name(u)] = terms.get(d_name(u), 0) - m
            rows.append(LinearInequality(f"swap_{u + 1}_{v + 1}", terms, ">=", -m - form.const, SWAP))
    return rows


def build_model(inst: Instance, variant: str = "f2") -> MipModel:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    n = inst.n
    obj, const = _objective(inst)
    rows = _fortet_rows(n)
    if variant in ("fs", "fis"):
        rows += _swap_rows(inst)
    if variant in ("fi", "fis"):
        rows += _insert_rows(inst)
    return MipModel(
        n=n,
        variant=variant,
        binaries=[d_name(j) for j in range(n)],
        continuous=[x_name(i, j) for i in range(n) for j in range(i + 1, n)],
        objective=obj,
        objective_constant=const,
        constraints=rows,
    )


# --- LP text -----------------------------------------------------------------

_TERMS_PER_LINE = 8


def _num(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    if q.denominator == 2:
        whole = abs(q.numerator) // 2
        return f"{'-' if q < 0 else ''}{whole}.5"
    raise ValueError(f"coefficient {q} has denominator {q.denominator}")


def _var_key(model: MipModel):
    order = {name: k for k, name in enumerate(model.binaries + model.continuous)}
    return lambda name: order[name]


def _expr(terms: Sequence[tuple[str, Fraction]]) -> list[str]:
    parts = []
    for k, (name, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{_num(mag)} {name}"
        parts.append(f"- {body}" if k == 0 and sign == "-" else (body if k == 0 else f"{sign} {body}"))
    if not parts:
        parts = ["0 d_1"]
    lines = []
    for k in range(0, len(parts), _TERMS_PER_LINE):
        lines.append(" ".join(parts[k:k + _TERMS_PER_LINE]))
    return lines


def emit_lp(model: MipModel, title: str | None = None) -> str:
    """Deterministic LP-format text of ``model``."""
    key = _var_key(model)
    out = [f"\\ {title or 'ucddp'} variant {model.variant} n {model.n}", "Minimize"]
    obj_terms = sorted(model.objective.items(), key=lambda kv: key(kv[0]))
    obj_lines = _expr(obj_terms)
    if model.objective_constant:
        c = model.objective_constant
        obj_lines[-1] += f" {'-' if c < 0 else '+'} {_num(abs(c))}"
    out.append(f" obj: {obj_lines[0]}")
    out += [f"   {line}" for line in obj_lines[1:]]
    out.append("Subject To")
    for row in model.constraints:
        lines = _expr(list(row.coefs.items()))
        lines[-1] += f" {row.sense} {_num(row.rhs)}"
        out.append(f" {row.name}: {lines[0]}")
        out += [f"   {line}" for line in lines[1:]]
    out.append("Bounds")
    out += [f" 0 <= {name} <= 1" for name in model.continuous]
    out.append("Binaries")
    for k in range(0, len(model.binaries), _TERMS_PER_LINE):
        out.append(" " + " ".join(model.binaries[k:k + _TERMS_PER_LINE]))
    out.append("End")
    return "\n".join(out) + "\n"


_HEADER = re.compile(r"^\\ .* variant (\w+) n (\d+)$")
_TOKEN = re.compile(r"[+-]|[0-9]+(?:\.[0-9]+)?|[A-Za-z_][A-Za-z0-9_]*")


def _tag_of(name: str) -> str:
    if name.startswith("fortet"):
        return f"fortet-{name[6]}"
    for tag in (INSERT_EARLY, INSERT_TARDY, SWAP):
        if name.startswith(tag + "_"):
            return tag
    raise ValueError(f"unknown row name {name!r}")


def _parse_expr(text: str) -> tuple[dict[str, Fraction], Fraction]:
    terms: dict[str, Fraction] = {}
    const = Fraction(0)
    sign, coef = 1, None
    for tok in _TOKEN.findall(text):
        if tok in "+-":
            if coef is not None:
                const += sign * coef
            sign, coef = (1 if tok == "+" else -1), None
        elif tok[0].isdigit():
            coef = Fraction(tok)
        else:
            c = sign * (coef if coef is not None else 1)
            if c:
                terms[tok] = terms.get(tok, 0) + c
            sign, coef = 1, None
    if coef is not None:
        const += sign * coef
    return terms, const


def read_lp(text: str) -> MipModel:
    """Read LP text written by :func:`emit_lp` (not a general LP parser)."""
    lines = text.splitlines()
    m = _HEADER.match(lines[0]) if lines else None
    if not m:
        raise ValueError("missing ucddp LP header")
    variant, n = m.group(1), int(m.group(2))
    sections: dict[str, list[str]] = {}
    current = None
    for line in lines[1:]:
        head = line.strip()
        if head in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            current = head
            sections[current] = []
        elif current is not None and head:
            if line.startswith("   ") and sections[current]:
                sections[current][-1] += " " + head
            else:
                sections[current].append(head)

    obj_text = sections["Minimize"][0].split(":", 1)[1]
    objective, const = _parse_expr(obj_text)

    rows = []
    for row in sections.get("Subject To", []):
        name, body = row.split(":", 1)
        sense = next(s for s in (">=", "<=", "=") if s in body)
        left, right = body.split(sense)
        coefs, _ = _parse_expr(left)
        rows.append(LinearInequality(name.strip(), coefs, sense, Fraction(right.strip()), _tag_of(name.strip())))

    continuous = [b.split("<=")[1].strip() for b in sections.get("Bounds", [])]
    binaries = [tok for b in sections.get("Binaries", []) for tok in b.split()]
    return MipModel(n, variant, binaries, continuous, objective, const, rows)
