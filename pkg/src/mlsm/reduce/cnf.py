"""CNF formulas: DIMACS I/O, the two/three-literal restriction, and a
small DPLL oracle.

Literals are signed integers as in DIMACS: ``3`` is x3, ``-3`` is x̄3.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..core import ParseError
from ..solve import CapExceeded

SAT_CAP = 20

Clause = Tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for j, c in enumerate(self.clauses, start=1):
            if not c:
                raise ValueError(f"clause {j} is empty")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {j}: literal {lit} out of range for {self.num_vars} variables")
                if -lit in c:
                    raise ValueError(f"clause {j} holds both x{abs(lit)} and its negation")

    @classmethod
    def of(cls, num_vars: int, clauses: Sequence[Sequence[int]]) -> "CnfFormula":
        return cls(num_vars, tuple(tuple(c) for c in clauses))


def evaluate(cnf: CnfFormula, assignment: Mapping[int, bool]) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in cnf.clauses)


def _monotone(c: Clause) -> bool:
    return all(l > 0 for l in c) or all(l < 0 for l in c)


def is_restricted(cnf: CnfFormula) -> bool:
    """Size-2 clauses monotone; size-3 clauses with a positive first and a
    negative second literal."""
    for c in cnf.clauses:
        if len(c) == 2 and not _monotone(c):
            return False
        if len(c) == 3 and not (c[0] > 0 and c[1] < 0):
            return False
        if len(c) not in (2, 3):
            return False
    return True


def _order3(c: Sequence[int]) -> Clause:
    # first positive and first negative by position, the rest keeps order
    lits = list(c)
    p = next(k for k, l in enumerate(lits) if l > 0)
    first = lits.pop(p)
    q = next(k for k, l in enumerate(lits) if l < 0)
    second = lits.pop(q)
    return (first, second, *lits)


def restrict_3sat(cnf: CnfFormula) -> CnfFormula:
    """Equisatisfiable formula in the restricted form.

    Adds a helper ``z_i = x_{num_vars + i}`` per variable with clauses
    ``(x_i | z_i)`` and ``(-x_i | -z_i)``.  A monotone 3-clause gets its
    first literal swapped for the opposite-sign helper.  Clauses shorter
    than three are brought into shape by repeating literals: ``(l)``
    becomes ``(l | l)`` and a mixed 2-clause ``(p | -q)`` becomes the
    3-clause ``(p | -q | p)``.
    """
    n = cnf.num_vars
    out: List[Clause] = []
    for j, c in enumerate(cnf.clauses, start=1):
        if not 1 <= len(c) <= 3:
            raise ValueError(f"clause {j} has {len(c)} literals; expected 1 to 3")
        if len(c) == 1:
            out.append((c[0], c[0]))
        elif len(c) == 2:
            out.append(c if _monotone(c) else _order3((*c, c[0])))
        else:
            if _monotone(c):
                x = abs(c[0])
                helper = n + x
                c = ((-helper if c[0] > 0 else helper), *c[1:])
            out.append(_order3(c))
    for i in range(1, n + 1):
        out.append((i, n + i))
        out.append((-i, -(n + i)))
    return CnfFormula(2 * n, tuple(out))


def cnf_sat(cnf: CnfFormula, cap: int = SAT_CAP) -> Optional[Dict[int, bool]]:
    """A satisfying assignment (DPLL with unit propagation) or None.

    Unconstrained variables are set to False.
    """
    if cnf.num_vars > cap:
        raise CapExceeded(f"{cnf.num_vars} variables exceeds the SAT oracle cap {cap}")
    clauses = [frozenset(c) for c in cnf.clauses]

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if -lit in c:
                c = c - {-lit}
                if not c:
                    return None
            out.append(c)
        return out

    def dpll(cls, assign):
        while True:
            unit = next((c for c in cls if len(c) == 1), None)
            if unit is None:
                break
            lit = next(iter(unit))
            assign = {**assign, abs(lit): lit > 0}
            cls = simplify(cls, lit)
            if cls is None:
                return None
        if not cls:
            return assign
        lit = min(min(cls, key=len), key=abs)
        for choice in (lit, -lit):
            nxt = simplify(cls, choice)
            if nxt is not None:
                res = dpll(nxt, {**assign, abs(choice): choice > 0})
                if res is not None:
                    return res
        return None

    res = dpll(clauses, {})
    if res is None:
        return None
    full = {i: res.get(i, False) for i in range(1, cnf.num_vars + 1)}
    assert evaluate(cnf, full)
    return full


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF.  Clauses holding a literal and its negation are
    always true and are dropped."""
    nv = nc = None
    clauses: List[Clause] = []
    pending: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        toks = line.split()
        if toks[0] == "p":
            if nv is not None or len(toks) != 4 or toks[1] != "cnf":
                raise ParseError("expected a single 'p cnf <vars> <clauses>' header", lineno)
            try:
                nv, nc = int(toks[2]), int(toks[3])
            except ValueError:
                raise ParseError("non-integer header field", lineno) from None
            continue
        if nv is None:
            raise ParseError("clause before the 'p cnf' header", lineno)
        for t in toks:
            try:
                lit = int(t)
            except ValueError:
                raise ParseError(f"bad literal {t!r}", lineno) from None
            if abs(lit) > nv:
                raise ParseError(f"literal {lit} exceeds declared {nv} variables", lineno)
            if lit == 0:
                if not pending:
                    raise ParseError("empty clause", lineno)
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if nv is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        clauses.append(tuple(pending))
    if len(clauses) != nc:
        raise ParseError(f"header declares {nc} clauses, found {len(clauses)}")
    kept = [c for c in clauses if not any(-l in c for l in c)]
    return CnfFormula(nv, tuple(kept))


def format_dimacs(cnf: CnfFormula) -> str:
    out = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    out += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(out) + "\n"
