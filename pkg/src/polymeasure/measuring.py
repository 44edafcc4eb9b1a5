"""Measurings: coalgebra-indexed partial homomorphisms between algebras.

A measuring from algebra A to algebra B by coalgebra C is a table
phi : C x A -> B making the defining square commute:

    phi(c, alpha(fe)) = beta( combine(chi(c), fe, phi) )

where ``combine`` pushes the pair through nabla and applies phi childwise.
The set of all of them is ``mu(C, A, B)``.

Three enumeration strategies are provided and must agree:

* ``brute``       - filter every table (the oracle),
* ``convolution`` - algebra homomorphisms A -> [C,B],
* ``propagate``   - per-state admissible-function sets refined to the
                    greatest fixed point, then consistent choices.

``forced_measuring`` additionally computes the unique candidate table for a
preinitial A by demand-driven recursion; it is exact whenever the recursion
cannot loop (acyclic C, or values in a lazy initial algebra, where cyclic
constraints have no solution).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .core import (
    Label,
    Map,
    STAR,
    UNIT,
    carrier,
    check_guard,
    label_key,
    label_text,
    mk_hom,
)
from .functor import (
    PolyFunctor,
    apply_to_set,
    eta,
    fel_args,
    fel_pos,
    felement,
)
from .fixpoints import (
    Algebra,
    Coalgebra,
    LazyAlgebra,
    alg_apply,
    coalg_out,
    is_preinitial,
)

__all__ = [
    "Measuring",
    "measuring_from_fn",
    "is_measuring",
    "measuring_violations",
    "unit_coalgebra",
    "identity_measuring",
    "curry_partial_hom",
    "curry_conv_hom",
    "measuring_from_partial_hom",
    "measuring_from_conv_hom",
    "enumerate_measurings",
    "measuring_set",
    "ForcedFailure",
    "forced_measuring",
    "tensor_coalgebras",
    "compose_measurings",
    "coalgebra_measuring_check",
    "find_coalgebra_homs",
]


@dataclass(frozen=True)
class Measuring:
    """A validated table C x A -> B, stored canonically ordered."""

    C: Coalgebra
    A: Algebra
    B: object  # Algebra or LazyAlgebra
    entries: tuple  # ((c, a), value) pairs in canonical (c, a) order

    def value(self, c: Label, a: Label):
        return self._table[(c, a)]

    @property
    def _table(self) -> dict:
        cache = self.__dict__.get("_table_cache")
        if cache is None:
            cache = dict(self.entries)
            self.__dict__["_table_cache"] = cache
        return cache

    def as_dict(self) -> dict:
        return dict(self.entries)

    def sort_key(self):
        return tuple(label_key(v) for _, v in self.entries)

    def __repr__(self) -> str:
        cells = " ".join(
            f"({label_text(c)},{label_text(a)})->{label_text(v)}" for (c, a), v in self.entries
        )
        return f"<measuring {cells}>"


def _beta(b, pos: Label, args: tuple):
    if isinstance(b, LazyAlgebra):
        return b.apply(pos, args)
    return alg_apply(b, pos, args)


def _canonical_entries(c_coalg: Coalgebra, a_alg: Algebra, table) -> tuple:
    lookup = table if not callable(table) else None
    out = []
    for c in c_coalg.carrier:
        for a in a_alg.carrier:
            value = table(c, a) if callable(table) else lookup[(c, a)]
            out.append(((c, a), value))
    return tuple(out)


def measuring_from_fn(c_coalg: Coalgebra, a_alg: Algebra, b_alg, table) -> Measuring:
    return Measuring(c_coalg, a_alg, b_alg, _canonical_entries(c_coalg, a_alg, table))


def _combine_value(functor: PolyFunctor, phi, c: Label, chi_c, fe: Label, b):
    """beta of the nabla-image of (chi(c), fe) with phi applied childwise."""
    pos_c, cargs = chi_c
    y, aargs = fel_pos(fe), fel_args(fe)
    composite = functor.mul(pos_c, y)
    lam = functor.zip_pair(pos_c, y)
    fiber_c = functor.fiber(pos_c)
    fiber_y = functor.fiber(y)
    children = []
    for w in functor.fiber(composite):
        u, v = lam(w)
        children.append(phi(cargs[fiber_c.index(u)], aargs[fiber_y.index(v)]))
    return _beta(b, composite, tuple(children))


def measuring_violations(m: Measuring, first_only: bool = False) -> list:
    """Witnesses (c, F(A)-element) where the measuring square fails."""
    functor = m.A.functor
    out = []
    for c in m.C.carrier:
        chi_c = coalg_out(m.C, c)
        for fe in m.A.structure.dom:
            lhs = m.value(c, m.A.structure(fe))
            rhs = _combine_value(functor, m.value, c, chi_c, fe, m.B)
            if lhs != rhs:
                out.append((c, fe))
                if first_only:
                    return out
    return out


def is_measuring(m: Measuring) -> bool:
    return not measuring_violations(m, first_only=True)


# ---------------------------------------------------------------------------
# The unit coalgebra and the identity measuring
# ---------------------------------------------------------------------------

def unit_coalgebra(functor: PolyFunctor) -> Coalgebra:
    """The one-point coalgebra carried by the monoidal unit via eta."""
    e = eta(functor)
    cod = apply_to_set(functor, UNIT)
    return Coalgebra(functor, UNIT, Map(UNIT, cod, (e(STAR),)), name="unit")


def identity_measuring(a: Algebra) -> Measuring:
    m = measuring_from_fn(unit_coalgebra(a.functor), a, a, lambda c, x: x)
    if not is_measuring(m):
        raise AssertionError("identity measuring failed its own validity check")
    return m


# ---------------------------------------------------------------------------
# Curried representations
# ---------------------------------------------------------------------------

def curry_partial_hom(m: Measuring, guard: int | None = None) -> Map:
    """The C-indexed family form: a map C -> [A,B]."""
    hom = mk_hom(m.A.carrier, m.B.carrier, guard)
    return Map.from_callable(
        m.C.carrier, hom, lambda c: tuple(m.value(c, a) for a in m.A.carrier)
    )


def curry_conv_hom(m: Measuring, guard: int | None = None) -> Map:
    """The convolution form: a map A -> [C,B]."""
    hom = mk_hom(m.C.carrier, m.B.carrier, guard)
    return Map.from_callable(
        m.A.carrier, hom, lambda a: tuple(m.value(c, a) for c in m.C.carrier)
    )


def measuring_from_partial_hom(f: Map, c_coalg: Coalgebra, a_alg: Algebra, b_alg) -> Measuring:
    return measuring_from_fn(
        c_coalg, a_alg, b_alg, lambda c, a: f(c)[a_alg.carrier.index(a)]
    )


def measuring_from_conv_hom(f: Map, c_coalg: Coalgebra, a_alg: Algebra, b_alg) -> Measuring:
    return measuring_from_fn(
        c_coalg, a_alg, b_alg, lambda c, a: f(a)[c_coalg.carrier.index(c)]
    )


# ---------------------------------------------------------------------------
# Enumeration strategies
# ---------------------------------------------------------------------------

def _enumerate_brute(C: Coalgebra, A: Algebra, B: Algebra, guard) -> list[Measuring]:
    cells = [(c, a) for c in C.carrier for a in A.carrier]
    count = len(B.carrier) ** len(cells) if cells else 1
    check_guard(
        "brute-force measuring enumeration (the propagate strategy still fits)",
        count,
        guard,
    )
    out = []
    for values in itertools.product(B.carrier.elements, repeat=len(cells)):
        m = Measuring(C, A, B, tuple(zip(cells, values)))
        if is_measuring(m):
            out.append(m)
    return out


def _enumerate_convolution(C: Coalgebra, A: Algebra, B: Algebra, guard) -> list[Measuring]:
    from .universal import convolution_algebra

    conv = convolution_algebra(C, B, guard=guard)
    count = len(conv.carrier) ** len(A.carrier) if len(A.carrier) else 1
    check_guard(
        "convolution hom enumeration (the propagate strategy still fits)", count, guard
    )
    from .fixpoints import enumerate_algebra_homs

    out = []
    for f in enumerate_algebra_homs(A, conv, guard=guard):
        out.append(measuring_from_conv_hom(f, C, A, B))
    return out


def _solve_row(functor: PolyFunctor, C: Coalgebra, A: Algebra, B, c: Label, child_rows: tuple):
    """The constraints the measuring square puts on the row at state c, given
    the rows at its child states.  Returns a partial row (dict) or None on an
    inconsistency."""
    chi_c = coalg_out(C, c)
    cargs = chi_c[1]

    def phi(cu, av):
        return child_rows[cargs.index(cu)][av]

    row: dict = {}
    for fe in A.structure.dom:
        target = A.structure(fe)
        value = _combine_value(functor, phi, c, chi_c, fe, B)
        if target in row and row[target] != value:
            return None
        row[target] = value
    return row


def _row_completions(row: dict, A: Algebra, B: Algebra):
    free = [a for a in A.carrier if a not in row]
    for values in itertools.product(B.carrier.elements, repeat=len(free)):
        full = dict(row)
        full.update(zip(free, values))
        yield tuple(full[a] for a in A.carrier)


def _enumerate_propagate(C: Coalgebra, A: Algebra, B: Algebra, guard) -> list[Measuring]:
    """Greatest-fixpoint refinement of per-state admissible rows, then
    read-off of globally consistent choices."""
    functor = A.functor
    states = C.carrier.elements
    all_rows = None  # computed lazily; the full function space A -> B

    def top():
        nonlocal all_rows
        if all_rows is None:
            count = len(B.carrier) ** len(A.carrier) if len(A.carrier) else 1
            check_guard("propagate admissible-set initialization", count, guard)
            all_rows = set(itertools.product(B.carrier.elements, repeat=len(A.carrier)))
        return set(all_rows)

    admissible = {c: top() for c in states}

    def refine_once() -> bool:
        changed = False
        for c in states:
            _, cargs = coalg_out(C, c)
            new: set = set()
            for choice in itertools.product(
                *(sorted(admissible[x], key=label_key) for x in cargs)
            ):
                child_rows = tuple(dict(zip(A.carrier.elements, g)) for g in choice)
                row = _solve_row(functor, C, A, B, c, child_rows)
                if row is None:
                    continue
                new.update(_row_completions(row, A, B))
            new &= admissible[c]
            if new != admissible[c]:
                admissible[c] = new
                changed = True
        return changed

    while refine_once():
        pass

    out = []
    for choice in itertools.product(
        *(sorted(admissible[c], key=label_key) for c in states)
    ):
        table = {
            (c, a): choice[i][A.carrier.index(a)]
            for i, c in enumerate(states)
            for a in A.carrier
        }
        m = measuring_from_fn(C, A, B, lambda c, a: table[(c, a)])
        if is_measuring(m):
            out.append(m)
    return out


STRATEGIES = ("brute", "convolution", "propagate")


def enumerate_measurings(C: Coalgebra, A: Algebra, B: Algebra, strategy: str = "propagate",
                         guard: int | None = None) -> list[Measuring]:
    """All measurings from A to B by C, canonically ordered."""
    if strategy == "brute":
        out = _enumerate_brute(C, A, B, guard)
    elif strategy == "convolution":
        out = _enumerate_convolution(C, A, B, guard)
    elif strategy == "propagate":
        out = _enumerate_propagate(C, A, B, guard)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; pick one of {STRATEGIES}")
    return sorted(out, key=Measuring.sort_key)


# ---------------------------------------------------------------------------
# Forced computation (preinitial domain)
# ---------------------------------------------------------------------------

class ForcedFailure(NamedTuple):
    """Why no measuring exists: the blocking (state, element) plus a reason."""

    state: Label
    element: Label
    reason: str


def _is_acyclic(C: Coalgebra) -> bool:
    color = {s: 0 for s in C.carrier}

    def visit(s) -> bool:
        color[s] = 1
        for child in coalg_out(C, s)[1]:
            if color[child] == 1:
                return False
            if color[child] == 0 and not visit(child):
                return False
        color[s] = 2
        return True

    return all(color[s] != 0 or visit(s) for s in C.carrier)


def forced_measuring(C: Coalgebra, A: Algebra, B) -> Measuring | ForcedFailure:
    """The unique measuring from a preinitial A, computed by demand.

    Every element of a preinitial algebra is a structure image, so the value
    at (c, a) is forced through a preferred decomposition of a; a cyclic
    demand means the value would have to be a strict subterm of itself.
    Exact when C is acyclic or B is a lazy initial algebra; in either case a
    cyclic constraint has no solution.
    """
    if not is_preinitial(A):
        raise ValueError("forced_measuring requires a preinitial algebra")
    if not isinstance(B, LazyAlgebra) and not _is_acyclic(C):
        raise ValueError(
            "forced_measuring into a finite codomain needs an acyclic coalgebra; "
            "use enumerate_measurings instead"
        )
    functor = A.functor
    preferred: dict = {}
    for fe in A.structure.dom:
        img = A.structure(fe)
        if img not in preferred:
            preferred[img] = fe

    memo: dict = {}
    in_progress: set = set()

    def value(c: Label, a: Label):
        key = (c, a)
        if key in memo:
            return memo[key]
        if key in in_progress:
            raise _Cyclic(c, a)
        in_progress.add(key)
        try:
            fe = preferred[a]
            result = _combine_value(functor, value, c, coalg_out(C, c), fe, B)
        finally:
            in_progress.discard(key)
        memo[key] = result
        return result

    try:
        entries = _canonical_entries(C, A, lambda c, a: value(c, a))
    except _Cyclic as cyc:
        return ForcedFailure(cyc.state, cyc.element, "cyclic demand has no well-founded value")
    m = Measuring(C, A, B, entries)
    bad = measuring_violations(m, first_only=True)
    if bad:
        return ForcedFailure(bad[0][0], bad[0][1], "forced table violates the measuring square")
    return m


class _Cyclic(Exception):
    def __init__(self, state, element):
        super().__init__()
        self.state = state
        self.element = element


def _maybe_stage_rows(A: Algebra, B, max_stage: int):
    """Stage rows f_0, f_1, ... for the 1 + X functor from a preinitial A.

    Returns (rows, failed_at): rows[j] is the forced j-th row as a dict, and
    failed_at is the first undefinable stage (None if all requested exist).
    """
    alpha = A.structure
    zero_b = _beta(B, "Zero", ())
    rows = [{a: zero_b for a in A.carrier}]
    for j in range(1, max_stage + 1):
        prev = rows[-1]
        row: dict = {}
        ok = True
        for fe in alpha.dom:
            target = alpha(fe)
            if fel_pos(fe) == "Zero":
                value = zero_b
            else:
                value = _beta(B, "Succ", (prev[fel_args(fe)[0]],))
            if target in row and row[target] != value:
                ok = False
                break
            row[target] = value
        if not ok:
            return rows, j
        rows.append(row)
    return rows, None


def maybe_measuring_set(C: Coalgebra, A: Algebra, B) -> list[Measuring]:
    """mu(C, A, B) for the 1 + X functor with A preinitial, via stage rows.

    The row at a state of finite index j is the forced stage row f_j; rows at
    infinite-index states are forced to the stationary row, which is a total
    homomorphism row if one exists.  (Iterating the stage step |A| times from
    any row is stage-independent, so cyclic constraints pin the same row.)
    """
    from .fixpoints import maybe_index, INF

    indices = {c: maybe_index(C, c) for c in C.carrier}
    finite = [i for i in indices.values() if i is not INF]
    max_finite = max(finite, default=-1)
    need_inf = any(i is INF for i in indices.values())
    rows, failed_at = _maybe_stage_rows(A, B, max_finite)
    if failed_at is not None:
        return []
    inf_row = None
    if need_inf:
        probe, probe_failed = _maybe_stage_rows(A, B, max(len(A.carrier), max_finite) + 1)
        if probe_failed is not None:
            return []
        inf_row = probe[-1]
        if probe[-2] != inf_row:
            return []  # the stage rows never become stationary, so no total row
    table = {}
    for c in C.carrier:
        row = inf_row if indices[c] is INF else rows[indices[c]]
        for a in A.carrier:
            table[(c, a)] = row[a]
    m = measuring_from_fn(C, A, B, lambda c, a: table[(c, a)])
    if not is_measuring(m):
        return []
    return [m]


def measuring_set(C: Coalgebra, A: Algebra, B, guard: int | None = None) -> list[Measuring]:
    """mu(C, A, B) by the cheapest exact route available."""
    if isinstance(B, LazyAlgebra):
        result = forced_measuring(C, A, B)
        return [result] if isinstance(result, Measuring) else []
    if A.functor.name == "maybe" and is_preinitial(A):
        return maybe_measuring_set(C, A, B)
    if is_preinitial(A) and _is_acyclic(C):
        result = forced_measuring(C, A, B)
        return [result] if isinstance(result, Measuring) else []
    return enumerate_measurings(C, A, B, "propagate", guard)


# ---------------------------------------------------------------------------
# Tensor of coalgebras, composition, coalgebra-valued measurings
# ---------------------------------------------------------------------------

def tensor_coalgebras(D: Coalgebra, C: Coalgebra, guard: int | None = None) -> Coalgebra:
    """The coalgebra on D x C with structure nabla . (delta x chi)."""
    if D.functor != C.functor:
        raise ValueError("tensor requires coalgebras over the same functor")
    functor = D.functor
    prod = carrier((d, c) for d in D.carrier for c in C.carrier)
    check_guard("coalgebra tensor carrier", len(prod), guard)

    def table(state):
        d, c = state
        pos_d, dargs = coalg_out(D, d)
        pos_c, cargs = coalg_out(C, c)
        composite = functor.mul(pos_d, pos_c)
        lam = functor.zip_pair(pos_d, pos_c)
        fd, fc = functor.fiber(pos_d), functor.fiber(pos_c)
        children = tuple(
            (dargs[fd.index(u)], cargs[fc.index(v)])
            for u, v in (lam(w) for w in functor.fiber(composite))
        )
        return (composite, children)

    cod = apply_to_set(functor, prod, guard)
    return Coalgebra(
        functor,
        prod,
        Map.from_callable(prod, cod, lambda s: felement(*table(s))),
        name=f"{D.name}(x){C.name}" if D.name and C.name else "",
    )


def compose_measurings(psi: Measuring, phi: Measuring, guard: int | None = None) -> Measuring:
    """psi in mu(D, A2, A3) after phi in mu(C, A1, A2): the table
    ((d, c), a) -> psi(d, phi(c, a)) over the coalgebra tensor."""
    if psi.A is not phi.B and psi.A != phi.B:
        raise ValueError("measurings do not compose: middle algebra mismatch")
    tensor = tensor_coalgebras(psi.C, phi.C, guard)
    m = measuring_from_fn(
        tensor, phi.A, psi.B, lambda dc, a: psi.value(dc[0], phi.value(dc[1], a))
    )
    if not is_measuring(m):
        raise AssertionError("composition produced an invalid measuring")
    return m


def coalgebra_measuring_check(table, C: Coalgebra, C1: Coalgebra, C2: Coalgebra):
    """A table C x C1 -> C2 measures coalgebras iff it is a coalgebra
    homomorphism out of the tensor.  Returns (ok, witness)."""
    tensor = tensor_coalgebras(C, C1)
    f = Map.from_callable(
        tensor.carrier, C2.carrier, lambda s: table(s[0], s[1]) if callable(table) else table[s]
    )
    for s in tensor.carrier:
        pos, args = coalg_out(tensor, s)
        dpos, dargs = coalg_out(C2, f(s))
        if pos != dpos or tuple(f(x) for x in args) != dargs:
            return False, s
    return True, None


def find_coalgebra_homs(C: Coalgebra, D: Coalgebra, limit: int = 2) -> list[Map]:
    """Up to ``limit`` coalgebra homomorphisms C -> D, by backtracking.

    Positions must match and children must map consistently, so the search
    space collapses quickly; for a subterminal D there is at most one hom.
    """
    states = C.carrier.elements
    found: list[Map] = []

    def extend(assign: dict, todo: list) -> None:
        if len(found) >= limit:
            return
        todo = [t for t in todo if t not in assign]
        if not todo:
            found.append(Map.from_dict(C.carrier, D.carrier, assign))
            return
        s = todo[0]
        pos, args = coalg_out(C, s)
        for d in D.carrier:
            dpos, dargs = coalg_out(D, d)
            if dpos != pos:
                continue
            new_assign = dict(assign)
            new_assign[s] = d
            ok = True
            queue = list(zip(args, dargs))
            extra: list = []
            while queue:
                x, dx = queue.pop()
                if x in new_assign:
                    if new_assign[x] != dx:
                        ok = False
                        break
                    continue
                new_assign[x] = dx
                xpos, xargs = coalg_out(C, x)
                dxpos, dxargs = coalg_out(D, dx)
                if xpos != dxpos:
                    ok = False
                    break
                queue.extend(zip(xargs, dxargs))
                extra.append(x)
            if ok:
                extend(new_assign, [t for t in todo[1:] if t not in new_assign])
        return

    extend({}, list(states))
    unique = []
    seen = set()
    for f in found:
        if f.images not in seen:
            seen.add(f.images)
            unique.append(f)
    return unique[:limit]
