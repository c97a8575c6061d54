"""M-conditions: nested graph conditions with node-/edge-set quantifiers and
interpretation constraints, plus the brute-force satisfaction checker.

Satisfaction of set quantifiers enumerates all subsets of the host graph's
nodes/edges, so everything here is deliberately desk-scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graphs import (EMPTY_GRAPH, Graph, GraphError, Morphism,
                     enumerate_extensions, fresh_name, path_exists)


class ConditionError(Exception):
    """Ill-formed condition, constraint, or interpretation."""


# -- interpretation constraints (gamma) --------------------------------------


class Constraint:
    __slots__ = ()


@dataclass(frozen=True)
class CTrue(Constraint):
    pass


@dataclass(frozen=True)
class CIn(Constraint):
    """Membership literal: item `x` is in set variable `var` of sort `kind`
    ("V" or "E")."""
    item: str
    var: str
    kind: str


@dataclass(frozen=True)
class CPath(Constraint):
    """Directed path predicate with an optional excluded-edge set."""
    source: str
    target: str
    excluded: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "excluded", tuple(sorted(set(self.excluded))))


@dataclass(frozen=True)
class CNot(Constraint):
    body: Constraint


@dataclass(frozen=True)
class CAnd(Constraint):
    parts: tuple


@dataclass(frozen=True)
class COr(Constraint):
    parts: tuple


C_TRUE = CTrue()
C_FALSE = CNot(C_TRUE)


def c_and(*parts) -> Constraint:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, CAnd) else [p])
    if not flat:
        return C_TRUE
    if len(flat) == 1:
        return flat[0]
    return CAnd(tuple(flat))


def c_or(*parts) -> Constraint:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, COr) else [p])
    if not flat:
        return C_FALSE
    if len(flat) == 1:
        return flat[0]
    return COr(tuple(flat))


def c_not(p: Constraint) -> Constraint:
    return CNot(p)


def constraint_set_vars(g: Constraint) -> frozenset:
    if isinstance(g, CIn):
        return frozenset({(g.var, g.kind)})
    if isinstance(g, CNot):
        return constraint_set_vars(g.body)
    if isinstance(g, (CAnd, COr)):
        out = frozenset()
        for p in g.parts:
            out |= constraint_set_vars(p)
        return out
    return frozenset()


def constraint_items(g: Constraint) -> frozenset:
    if isinstance(g, CIn):
        return frozenset({g.item})
    if isinstance(g, CPath):
        return frozenset({g.source, g.target}) | frozenset(g.excluded)
    if isinstance(g, CNot):
        return constraint_items(g.body)
    if isinstance(g, (CAnd, COr)):
        out = frozenset()
        for p in g.parts:
            out |= constraint_items(p)
        return out
    return frozenset()


def validate_constraint(g: Constraint, context: Graph) -> None:
    if isinstance(g, CTrue):
        return
    if isinstance(g, CIn):
        if g.kind == "V":
            if not context.has_node(g.item):
                raise ConditionError(f"membership of unknown node {g.item!r}")
        elif g.kind == "E":
            if not context.has_edge(g.item):
                raise ConditionError(f"membership of unknown edge {g.item!r}")
        else:
            raise ConditionError(f"bad sort {g.kind!r}")
        return
    if isinstance(g, CPath):
        if not context.has_node(g.source) or not context.has_node(g.target):
            raise ConditionError("path endpoints must be nodes of the context")
        for e in g.excluded:
            if not context.has_edge(e):
                raise ConditionError(f"excluded edge {e!r} not in the context")
        return
    if isinstance(g, CNot):
        validate_constraint(g.body, context)
        return
    if isinstance(g, (CAnd, COr)):
        for p in g.parts:
            validate_constraint(p, context)
        return
    raise ConditionError(f"not a constraint: {g!r}")


def rename_constraint(g: Constraint, mapping) -> Constraint:
    m = lambda x: mapping.get(x, x)
    if isinstance(g, CIn):
        return CIn(m(g.item), g.var, g.kind)
    if isinstance(g, CPath):
        return CPath(m(g.source), m(g.target), tuple(m(e) for e in g.excluded))
    if isinstance(g, CNot):
        return CNot(rename_constraint(g.body, mapping))
    if isinstance(g, CAnd):
        return CAnd(tuple(rename_constraint(p, mapping) for p in g.parts))
    if isinstance(g, COr):
        return COr(tuple(rename_constraint(p, mapping) for p in g.parts))
    return g


# -- interpretations ----------------------------------------------------------


class Interp:
    """A partial map from set variables to node/edge subsets of a host graph.

    Immutable; `extend` returns a new interpretation with one more binding.
    """

    __slots__ = ("_map", "_key", "_hash")

    def __init__(self, bindings: Iterable = ()):
        m = {}
        for var, kind, items in bindings:
            m[var] = (kind, frozenset(items))
        self._map = m
        self._key = tuple(sorted((v, k[0], tuple(sorted(k[1]))) for v, k in m.items()))
        self._hash = hash(self._key)

    def defined(self, var: str) -> bool:
        return var in self._map

    def kind(self, var: str) -> str:
        return self._map[var][0]

    def value(self, var: str) -> frozenset:
        return self._map[var][1]

    def extend(self, var: str, kind: str, items) -> "Interp":
        out = Interp.__new__(Interp)
        m = dict(self._map)
        m[var] = (kind, frozenset(items))
        out._map = m
        out._key = tuple(sorted((v, k[0], tuple(sorted(k[1]))) for v, k in m.items()))
        out._hash = hash(out._key)
        return out

    def variables(self):
        return sorted(self._map)

    def __eq__(self, other):
        return isinstance(other, Interp) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Interp{" + ", ".join(
            f"{v}->{sorted(k[1])}" for v, k in sorted(self._map.items())) + "}"


EMPTY_INTERP = Interp()


def validate_interpretation(i: Interp, g: Graph) -> None:
    for var in i.variables():
        kind, items = i.kind(var), i.value(var)
        universe = set(g.nodes) if kind == "V" else set(g.edges)
        if not items <= universe:
            raise ConditionError(f"interpretation of {var!r} is not sort-respecting")


# -- M-conditions -------------------------------------------------------------


class MCondition:
    __slots__ = ()


@dataclass(frozen=True)
class MTrue(MCondition):
    pass


@dataclass(frozen=True)
class ExSet(MCondition):
    """Set-variable existential, over nodes (kind "V") or edges (kind "E")."""
    var: str
    kind: str
    body: MCondition


@dataclass(frozen=True)
class ExistsQ(MCondition):
    """Morphism existential with an interpretation constraint over the codomain."""
    morphism: Morphism
    constraint: Constraint
    body: MCondition


@dataclass(frozen=True)
class MNot(MCondition):
    body: MCondition


@dataclass(frozen=True)
class MAnd(MCondition):
    parts: tuple


@dataclass(frozen=True)
class MOr(MCondition):
    parts: tuple


M_TRUE = MTrue()
M_FALSE = MNot(M_TRUE)


def m_and(*parts) -> MCondition:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, MAnd) else [p])
    if not flat:
        return M_TRUE
    if len(flat) == 1:
        return flat[0]
    return MAnd(tuple(flat))


def m_or(*parts) -> MCondition:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, MOr) else [p])
    if not flat:
        return M_FALSE
    if len(flat) == 1:
        return flat[0]
    return MOr(tuple(flat))


def m_not(p: MCondition) -> MCondition:
    return MNot(p)


def implies(a: MCondition, b: MCondition) -> MCondition:
    return m_or(MNot(a), b)


def iff(a: MCondition, b: MCondition) -> MCondition:
    return m_and(implies(a, b), implies(b, a))


def exists_q(morphism: Morphism, constraint: Constraint = C_TRUE,
             body: MCondition = M_TRUE) -> MCondition:
    return ExistsQ(morphism, constraint, body)


def forall_q(morphism: Morphism, constraint: Constraint = C_TRUE,
             body: MCondition = M_TRUE) -> MCondition:
    """The abbreviation: a universally quantified morphism is a negated
    existential with a negated body."""
    return MNot(ExistsQ(morphism, constraint, MNot(body)))


def validate_condition(c: MCondition, context: Graph) -> None:
    if isinstance(c, MTrue):
        return
    if isinstance(c, ExSet):
        if c.kind not in ("V", "E"):
            raise ConditionError(f"bad quantifier sort {c.kind!r}")
        validate_condition(c.body, context)
        return
    if isinstance(c, ExistsQ):
        if c.morphism.domain != context:
            raise ConditionError("morphism domain is not the context graph")
        if not c.morphism.is_injective:
            raise ConditionError("condition morphisms must be injective")
        validate_constraint(c.constraint, c.morphism.codomain)
        validate_condition(c.body, c.morphism.codomain)
        return
    if isinstance(c, MNot):
        validate_condition(c.body, context)
        return
    if isinstance(c, (MAnd, MOr)):
        for p in c.parts:
            validate_condition(p, context)
        return
    raise ConditionError(f"not an M-condition: {c!r}")


def free_set_vars(c: MCondition) -> frozenset:
    """Set variables (name, kind) occurring in constraints but not bound above."""
    if isinstance(c, MTrue):
        return frozenset()
    if isinstance(c, ExSet):
        return frozenset(p for p in free_set_vars(c.body) if p[0] != c.var)
    if isinstance(c, ExistsQ):
        return constraint_set_vars(c.constraint) | free_set_vars(c.body)
    if isinstance(c, MNot):
        return free_set_vars(c.body)
    if isinstance(c, (MAnd, MOr)):
        out = frozenset()
        for p in c.parts:
            out |= free_set_vars(p)
        return out
    raise ConditionError(f"not an M-condition: {c!r}")


def is_constraint_closed(c: MCondition) -> bool:
    return not free_set_vars(c)


def bound_set_vars(c: MCondition) -> list:
    out = []
    if isinstance(c, ExSet):
        out.append((c.var, c.kind))
        out.extend(bound_set_vars(c.body))
    elif isinstance(c, ExistsQ):
        out.extend(bound_set_vars(c.body))
    elif isinstance(c, MNot):
        out.extend(bound_set_vars(c.body))
    elif isinstance(c, (MAnd, MOr)):
        for p in c.parts:
            out.extend(bound_set_vars(p))
    return out


def rename_set_vars(c: MCondition, mapping: dict) -> MCondition:
    def ren_constraint(g):
        if isinstance(g, CIn):
            return CIn(g.item, mapping.get(g.var, g.var), g.kind)
        if isinstance(g, CNot):
            return CNot(ren_constraint(g.body))
        if isinstance(g, CAnd):
            return CAnd(tuple(ren_constraint(p) for p in g.parts))
        if isinstance(g, COr):
            return COr(tuple(ren_constraint(p) for p in g.parts))
        return g

    if isinstance(c, MTrue):
        return c
    if isinstance(c, ExSet):
        return ExSet(mapping.get(c.var, c.var), c.kind, rename_set_vars(c.body, mapping))
    if isinstance(c, ExistsQ):
        return ExistsQ(c.morphism, ren_constraint(c.constraint),
                       rename_set_vars(c.body, mapping))
    if isinstance(c, MNot):
        return MNot(rename_set_vars(c.body, mapping))
    if isinstance(c, MAnd):
        return MAnd(tuple(rename_set_vars(p, mapping) for p in c.parts))
    if isinstance(c, MOr):
        return MOr(tuple(rename_set_vars(p, mapping) for p in c.parts))
    raise ConditionError(f"not an M-condition: {c!r}")


def ensure_distinct_quantifiers(c: MCondition) -> MCondition:
    """Alpha-rename so distinct quantifiers bind distinct set variables."""
    seen = set(v for v, _ in free_set_vars(c))

    def go(node, env):
        if isinstance(node, ExSet):
            var = node.var
            if var in seen:
                var = fresh_name(var, seen)
            seen.add(var)
            env2 = dict(env)
            env2[node.var] = var
            return ExSet(var, node.kind, go(node.body, env2))
        if isinstance(node, ExistsQ):
            def sub(g):
                if isinstance(g, CIn):
                    return CIn(g.item, env.get(g.var, g.var), g.kind)
                if isinstance(g, CNot):
                    return CNot(sub(g.body))
                if isinstance(g, CAnd):
                    return CAnd(tuple(sub(p) for p in g.parts))
                if isinstance(g, COr):
                    return COr(tuple(sub(p) for p in g.parts))
                return g
            return ExistsQ(node.morphism, sub(node.constraint), go(node.body, env))
        if isinstance(node, MNot):
            return MNot(go(node.body, env))
        if isinstance(node, MAnd):
            return MAnd(tuple(go(p, env) for p in node.parts))
        if isinstance(node, MOr):
            return MOr(tuple(go(p, env) for p in node.parts))
        return node

    return go(c, {})


def rename_condition(c: MCondition, mapping: dict, context: Graph) -> MCondition:
    """Rename context identifiers throughout a condition.

    Requires all morphisms to be inclusions (the representation every parser
    and transformation in this package produces); codomain-local items that
    would collide with a new name are renamed deterministically.
    """
    new_context = context.rename(mapping)
    if isinstance(c, (MTrue,)):
        return c
    if isinstance(c, ExSet):
        return ExSet(c.var, c.kind, rename_condition(c.body, mapping, context))
    if isinstance(c, MNot):
        return MNot(rename_condition(c.body, mapping, context))
    if isinstance(c, MAnd):
        return MAnd(tuple(rename_condition(p, mapping, context) for p in c.parts))
    if isinstance(c, MOr):
        return MOr(tuple(rename_condition(p, mapping, context) for p in c.parts))
    if isinstance(c, ExistsQ):
        if not c.morphism.is_inclusion:
            raise ConditionError("rename_condition expects inclusion morphisms")
        cod = c.morphism.codomain
        sub = dict(mapping)
        taken = set(new_context.items()) | set(sub.values()) | set(cod.items())
        new_names = set(mapping.values())
        for x in cod.items():
            if context.has_item(x):
                continue
            if x in new_names:
                name = fresh_name(x, taken)
                sub[x] = name
                taken.add(name)
        new_cod = cod.rename(sub)
        inner = rename_condition(c.body, sub, cod)
        return ExistsQ(Morphism.inclusion(new_context, new_cod),
                       rename_constraint(c.constraint, sub), inner)
    raise ConditionError(f"not an M-condition: {c!r}")


# -- evaluation ---------------------------------------------------------------


def eval_constraint(g: Constraint, interp: Interp, q: Morphism) -> bool:
    """The inductive value of gamma under an interpretation and a morphism.

    A constraint mentioning any set variable the interpretation is undefined
    on evaluates to false outright.
    """
    for var, _kind in constraint_set_vars(g):
        if not interp.defined(var):
            return False
    host = q.codomain

    def ev(node):
        if isinstance(node, CTrue):
            return True
        if isinstance(node, CIn):
            return q(node.item) in interp.value(node.var)
        if isinstance(node, CPath):
            return path_exists(host, q(node.source), q(node.target),
                               frozenset(q(e) for e in node.excluded))
        if isinstance(node, CNot):
            return not ev(node.body)
        if isinstance(node, CAnd):
            return all(ev(p) for p in node.parts)
        if isinstance(node, COr):
            return any(ev(p) for p in node.parts)
        raise ConditionError(f"not a constraint: {node!r}")

    return ev(g)


def _subsets(universe):
    for r in range(len(universe) + 1):
        yield from itertools.combinations(universe, r)


def satisfies(p: Morphism, c: MCondition, interp: Interp = EMPTY_INTERP) -> bool:
    """Does the injective morphism p satisfy c with respect to interp?"""
    if not p.is_injective:
        raise ConditionError("satisfaction is defined for injective morphisms")
    host = p.codomain
    ext_cache: dict = {}
    memo: dict = {}

    def extensions_of(a: Morphism, q: Morphism):
        key = (id(a), q)
        out = ext_cache.get(key)
        if out is None:
            out = enumerate_extensions(a, q)
            ext_cache[key] = out
        return out

    def go(q: Morphism, node: MCondition, i: Interp) -> bool:
        key = (id(node), q, i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, MTrue):
            res = True
        elif isinstance(node, ExSet):
            universe = host.nodes if node.kind == "V" else host.edges
            res = any(go(q, node.body, i.extend(node.var, node.kind, sub))
                      for sub in _subsets(universe))
        elif isinstance(node, ExistsQ):
            res = any(eval_constraint(node.constraint, i, ext)
                      and go(ext, node.body, i)
                      for ext in extensions_of(node.morphism, q))
        elif isinstance(node, MNot):
            res = not go(q, node.body, i)
        elif isinstance(node, MAnd):
            res = all(go(q, part, i) for part in node.parts)
        elif isinstance(node, MOr):
            res = any(go(q, part, i) for part in node.parts)
        else:
            raise ConditionError(f"not an M-condition: {node!r}")
        memo[key] = res
        return res

    return go(p, c, interp)


def graph_satisfies(g: Graph, c: MCondition) -> bool:
    """G satisfies an M-constraint: the empty morphism into G satisfies it
    under the empty interpretation."""
    missing = free_set_vars(c)
    if missing:
        raise ConditionError(f"constraint has free set variables: {sorted(missing)}")
    i_g = Morphism(EMPTY_GRAPH, g, {}, {})
    return satisfies(i_g, c, EMPTY_INTERP)


def find_witness(p: Morphism, c: MCondition, interp: Interp = EMPTY_INTERP):
    """A witness trace for satisfaction, or None. Mirrors `satisfies` but
    records the choices made at existential nodes."""
    host = p.codomain

    def go(q, node, i):
        if isinstance(node, MTrue):
            return {"kind": "true"}
        if isinstance(node, ExSet):
            universe = host.nodes if node.kind == "V" else host.edges
            for sub in _subsets(universe):
                w = go(q, node.body, i.extend(node.var, node.kind, sub))
                if w is not None:
                    return {"kind": "exists-set", "var": node.var,
                            "sort": node.kind, "value": sorted(sub), "child": w}
            return None
        if isinstance(node, ExistsQ):
            for ext in enumerate_extensions(node.morphism, q):
                if not eval_constraint(node.constraint, i, ext):
                    continue
                w = go(ext, node.body, i)
                if w is not None:
                    return {"kind": "exists", "mapping": dict(sorted(ext.mapping().items())),
                            "child": w}
            return None
        if isinstance(node, MNot):
            return None if go(q, node.body, i) is not None else {"kind": "not"}
        if isinstance(node, MAnd):
            children = []
            for part in node.parts:
                w = go(q, part, i)
                if w is None:
                    return None
                children.append(w)
            return {"kind": "and", "children": children}
        if isinstance(node, MOr):
            for k, part in enumerate(node.parts):
                w = go(q, part, i)
                if w is not None:
                    return {"kind": "or", "branch": k, "child": w}
            return None
        raise ConditionError(f"not an M-condition: {node!r}")

    return go(p, c, interp)


# -- simplification -----------------------------------------------------------


def _is_cfalse(g: Constraint) -> bool:
    return isinstance(g, CNot) and isinstance(g.body, CTrue)


# status of a constraint under interpretations defining all its variables
_ST_FALSE, _ST_TRUE, _ST_OTHER = 0, 1, 2


def _fold_constraint(g: Constraint):
    """Fold a constraint without changing its set-variable occurrences.

    A constraint mentioning an undefined variable is false as a whole, so the
    semantics is not compositional: rewriting a subterm may only drop variables
    when the subterm is variable-free.  The returned status records whether the
    folded constraint, evaluated as a whole, is false (resp. true) under every
    interpretation defining all its variables; enclosing condition nodes may
    act on the status even when the syntax cannot be collapsed.
    """
    if isinstance(g, CTrue):
        return g, _ST_TRUE
    if isinstance(g, CPath):
        if g.source == g.target:
            return C_TRUE, _ST_TRUE  # the empty path; variable-free
        return g, _ST_OTHER
    if isinstance(g, CIn):
        return g, _ST_OTHER
    if isinstance(g, CNot):
        b, st = _fold_constraint(g.body)
        if isinstance(b, CNot):
            return b.body, _flip(st)
        return CNot(b), _flip(st)
    if isinstance(g, CAnd):
        parts, statuses = [], []
        for p in g.parts:
            sp, st = _fold_constraint(p)
            if isinstance(sp, CTrue):
                continue  # variable-free, safe to drop
            statuses.append(st)
            parts.extend(sp.parts if isinstance(sp, CAnd) else [sp])
        dedup = []
        for p in parts:
            if p not in dedup:
                dedup.append(p)
        if not dedup:
            return C_TRUE, _ST_TRUE
        if any(s == _ST_FALSE for s in statuses):
            status = _ST_FALSE
            if not any(constraint_set_vars(p) for p in dedup):
                return C_FALSE, _ST_FALSE
        elif all(s == _ST_TRUE for s in statuses):
            status = _ST_TRUE
        else:
            status = _ST_OTHER
        out = dedup[0] if len(dedup) == 1 else CAnd(tuple(dedup))
        return out, status
    if isinstance(g, COr):
        parts, statuses = [], []
        for p in g.parts:
            sp, st = _fold_constraint(p)
            if _is_cfalse(sp):
                continue  # variable-free, safe to drop
            statuses.append(st)
            parts.extend(sp.parts if isinstance(sp, COr) else [sp])
        dedup = []
        for p in parts:
            if p not in dedup:
                dedup.append(p)
        if not dedup:
            return C_FALSE, _ST_FALSE
        if any(s == _ST_TRUE for s in statuses):
            status = _ST_TRUE
            if not any(constraint_set_vars(p) for p in dedup):
                return C_TRUE, _ST_TRUE
        elif all(s == _ST_FALSE for s in statuses):
            status = _ST_FALSE
        else:
            status = _ST_OTHER
        out = dedup[0] if len(dedup) == 1 else COr(tuple(dedup))
        return out, status
    raise ConditionError(f"not a constraint: {g!r}")


def _flip(status):
    if status == _ST_FALSE:
        return _ST_TRUE
    if status == _ST_TRUE:
        return _ST_FALSE
    return _ST_OTHER


def simplify_constraint(g: Constraint) -> Constraint:
    """Light, satisfaction-preserving folding; never changes which set
    variables occur (the undefined-variable rule makes that unsafe)."""
    out, _ = _fold_constraint(g)
    return out


def constraint_always_false(g: Constraint) -> bool:
    """Is the constraint, evaluated as a whole, false under every
    interpretation and morphism?  Conservative syntactic analysis."""
    _, status = _fold_constraint(g)
    return status == _ST_FALSE


def constraint_always_true(g: Constraint) -> bool:
    """True under every interpretation defining all its variables, and
    variable-free (hence true outright)."""
    out, status = _fold_constraint(g)
    return status == _ST_TRUE and not constraint_set_vars(out)


def _is_mfalse(c: MCondition) -> bool:
    return isinstance(c, MNot) and isinstance(c.body, MTrue)


def simplify(c: MCondition) -> MCondition:
    """True/false absorption, idempotence, collapse of trivial existentials.

    Satisfaction-preserving (property-tested); used to normalize generated
    preconditions into the hand-simplified shapes of worked examples.
    """
    if isinstance(c, MTrue):
        return c
    if isinstance(c, ExSet):
        b = simplify(c.body)
        if isinstance(b, MTrue):
            return M_TRUE
        if _is_mfalse(b):
            return M_FALSE
        return ExSet(c.var, c.kind, b)
    if isinstance(c, ExistsQ):
        gam = simplify_constraint(c.constraint)
        b = simplify(c.body)
        if constraint_always_false(gam) or _is_mfalse(b):
            return M_FALSE  # no extension can make the constraint true
        if constraint_always_true(gam):
            gam = C_TRUE
        m = c.morphism
        if isinstance(gam, CTrue) and m.domain == m.codomain and m.is_inclusion:
            return b  # identity extension adds nothing
        return ExistsQ(m, gam, b)
    if isinstance(c, MNot):
        b = simplify(c.body)
        if isinstance(b, MNot):
            return b.body
        if isinstance(b, MOr):
            # De Morgan: negated disjunctions become conjunctions of negated
            # existentials, the shape universally quantified conditions print as
            return simplify(MAnd(tuple(MNot(p) for p in b.parts)))
        return MNot(b)
    if isinstance(c, MAnd):
        parts = []
        for p in c.parts:
            sp = simplify(p)
            if isinstance(sp, MTrue):
                continue
            if _is_mfalse(sp):
                return M_FALSE
            parts.extend(sp.parts if isinstance(sp, MAnd) else [sp])
        dedup = []
        for p in parts:
            if p not in dedup:
                dedup.append(p)
        return m_and(*dedup)
    if isinstance(c, MOr):
        parts = []
        for p in c.parts:
            sp = simplify(p)
            if isinstance(sp, MTrue):
                return M_TRUE
            if _is_mfalse(sp):
                continue
            parts.extend(sp.parts if isinstance(sp, MOr) else [sp])
        dedup = []
        for p in parts:
            if p not in dedup:
                dedup.append(p)
        return m_or(*dedup)
    raise ConditionError(f"not an M-condition: {c!r}")


def canonical_set_vars(c: MCondition) -> MCondition:
    """Rename bound set variables to a canonical S1, S2, ... in traversal order."""
    counter = itertools.count(1)

    def go(node, env):
        if isinstance(node, ExSet):
            new = f"S{next(counter)}"
            env2 = dict(env)
            env2[node.var] = new
            return ExSet(new, node.kind, go(node.body, env2))
        if isinstance(node, ExistsQ):
            def sub(g):
                if isinstance(g, CIn):
                    return CIn(g.item, env.get(g.var, g.var), g.kind)
                if isinstance(g, CNot):
                    return CNot(sub(g.body))
                if isinstance(g, CAnd):
                    return CAnd(tuple(sub(p) for p in g.parts))
                if isinstance(g, COr):
                    return COr(tuple(sub(p) for p in g.parts))
                return g
            return ExistsQ(node.morphism, sub(node.constraint), go(node.body, env))
        if isinstance(node, MNot):
            return MNot(go(node.body, env))
        if isinstance(node, MAnd):
            return MAnd(tuple(go(p, env) for p in node.parts))
        if isinstance(node, MOr):
            return MOr(tuple(go(p, env) for p in node.parts))
        return node

    return go(c, {})


def conditions_equal(a: MCondition, b: MCondition) -> bool:
    """Syntactic equality after normalization (simplify + canonical binders)."""
    return canonical_set_vars(simplify(a)) == canonical_set_vars(simplify(b))
