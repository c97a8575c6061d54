"""The verification-condition generator: shifting conditions over morphisms,
path decomposition, the right-to-left transformation with membership sets,
applicability and dangling conditions, and weakest liberal preconditions.
"""

from __future__ import annotations

import itertools

from .graphs import (BLANK_ALPHABET, EMPTY_GRAPH, Alphabet, Graph, Morphism,
                     enumerate_extensions, enumerate_shift_overlaps, fresh_name,
                     graph_to_data, path_exists, pushout, pushout_complement)
from .conditions import (C_FALSE, C_TRUE, CAnd, CIn, CNot, COr, CPath, CTrue,
                         Constraint, ConditionError, ExSet, ExistsQ, MAnd,
                         MCondition, MNot, MOr, MTrue, M_FALSE, M_TRUE,
                         c_and, c_or, ensure_distinct_quantifiers,
                         free_set_vars, implies, forall_q, m_and, m_not, m_or,
                         rename_condition, rename_constraint, simplify,
                         simplify_constraint, validate_condition)
from .rewrite import Rule, RewriteError


class TransformError(Exception):
    pass


# -- shifting conditions over morphisms (transformation A') -------------------


def _shift(p: Morphism, c: MCondition, prov: bool):
    if isinstance(c, MTrue):
        return c, ({"op": "true"} if prov else None)
    if isinstance(c, ExSet):
        body, sub = _shift(p, c.body, prov)
        return ExSet(c.var, c.kind, body), (
            {"op": "set", "var": c.var, "sort": c.kind, "child": sub} if prov else None)
    if isinstance(c, MNot):
        body, sub = _shift(p, c.body, prov)
        return MNot(body), ({"op": "not", "child": sub} if prov else None)
    if isinstance(c, MAnd):
        pairs = [_shift(p, part, prov) for part in c.parts]
        return m_and(*(x for x, _ in pairs)), (
            {"op": "and", "children": [s for _, s in pairs]} if prov else None)
    if isinstance(c, MOr):
        pairs = [_shift(p, part, prov) for part in c.parts]
        return m_or(*(x for x, _ in pairs)), (
            {"op": "or", "children": [s for _, s in pairs]} if prov else None)
    if isinstance(c, ExistsQ):
        disjuncts = []
        branches = []
        for overlap in enumerate_shift_overlaps(p, c.morphism):
            gamma = rename_constraint(c.constraint, overlap.right.mapping())
            body, sub = _shift(overlap.right, c.body, prov)
            disjuncts.append(ExistsQ(overlap.left, gamma, body))
            if prov:
                branches.append({"merged": [list(pair) for pair in overlap.merged],
                                 "overlap": graph_to_data(overlap.graph),
                                 "child": sub})
        return m_or(*disjuncts), (
            {"op": "shift-exists", "overlaps": branches} if prov else None)
    raise ConditionError(f"not an M-condition: {c!r}")


def shift(p: Morphism, c: MCondition) -> MCondition:
    """Shift an M-condition over an injective morphism: the resulting condition
    holds at q iff the original holds at q o p.  Set quantifiers pass through;
    each morphism-existential becomes a disjunction over all overlaps of its
    codomain with the codomain of p."""
    if not p.is_injective:
        raise TransformError("shift is defined for injective morphisms")
    out, _ = _shift(p, c, False)
    return simplify(out)


def to_right_condition(rule: Rule, c: MCondition) -> MCondition:
    """Transformation A: turn a closed constraint into an equivalent condition
    over the rule's right-hand side (a comatch satisfies it iff the derived
    graph satisfies the constraint)."""
    if free_set_vars(c):
        raise TransformError("A is defined for closed constraints")
    validate_condition(c, EMPTY_GRAPH)
    out, _ = _shift(Morphism(EMPTY_GRAPH, rule.right, {}, {}), c, False)
    return simplify(out)


# -- path decomposition (transformation LPath) --------------------------------


def lpath(rule: Rule, pred: CPath) -> Constraint:
    """Decompose a path predicate over R into a constraint over L that agrees
    with it across any direct derivation.

    Excluded-edge sets gain the edges the rule deletes; endpoints outside the
    interface are routed through interface nodes reachable in R, and
    connections the rule will create are covered by chains over the pairs of
    interface nodes newly connected in R.
    """
    left, inter, right = rule.left, rule.interface, rule.right
    for x in (pred.source, pred.target):
        if not right.has_node(x):
            raise TransformError(f"path endpoint {x!r} is not a node of R")
    for e in pred.excluded:
        if not right.has_edge(e):
            raise TransformError(f"excluded edge {e!r} is not an edge of R")

    deleted = set(left.edges) - set(inter.edges)
    e_minus = set(pred.excluded) | deleted
    exc_r = frozenset(e for e in e_minus if right.has_edge(e))
    exc_l = tuple(sorted(e for e in e_minus if left.has_edge(e)))
    vk = sorted(inter.nodes)

    def path_r(x, y):
        return path_exists(right, x, y, exc_r)

    def path_l(x, y):
        return path_exists(left, x, y, frozenset(exc_l))

    def decompose(v, w):
        if path_r(v, w):
            return C_TRUE
        v_in, w_in = inter.has_node(v), inter.has_node(w)
        if v_in and w_in:
            return CPath(v, w, exc_l)
        if not v_in and w_in:
            return c_or(*[CPath(x, w, exc_l) for x in vk if path_r(v, x)])
        if v_in and not w_in:
            return c_or(*[CPath(v, y, exc_l) for y in vk if path_r(y, w)])
        return c_or(*[CPath(x, y, exc_l)
                      for x in vk for y in vk if path_r(v, x) and path_r(y, w)])

    created_connections = [(x, y) for x in vk for y in vk
                           if path_r(x, y) and not path_l(x, y)]
    future = []
    for n in range(1, len(created_connections) + 1):
        for seq in itertools.permutations(created_connections, n):
            conj = [decompose(pred.source, seq[0][0])]
            conj += [CPath(seq[i][1], seq[i + 1][0], exc_l) for i in range(n - 1)]
            conj += [decompose(seq[-1][1], pred.target)]
            future.append(c_and(*conj))
    return simplify_constraint(c_or(decompose(pred.source, pred.target), *future))


# -- from conditions over R to conditions over L (transformation L) -----------


def _gamma_m(gamma: Constraint, interface: Graph, derived: Rule,
             membership: frozenset) -> Constraint:
    """Resolve membership literals of rule-created items against the
    membership set and decompose path predicates through the derived rule."""
    if isinstance(gamma, CTrue):
        return gamma
    if isinstance(gamma, CIn):
        if interface.has_item(gamma.item):
            return gamma
        return C_TRUE if (gamma.item, gamma.var) in membership else C_FALSE
    if isinstance(gamma, CPath):
        return lpath(derived, gamma)
    if isinstance(gamma, CNot):
        return CNot(_gamma_m(gamma.body, interface, derived, membership))
    if isinstance(gamma, CAnd):
        return CAnd(tuple(_gamma_m(p, interface, derived, membership)
                          for p in gamma.parts))
    if isinstance(gamma, COr):
        return COr(tuple(_gamma_m(p, interface, derived, membership)
                         for p in gamma.parts))
    raise ConditionError(f"not a constraint: {gamma!r}")


def _membership_subsets(items, var):
    pairs = [(x, var) for x in sorted(items)]
    for r in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, r):
            yield frozenset(combo)


def _derived_rule(rule: Rule, a: Morphism):
    """Build the derived rule for one morphism-existential: the pushout
    complement of (K -> R, a) followed by the pushout with K -> L.  Returns
    (derived rule, b: L -> Y) or None when no pushout complement exists."""
    poc = pushout_complement(rule.right_embedding, a)
    if poc is None:
        return None
    po = pushout(rule.left_embedding, poc.from_interface)
    b = po.from_prime
    if not b.is_inclusion:
        raise TransformError("internal: derived left context lost inclusion form")
    derived = Rule(rule.name + "*", po.object, poc.complement, a.codomain)
    return derived, b


def _avoid_rule_clashes(rule: Rule, c: ExistsQ) -> ExistsQ:
    """Rename codomain-local items of an existential so they cannot collide
    with the identifiers the rule's left-hand side will contribute."""
    cod = c.morphism.codomain
    context = c.morphism.domain
    taboo = (set(rule.left.items()) - set(rule.interface.items()))
    sub = {}
    taken = set(cod.items()) | set(rule.left.items()) | set(rule.right.items())
    for x in cod.items():
        if context.has_item(x) or x not in taboo:
            continue
        name = fresh_name(x, taken)
        sub[x] = name
        taken.add(name)
    if not sub:
        return c
    renamed = rename_condition(c, {}, context)  # no-op structure copy
    new_cod = cod.rename(sub)
    body = rename_condition(c.body, sub, cod)
    return ExistsQ(Morphism.inclusion(context, new_cod),
                   rename_constraint(c.constraint, sub), body)


def _lprime(rule: Rule, c: MCondition, membership: frozenset, prov: bool):
    if isinstance(c, MTrue):
        return c, ({"op": "true"} if prov else None)
    if isinstance(c, ExSet):
        created = rule.created_nodes() if c.kind == "V" else rule.created_edges()
        disjuncts = []
        branches = []
        for extra in _membership_subsets(created, c.var):
            body, sub = _lprime(rule, c.body, membership | extra, prov)
            disjuncts.append(body)
            if prov:
                branches.append({"membership": sorted([list(p) for p in extra]),
                                 "child": sub})
        return ExSet(c.var, c.kind, m_or(*disjuncts)), (
            {"op": "membership-subsets", "var": c.var, "sort": c.kind,
             "created": sorted(created), "disjuncts": branches} if prov else None)
    if isinstance(c, MNot):
        body, sub = _lprime(rule, c.body, membership, prov)
        return MNot(body), ({"op": "not", "child": sub} if prov else None)
    if isinstance(c, MAnd):
        pairs = [_lprime(rule, part, membership, prov) for part in c.parts]
        return m_and(*(x for x, _ in pairs)), (
            {"op": "and", "children": [s for _, s in pairs]} if prov else None)
    if isinstance(c, MOr):
        pairs = [_lprime(rule, part, membership, prov) for part in c.parts]
        return m_or(*(x for x, _ in pairs)), (
            {"op": "or", "children": [s for _, s in pairs]} if prov else None)
    if isinstance(c, ExistsQ):
        if not c.morphism.is_inclusion:
            raise TransformError("L expects inclusion morphisms in conditions")
        c = _avoid_rule_clashes(rule, c)
        built = _derived_rule(rule, c.morphism)
        if built is None:
            return M_FALSE, (
                {"op": "exists", "no_pushout_complement": True} if prov else None)
        derived, b = built
        gamma = _gamma_m(c.constraint, derived.interface, derived, membership)
        body, sub = _lprime(derived, c.body, membership, prov)
        return ExistsQ(b, gamma, body), (
            {"op": "exists", "no_pushout_complement": False,
             "left_context": graph_to_data(b.codomain),
             "child": sub} if prov else None)
    raise ConditionError(f"not an M-condition: {c!r}")


def to_left_condition(rule: Rule, c: MCondition) -> MCondition:
    """Transformation L: a condition over R becomes a condition over L that a
    match satisfies iff the comatch satisfies the original, for every direct
    derivation of the rule."""
    if free_set_vars(c):
        raise TransformError("L is defined for conditions with no free set variables")
    validate_condition(c, rule.right)
    c = ensure_distinct_quantifiers(c)
    out, _ = _lprime(rule, c, frozenset(), False)
    return simplify(out)


# -- applicability ------------------------------------------------------------


def _extensions_of_left(left: Graph, alphabet: Alphabet):
    """Left-hand-side extensions by a loop, an edge between distinct nodes, or
    a new node with one incident non-loop edge; canonical order."""
    out = []
    taken = set(left.items())
    e_name = fresh_name("x", taken)
    n_name = fresh_name("u", taken | {e_name})
    for v in left.nodes:
        for lab in sorted(alphabet.edge_labels):
            out.append(left.add([], [(e_name, v, v, lab)]))
    for v in left.nodes:
        for w in left.nodes:
            if v == w:
                continue
            for lab in sorted(alphabet.edge_labels):
                out.append(left.add([], [(e_name, v, w, lab)]))
    for v in left.nodes:
        for nlab in sorted(alphabet.node_labels):
            for elab in sorted(alphabet.edge_labels):
                out.append(left.add([(n_name, nlab)], [(e_name, v, n_name, elab)]))
                out.append(left.add([(n_name, nlab)], [(e_name, n_name, v, elab)]))
    return out


def _iso_fixing_left(left: Graph, e1: Graph, e2: Graph) -> bool:
    if len(e1.nodes) != len(e2.nodes) or len(e1.edges) != len(e2.edges):
        return False
    inc1 = Morphism.inclusion(left, e1)
    inc2 = Morphism.inclusion(left, e2)
    return any(m.is_isomorphism for m in enumerate_extensions(inc1, inc2))


def dang(rule: Rule, alphabet: Alphabet = BLANK_ALPHABET) -> MCondition:
    """The conjunction forbidding every single-item extension of L for which
    the interface has no pushout complement; true when the rule deletes no
    nodes."""
    conjuncts = []
    kept = []
    for ext in _extensions_of_left(rule.left, alphabet):
        a = Morphism.inclusion(rule.left, ext)
        if pushout_complement(rule.left_embedding, a) is not None:
            continue
        if any(_iso_fixing_left(rule.left, prev, ext) for prev in kept):
            continue
        kept.append(ext)
        conjuncts.append(MNot(ExistsQ(a, C_TRUE, M_TRUE)))
    return simplify(m_and(*conjuncts))


def applicability(rules, alphabet: Alphabet = BLANK_ALPHABET) -> MCondition:
    """App: an M-constraint satisfied by exactly the graphs some rule of the
    set is applicable to; false for the empty set."""
    parts = []
    for rule in sorted(rules, key=lambda r: r.name):
        body = m_and(dang(rule, alphabet), rule.ac_left,
                     to_left_condition(rule, rule.ac_right))
        parts.append(ExistsQ(Morphism(EMPTY_GRAPH, rule.left, {}, {}),
                             C_TRUE, body))
    return simplify(m_or(*parts))


# -- weakest liberal preconditions ---------------------------------------------


def precondition(rule: Rule, c: MCondition,
                 alphabet: Alphabet = BLANK_ALPHABET) -> MCondition:
    """Pre: every application of the rule from a graph satisfying the result
    yields a graph satisfying c."""
    if free_set_vars(c):
        raise TransformError("Pre is defined for closed constraints")
    guard = m_and(dang(rule, alphabet), rule.ac_left,
                  to_left_condition(rule, rule.ac_right))
    post_left = to_left_condition(rule, to_right_condition(rule, c))
    body = implies(guard, post_left)
    return simplify(forall_q(Morphism(EMPTY_GRAPH, rule.left, {}, {}),
                             C_TRUE, body))


def wlp(rule: Rule, c: MCondition,
        alphabet: Alphabet = BLANK_ALPHABET) -> MCondition:
    """The weakest liberal precondition: Pre(r, c) or the rule is inapplicable."""
    return simplify(m_or(precondition(rule, c, alphabet),
                         m_not(applicability([rule], alphabet))))


# -- provenance dumps ----------------------------------------------------------


def shift_provenance(p: Morphism, c: MCondition) -> dict:
    """Raw shift output with, per disjunct, the overlap graph and the merged
    identifier pairs that produced it."""
    _, prov = _shift(p, c, True)
    return prov


def left_provenance(rule: Rule, c: MCondition) -> dict:
    """Raw L' output with, per disjunct, the membership subset or derived
    left context that produced it."""
    c = ensure_distinct_quantifiers(c)
    _, prov = _lprime(rule, c, frozenset(), True)
    return prov
