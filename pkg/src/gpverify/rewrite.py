"""Rules with application conditions and direct derivations by double pushout."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graphs import (Graph, GraphError, Morphism, dangling_condition_holds,
                     enumerate_injective_morphisms, fresh_name)
from .conditions import (EMPTY_INTERP, ConditionError, MCondition, M_TRUE,
                         free_set_vars, satisfies, validate_condition)


class RewriteError(Exception):
    pass


class DanglingViolation(RewriteError):
    """The match deletes a node that still has edges outside the match image."""


class ApplicationConditionViolation(RewriteError):
    """ac_L fails at the match or ac_R fails at the comatch."""

    def __init__(self, side: str, message: str = ""):
        self.side = side
        super().__init__(message or f"application condition ac_{side} violated")


@dataclass(frozen=True)
class Rule:
    """A plain span L <- K -> R (both legs inclusions) plus an application
    condition <ac_left, ac_right> over L and R.

    Identifiers shared by L and R must be exactly the interface items; the
    precondition transformations rely on that convention.
    """

    name: str
    left: Graph
    interface: Graph
    right: Graph
    ac_left: MCondition = M_TRUE
    ac_right: MCondition = M_TRUE

    def __post_init__(self):
        if not self.interface.is_subgraph_of(self.left):
            raise RewriteError(f"rule {self.name}: interface is not included in L")
        if not self.interface.is_subgraph_of(self.right):
            raise RewriteError(f"rule {self.name}: interface is not included in R")
        shared = set(self.left.items()) & set(self.right.items())
        if shared != set(self.interface.items()):
            raise RewriteError(
                f"rule {self.name}: identifiers shared by L and R must be "
                f"exactly the interface items")
        validate_condition(self.ac_left, self.left)
        validate_condition(self.ac_right, self.right)
        if free_set_vars(self.ac_left) or free_set_vars(self.ac_right):
            raise RewriteError(f"rule {self.name}: application conditions must "
                               f"have no free set variables")

    @property
    def left_embedding(self) -> Morphism:
        return Morphism.inclusion(self.interface, self.left)

    @property
    def right_embedding(self) -> Morphism:
        return Morphism.inclusion(self.interface, self.right)

    def deleted_nodes(self) -> tuple:
        k = set(self.interface.nodes)
        return tuple(n for n in self.left.nodes if n not in k)

    def deleted_edges(self) -> tuple:
        k = set(self.interface.edges)
        return tuple(e for e in self.left.edges if e not in k)

    def created_nodes(self) -> tuple:
        k = set(self.interface.nodes)
        return tuple(n for n in self.right.nodes if n not in k)

    def created_edges(self) -> tuple:
        k = set(self.interface.edges)
        return tuple(e for e in self.right.edges if e not in k)


def plain_rule(name: str, left: Graph, right: Graph,
               interface: Optional[Graph] = None,
               ac_left: MCondition = M_TRUE,
               ac_right: MCondition = M_TRUE) -> Rule:
    """Build a rule from L => R; an omitted interface is the common nodes of
    L and R with no edges (shared edge identifiers are rejected)."""
    if interface is None:
        common = [n for n in left.nodes if right.has_node(n)]
        for n in common:
            if left.node_label(n) != right.node_label(n):
                raise RewriteError(f"rule {name}: node {n!r} relabelled across the rule")
        shared_edges = set(left.edges) & set(right.edges)
        if shared_edges:
            raise RewriteError(f"rule {name}: shared edges {sorted(shared_edges)} "
                               f"need an explicit interface")
        interface = Graph([(n, left.node_label(n)) for n in common])
    return Rule(name, left, interface, right, ac_left, ac_right)


@dataclass(frozen=True)
class Derivation:
    """A direct derivation G => H with its match, comatch, and both pushout
    squares' morphisms."""

    rule: Rule
    before: Graph
    match: Morphism        # L -> G
    intermediate: Graph    # D
    after: Graph           # H
    comatch: Morphism      # R -> H
    interface_to_intermediate: Morphism = field(compare=False)   # K -> D
    intermediate_in_before: Morphism = field(compare=False)      # D -> G
    intermediate_in_after: Morphism = field(compare=False)       # D -> H


def match_is_dangling_safe(rule: Rule, g: Morphism) -> bool:
    return dangling_condition_holds(rule.left_embedding, g)


def find_matches(rule: Rule, host: Graph) -> list:
    """All injective matches of the left-hand side passing the dangling
    condition and ac_left, in canonical order."""
    out = []
    for g in enumerate_injective_morphisms(rule.left, host):
        if not match_is_dangling_safe(rule, g):
            continue
        if not satisfies(g, rule.ac_left, EMPTY_INTERP):
            continue
        out.append(g)
    return out


def apply_rule(rule: Rule, host: Graph, match: Morphism) -> Derivation:
    """One DPO step: delete the match image of L\\K, then add R\\K disjointly.

    Created items keep their R-identifiers, suffixed deterministically when
    they would collide with surviving identifiers of the host.
    """
    if match.domain != rule.left or match.codomain != host:
        raise RewriteError("match does not fit the rule and host")
    if not match.is_injective:
        raise RewriteError("matches must be injective")
    if not match_is_dangling_safe(rule, match):
        raise DanglingViolation(f"match of {rule.name} violates the dangling condition")
    if not satisfies(match, rule.ac_left, EMPTY_INTERP):
        raise ApplicationConditionViolation("L")

    k_items_n = set(rule.interface.nodes)
    k_items_e = set(rule.interface.edges)
    del_nodes = {match.node_map[n] for n in rule.left.nodes if n not in k_items_n}
    del_edges = {match.edge_map[e] for e in rule.left.edges if e not in k_items_e}
    inter = host.without(del_nodes, del_edges)

    taken = set(inter.items())
    comatch_nodes = {n: match.node_map[n] for n in rule.interface.nodes}
    comatch_edges = {e: match.edge_map[e] for e in rule.interface.edges}
    new_nodes = []
    for n in rule.created_nodes():
        name = fresh_name(n, taken)
        taken.add(name)
        comatch_nodes[n] = name
        new_nodes.append((name, rule.right.node_label(n)))
    new_edges = []
    for e in rule.created_edges():
        name = fresh_name(e, taken)
        taken.add(name)
        comatch_edges[e] = name
        # endpoints in K map through the match, created endpoints to fresh copies
        s = comatch_nodes[rule.right.source(e)]
        t = comatch_nodes[rule.right.target(e)]
        new_edges.append((name, s, t, rule.right.edge_label(e)))
    result = inter.add(new_nodes, new_edges)

    comatch = Morphism(rule.right, result, comatch_nodes, comatch_edges)
    if not satisfies(comatch, rule.ac_right, EMPTY_INTERP):
        raise ApplicationConditionViolation("R")

    k_to_d = Morphism(rule.interface, inter,
                      {n: match.node_map[n] for n in rule.interface.nodes},
                      {e: match.edge_map[e] for e in rule.interface.edges})
    return Derivation(rule, host, match, inter, result, comatch,
                      k_to_d, Morphism.inclusion(inter, host),
                      Morphism.inclusion(inter, result))


def derive_all(rules, host: Graph) -> list:
    """All direct derivations of any rule in the set; matches whose comatch
    fails ac_right yield no derivation."""
    out = []
    for rule in sorted(rules, key=lambda r: r.name):
        for g in find_matches(rule, host):
            try:
                out.append(apply_rule(rule, host, g))
            except ApplicationConditionViolation:
                continue
    return out
