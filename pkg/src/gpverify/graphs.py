"""Finite labelled directed graphs, morphisms, and the categorical constructions
(pushouts, pushout complements, overlap enumeration) everything else is built on.

Graphs are immutable. Identifiers are opaque strings; all enumeration output is
returned in a canonical order (lexicographic on identifier names), so repeated
runs are bit-identical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

BLANK = "□"  # the blank label


class GraphError(Exception):
    """Malformed graph, morphism, or identifier lookup."""


@dataclass(frozen=True)
class Alphabet:
    """A fixed finite label alphabet: one namespace for nodes, one for edges."""

    node_labels: frozenset
    edge_labels: frozenset

    def check_node_label(self, label: str) -> None:
        if label not in self.node_labels:
            raise GraphError(f"unknown node label {label!r}")

    def check_edge_label(self, label: str) -> None:
        if label not in self.edge_labels:
            raise GraphError(f"unknown edge label {label!r}")


BLANK_ALPHABET = Alphabet(frozenset({BLANK}), frozenset({BLANK}))


def fresh_name(base: str, taken) -> str:
    """Smallest `base` or `base~k` not in `taken`; deterministic."""
    if base not in taken:
        return base
    k = 1
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


class Graph:
    """A finite labelled directed graph.

    `nodes` is an iterable of ids or (id, label) pairs, `edges` an iterable of
    (id, source, target) or (id, source, target, label) tuples. Labels default
    to the blank label. Node and edge identifier sets must be disjoint.
    """

    __slots__ = ("nodes", "edges", "_node_label", "_edge_label", "_source",
                 "_target", "_out", "_in", "_key", "_hash")

    def __init__(self, nodes: Iterable = (), edges: Iterable = ()):
        node_label = {}
        for n in nodes:
            if isinstance(n, str):
                name, label = n, BLANK
            else:
                name, label = n
            if name in node_label:
                raise GraphError(f"duplicate node id {name!r}")
            node_label[name] = label
        source, target, edge_label = {}, {}, {}
        for e in edges:
            if len(e) == 3:
                (name, src, tgt), label = e, BLANK
            else:
                name, src, tgt, label = e
            if name in edge_label or name in node_label:
                raise GraphError(f"duplicate identifier {name!r}")
            if src not in node_label or tgt not in node_label:
                raise GraphError(f"edge {name!r} has unknown endpoint")
            source[name], target[name], edge_label[name] = src, tgt, label
        self.nodes = tuple(sorted(node_label))
        self.edges = tuple(sorted(edge_label))
        self._node_label = node_label
        self._edge_label = edge_label
        self._source = source
        self._target = target
        out = {n: [] for n in self.nodes}
        inc = {n: [] for n in self.nodes}
        for e in self.edges:
            out[source[e]].append(e)
            inc[target[e]].append(e)
        self._out = {n: tuple(v) for n, v in out.items()}
        self._in = {n: tuple(v) for n, v in inc.items()}
        self._key = (
            tuple((n, node_label[n]) for n in self.nodes),
            tuple((e, source[e], target[e], edge_label[e]) for e in self.edges),
        )
        self._hash = hash(self._key)

    # -- basic queries ------------------------------------------------------

    def node_label(self, n: str) -> str:
        try:
            return self._node_label[n]
        except KeyError:
            raise GraphError(f"unknown node {n!r}") from None

    def edge_label(self, e: str) -> str:
        try:
            return self._edge_label[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def source(self, e: str) -> str:
        try:
            return self._source[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def target(self, e: str) -> str:
        try:
            return self._target[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def has_node(self, n) -> bool:
        return n in self._node_label

    def has_edge(self, e) -> bool:
        return e in self._edge_label

    def has_item(self, x) -> bool:
        return x in self._node_label or x in self._edge_label

    def items(self) -> tuple:
        return self.nodes + self.edges

    def out_edges(self, n: str) -> tuple:
        return self._out[n]

    def in_edges(self, n: str) -> tuple:
        return self._in[n]

    def is_empty(self) -> bool:
        return not self.nodes

    def __eq__(self, other):
        return isinstance(other, Graph) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        ns = ", ".join(n if self._node_label[n] == BLANK else f"{n}:{self._node_label[n]}"
                       for n in self.nodes)
        es = ", ".join(f"{e}:{self._source[e]}->{self._target[e]}" for e in self.edges)
        return f"Graph({{{ns}}}, {{{es}}})"

    # -- derived graphs -----------------------------------------------------

    def node_entries(self):
        return [(n, self._node_label[n]) for n in self.nodes]

    def edge_entries(self):
        return [(e, self._source[e], self._target[e], self._edge_label[e])
                for e in self.edges]

    def rename(self, mapping: Mapping[str, str]) -> "Graph":
        m = lambda x: mapping.get(x, x)
        return Graph(
            [(m(n), l) for n, l in self.node_entries()],
            [(m(e), m(s), m(t), l) for e, s, t, l in self.edge_entries()],
        )

    def without(self, nodes=(), edges=()) -> "Graph":
        drop_n, drop_e = set(nodes), set(edges)
        return Graph(
            [(n, l) for n, l in self.node_entries() if n not in drop_n],
            [(e, s, t, l) for e, s, t, l in self.edge_entries()
             if e not in drop_e and s not in drop_n and t not in drop_n],
        )

    def add(self, nodes=(), edges=()) -> "Graph":
        return Graph(self.node_entries() + list(nodes),
                     self.edge_entries() + list(edges))

    def is_subgraph_of(self, other: "Graph") -> bool:
        """Identifier-wise inclusion: same items with same labels and endpoints."""
        for n, l in self.node_entries():
            if not other.has_node(n) or other.node_label(n) != l:
                return False
        for e, s, t, l in self.edge_entries():
            if not other.has_edge(e):
                return False
            if (other.source(e), other.target(e), other.edge_label(e)) != (s, t, l):
                return False
        return True

    def check_labels(self, alphabet: Alphabet) -> None:
        for _, l in self.node_entries():
            alphabet.check_node_label(l)
        for *_, l in self.edge_entries():
            alphabet.check_edge_label(l)


EMPTY_GRAPH = Graph()


class Morphism:
    """A structure- and label-preserving mapping between graphs.

    `node_map` / `edge_map` are total on the domain; preservation of sources,
    targets and both labellings is checked at construction.
    """

    __slots__ = ("domain", "codomain", "node_map", "edge_map", "_key", "_hash")

    def __init__(self, domain: Graph, codomain: Graph,
                 node_map: Mapping[str, str], edge_map: Mapping[str, str]):
        node_map = dict(node_map)
        edge_map = dict(edge_map)
        for n in domain.nodes:
            img = node_map.get(n)
            if img is None or not codomain.has_node(img):
                raise GraphError(f"node map not total at {n!r}")
            if codomain.node_label(img) != domain.node_label(n):
                raise GraphError(f"label not preserved at node {n!r}")
        for e in domain.edges:
            img = edge_map.get(e)
            if img is None or not codomain.has_edge(img):
                raise GraphError(f"edge map not total at {e!r}")
            if codomain.source(img) != node_map[domain.source(e)]:
                raise GraphError(f"source not preserved at edge {e!r}")
            if codomain.target(img) != node_map[domain.target(e)]:
                raise GraphError(f"target not preserved at edge {e!r}")
            if codomain.edge_label(img) != domain.edge_label(e):
                raise GraphError(f"label not preserved at edge {e!r}")
        if set(node_map) != set(domain.nodes) or set(edge_map) != set(domain.edges):
            raise GraphError("mapping defined outside the domain")
        self.domain = domain
        self.codomain = codomain
        self.node_map = node_map
        self.edge_map = edge_map
        self._key = (domain._key, codomain._key,
                     tuple(sorted(node_map.items())), tuple(sorted(edge_map.items())))
        self._hash = hash(self._key)

    def node(self, n: str) -> str:
        return self.node_map[n]

    def edge(self, e: str) -> str:
        return self.edge_map[e]

    def __call__(self, x: str) -> str:
        if x in self.node_map:
            return self.node_map[x]
        if x in self.edge_map:
            return self.edge_map[x]
        raise GraphError(f"{x!r} not in the domain")

    def mapping(self) -> dict:
        m = dict(self.node_map)
        m.update(self.edge_map)
        return m

    @property
    def is_injective(self) -> bool:
        return (len(set(self.node_map.values())) == len(self.node_map)
                and len(set(self.edge_map.values())) == len(self.edge_map))

    @property
    def is_surjective(self) -> bool:
        return (set(self.node_map.values()) == set(self.codomain.nodes)
                and set(self.edge_map.values()) == set(self.codomain.edges))

    @property
    def is_inclusion(self) -> bool:
        return (all(k == v for k, v in self.node_map.items())
                and all(k == v for k, v in self.edge_map.items()))

    @property
    def is_isomorphism(self) -> bool:
        return self.is_injective and self.is_surjective

    def then(self, other: "Morphism") -> "Morphism":
        """Composition self;other (apply self first)."""
        if self.codomain != other.domain:
            raise GraphError("morphisms not composable")
        return Morphism(self.domain, other.codomain,
                        {n: other.node_map[v] for n, v in self.node_map.items()},
                        {e: other.edge_map[v] for e, v in self.edge_map.items()})

    @staticmethod
    def identity(g: Graph) -> "Morphism":
        return Morphism(g, g, {n: n for n in g.nodes}, {e: e for e in g.edges})

    @staticmethod
    def inclusion(sub: Graph, sup: Graph) -> "Morphism":
        if not sub.is_subgraph_of(sup):
            raise GraphError("not a subgraph; cannot form inclusion")
        return Morphism(sub, sup, {n: n for n in sub.nodes}, {e: e for e in sub.edges})

    def __eq__(self, other):
        return isinstance(other, Morphism) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        m = {**self.node_map, **self.edge_map}
        return "Morphism{" + ", ".join(f"{k}->{v}" for k, v in sorted(m.items())) + "}"


# -- reachability ----------------------------------------------------------


def path_exists(g: Graph, v: str, w: str, excluded=frozenset()) -> bool:
    """The directed path predicate: is w reachable from v avoiding `excluded`
    edges?  The empty path witnesses v = w."""
    if not g.has_node(v) or not g.has_node(w):
        raise GraphError("path endpoints must be nodes of the graph")
    excluded = frozenset(excluded)
    for e in excluded:
        if not g.has_edge(e):
            raise GraphError(f"excluded edge {e!r} not in graph")
    if v == w:
        return True
    seen = {v}
    stack = [v]
    while stack:
        n = stack.pop()
        for e in g.out_edges(n):
            if e in excluded:
                continue
            t = g.target(e)
            if t == w:
                return True
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False


# -- injective morphism enumeration ----------------------------------------


def _injective_extensions(pattern: Graph, host: Graph,
                          pre_nodes: dict, pre_edges: dict) -> list:
    """All injective morphisms pattern -> host extending the given partial
    assignment, in canonical order."""
    nodes_todo = [n for n in pattern.nodes if n not in pre_nodes]
    used_nodes = set(pre_nodes.values())
    if len(used_nodes) != len(pre_nodes):
        return []
    nmap = dict(pre_nodes)
    results = []

    def edge_candidates(e, nm):
        s, t = nm[pattern.source(e)], nm[pattern.target(e)]
        lab = pattern.edge_label(e)
        return [h for h in host.out_edges(s)
                if host.target(h) == t and host.edge_label(h) == lab]

    def assign_edges():
        edges_todo = [e for e in pattern.edges if e not in pre_edges]
        emap = dict(pre_edges)
        if len(set(emap.values())) != len(emap):
            return
        for e in emap:
            if host.edge_label(emap[e]) != pattern.edge_label(e) or \
               host.source(emap[e]) != nmap[pattern.source(e)] or \
               host.target(emap[e]) != nmap[pattern.target(e)]:
                return
        used = set(emap.values())

        def rec_e(i):
            if i == len(edges_todo):
                results.append(Morphism(pattern, host, dict(nmap), dict(emap)))
                return
            e = edges_todo[i]
            for h in edge_candidates(e, nmap):
                if h in used:
                    continue
                emap[e] = h
                used.add(h)
                rec_e(i + 1)
                used.remove(h)
                del emap[e]

        rec_e(0)

    def rec_n(i):
        if i == len(nodes_todo):
            # quick multiplicity check per node pair before edge assignment
            assign_edges()
            return
        n = nodes_todo[i]
        lab = pattern.node_label(n)
        for h in host.nodes:
            if h in used_nodes or host.node_label(h) != lab:
                continue
            nmap[n] = h
            used_nodes.add(h)
            rec_n(i + 1)
            used_nodes.remove(h)
            del nmap[n]

    for n, h in pre_nodes.items():
        if not host.has_node(h) or host.node_label(h) != pattern.node_label(n):
            return []
    rec_n(0)
    results.sort(key=lambda m: (tuple(sorted(m.node_map.items())),
                                tuple(sorted(m.edge_map.items()))))
    return results


def enumerate_injective_morphisms(pattern: Graph, host: Graph) -> list:
    """Every injective morphism pattern -> host, exactly once, canonical order."""
    return _injective_extensions(pattern, host, {}, {})


def enumerate_extensions(a: Morphism, q: Morphism) -> list:
    """All injective q': codomain(a) -> codomain(q) with q' o a = q.

    a and q share the domain; used to evaluate morphism-existentials.
    """
    if a.domain != q.domain:
        raise GraphError("extension base mismatch")
    pre_nodes, pre_edges = {}, {}
    for n in a.domain.nodes:
        img = a.node_map[n]
        prev = pre_nodes.get(img)
        if prev is not None and prev != q.node_map[n]:
            return []
        pre_nodes[img] = q.node_map[n]
    for e in a.domain.edges:
        img = a.edge_map[e]
        prev = pre_edges.get(img)
        if prev is not None and prev != q.edge_map[e]:
            return []
        pre_edges[img] = q.edge_map[e]
    return _injective_extensions(a.codomain, q.codomain, pre_nodes, pre_edges)


def is_isomorphic(g: Graph, h: Graph) -> Optional[Morphism]:
    """An isomorphism witness g -> h, or None.  Exhaustive search with cheap
    invariant pruning; meant for desk-scale graphs."""
    if len(g.nodes) != len(h.nodes) or len(g.edges) != len(h.edges):
        return None
    if sorted(g._node_label.values()) != sorted(h._node_label.values()):
        return None
    if sorted(g._edge_label.values()) != sorted(h._edge_label.values()):
        return None
    sig = lambda gr, n: (len(gr.out_edges(n)), len(gr.in_edges(n)), gr.node_label(n))
    if sorted(sig(g, n) for n in g.nodes) != sorted(sig(h, n) for n in h.nodes):
        return None
    for m in _injective_extensions(g, h, {}, {}):
        return m  # injective + equal counts => bijective
    return None


def canonical_key(g: Graph):
    """A hashable key identical for isomorphic graphs (brute-force minimum
    over node orderings; desk scale only)."""
    n = len(g.nodes)
    best = None
    labels = [g.node_label(x) for x in g.nodes]
    edges = [(g.nodes.index(g.source(e)), g.nodes.index(g.target(e)), g.edge_label(e))
             for e in g.edges]
    for perm in itertools.permutations(range(n)):
        key = (tuple(sorted(zip(perm, labels))),
               tuple(sorted((perm[s], perm[t], l) for s, t, l in edges)))
        if best is None or key < best:
            best = key
    return (n, best)


_canon_cache: dict = {}


def canonical_key_cached(g: Graph):
    k = _canon_cache.get(g)
    if k is None:
        k = canonical_key(g)
        _canon_cache[g] = k
    return k


# -- pushouts and complements ----------------------------------------------


class Pushout(NamedTuple):
    object: Graph
    from_prime: Morphism   # P' -> C'
    from_other: Morphism   # C  -> C' (an inclusion)


def pushout(p: Morphism, a: Morphism) -> Pushout:
    """Glue codomain(p) and codomain(a) along their common domain.

    Keeps the identifiers of codomain(a); items of codomain(p) outside the
    image of p are copied in, renamed deterministically on clash.
    """
    if p.domain != a.domain:
        raise GraphError("pushout legs must share their domain")
    if not p.is_injective or not a.is_injective:
        raise GraphError("pushout of non-injective morphisms is unsupported")
    pprime, c = p.codomain, a.codomain
    p_inv_nodes = {v: k for k, v in p.node_map.items()}
    p_inv_edges = {v: k for k, v in p.edge_map.items()}
    taken = set(c.items())
    nmap = {}   # P' node -> C' node
    new_nodes = []
    for x in pprime.nodes:
        if x in p_inv_nodes:
            nmap[x] = a.node_map[p_inv_nodes[x]]
        else:
            name = fresh_name(x, taken)
            taken.add(name)
            nmap[x] = name
            new_nodes.append((name, pprime.node_label(x)))
    emap = {}
    new_edges = []
    for x in pprime.edges:
        if x in p_inv_edges:
            emap[x] = a.edge_map[p_inv_edges[x]]
        else:
            name = fresh_name(x, taken)
            taken.add(name)
            emap[x] = name
            new_edges.append((name, nmap[pprime.source(x)],
                              nmap[pprime.target(x)], pprime.edge_label(x)))
    obj = c.add(new_nodes, new_edges)
    return Pushout(obj, Morphism(pprime, obj, nmap, emap), Morphism.inclusion(c, obj))


class PushoutComplement(NamedTuple):
    complement: Graph
    from_interface: Morphism  # K -> D
    to_whole: Morphism        # D -> G (an inclusion)


def pushout_complement(k: Morphism, g: Morphism) -> Optional[PushoutComplement]:
    """The pushout complement of K -k-> L -g-> G, present iff the dangling
    condition holds: no node in g(L)\\g(K) is incident to an edge in G\\g(L)."""
    if not k.is_injective or not g.is_injective:
        raise GraphError("pushout complement needs injective morphisms")
    if k.codomain != g.domain:
        raise GraphError("morphisms not composable")
    left, whole = g.domain, g.codomain
    kept_nodes = {g.node_map[k.node_map[x]] for x in k.domain.nodes}
    kept_edges = {g.edge_map[k.edge_map[x]] for x in k.domain.edges}
    del_nodes = {g.node_map[x] for x in left.nodes} - kept_nodes
    del_edges = {g.edge_map[x] for x in left.edges} - kept_edges
    image_edges = set(g.edge_map.values())
    for n in del_nodes:
        for e in itertools.chain(whole.out_edges(n), whole.in_edges(n)):
            if e not in image_edges:
                return None  # dangling edge
    d = whole.without(del_nodes, del_edges)
    k_to_d = Morphism(k.domain, d,
                      {x: g.node_map[k.node_map[x]] for x in k.domain.nodes},
                      {x: g.edge_map[k.edge_map[x]] for x in k.domain.edges})
    return PushoutComplement(d, k_to_d, Morphism.inclusion(d, whole))


def dangling_condition_holds(k: Morphism, g: Morphism) -> bool:
    """Direct predicate form of the dangling condition (independent of the
    constructive check in pushout_complement)."""
    left, whole = g.domain, g.codomain
    kept = {g.node_map[k.node_map[x]] for x in k.domain.nodes}
    deleted = {g.node_map[x] for x in left.nodes} - kept
    image_edges = set(g.edge_map.values())
    return all(e in image_edges
               for n in deleted
               for e in itertools.chain(whole.out_edges(n), whole.in_edges(n)))


def is_pushout_square(p: Morphism, a: Morphism, b: Morphism, q: Morphism) -> bool:
    """Does the square (p: P->P', a: P->C, b: P'->X, q: C->X) commute and have
    the universal property?  Checked by comparing with the constructed pushout."""
    if b.domain != p.codomain or q.domain != a.codomain or b.codomain != q.codomain:
        return False
    for n in p.domain.nodes:
        if b.node_map[p.node_map[n]] != q.node_map[a.node_map[n]]:
            return False
    for e in p.domain.edges:
        if b.edge_map[p.edge_map[e]] != q.edge_map[a.edge_map[e]]:
            return False
    built = pushout(p, a)
    # the mediating morphism built.object -> X is forced; check it is an iso
    nmap, emap = {}, {}
    for x in p.codomain.nodes:
        nmap[built.from_prime.node_map[x]] = b.node_map[x]
    for x in a.codomain.nodes:
        prev = nmap.get(built.from_other.node_map[x])
        if prev is not None and prev != q.node_map[x]:
            return False
        nmap[built.from_other.node_map[x]] = q.node_map[x]
    for x in p.codomain.edges:
        emap[built.from_prime.edge_map[x]] = b.edge_map[x]
    for x in a.codomain.edges:
        prev = emap.get(built.from_other.edge_map[x])
        if prev is not None and prev != q.edge_map[x]:
            return False
        emap[built.from_other.edge_map[x]] = q.edge_map[x]
    try:
        u = Morphism(built.object, b.codomain, nmap, emap)
    except GraphError:
        return False
    return u.is_isomorphism


# -- overlap enumeration (for shifting conditions) ---------------------------


class Overlap(NamedTuple):
    graph: Graph
    left: Morphism    # P' -> E (an inclusion)
    right: Morphism   # C  -> E
    merged: tuple     # ((P' item, C item), ...) identified pairs


def enumerate_shift_overlaps(p: Morphism, a: Morphism) -> list:
    """Every way of overlapping codomain(p) with codomain(a) compatibly with
    their common domain.

    Equivalent to the set of surjective quotients of the pushout of (p, a)
    whose restrictions to both codomains stay injective: enumerate partial
    injective, label-preserving correspondences between the items private to
    P' and those private to C (never identifying two items of the same part).
    Returned in canonical order; the disjoint overlap comes first.
    """
    if p.domain != a.domain:
        raise GraphError("overlap legs must share their domain")
    if not p.is_injective or not a.is_injective:
        raise GraphError("overlaps need injective morphisms")
    pprime, c = p.codomain, a.codomain
    p_inv_nodes = {v: k for k, v in p.node_map.items()}
    p_inv_edges = {v: k for k, v in p.edge_map.items()}
    a_img_nodes = {v: k for k, v in a.node_map.items()}
    a_img_edges = {v: k for k, v in a.edge_map.items()}

    pn = [x for x in pprime.nodes if x not in p_inv_nodes]
    cn = [y for y in c.nodes if y not in a_img_nodes]
    pe = [x for x in pprime.edges if x not in p_inv_edges]
    ce = [y for y in c.edges if y not in a_img_edges]

    def node_token_p(x, corr):
        if x in p_inv_nodes:
            return ("shared", p_inv_nodes[x])
        if x in corr:
            return ("merged", x)
        return ("p", x)

    def node_token_c(y, corr_inv):
        if y in a_img_nodes:
            return ("shared", a_img_nodes[y])
        if y in corr_inv:
            return ("merged", corr_inv[y])
        return ("c", y)

    node_corrs = []

    def rec_nodes(i, corr, used):
        if i == len(pn):
            node_corrs.append(dict(corr))
            return
        x = pn[i]
        rec_nodes(i + 1, corr, used)  # x stays unmatched
        for y in cn:
            if y in used or c.node_label(y) != pprime.node_label(x):
                continue
            corr[x] = y
            used.add(y)
            rec_nodes(i + 1, corr, used)
            used.remove(y)
            del corr[x]

    rec_nodes(0, {}, set())

    overlaps = []
    for ncorr in node_corrs:
        ncorr_inv = {v: k for k, v in ncorr.items()}

        def compatible(x, y):
            return (pprime.edge_label(x) == c.edge_label(y)
                    and node_token_p(pprime.source(x), ncorr)
                    == node_token_c(c.source(y), ncorr_inv)
                    and node_token_p(pprime.target(x), ncorr)
                    == node_token_c(c.target(y), ncorr_inv))

        def rec_edges(i, ecorr, used):
            if i == len(pe):
                overlaps.append((ncorr, dict(ecorr)))
                return
            x = pe[i]
            rec_edges(i + 1, ecorr, used)
            for y in ce:
                if y in used or not compatible(x, y):
                    continue
                ecorr[x] = y
                used.add(y)
                rec_edges(i + 1, ecorr, used)
                used.remove(y)
                del ecorr[x]

        rec_edges(0, {}, set())

    def build(ncorr, ecorr):
        merged_c = set(ncorr.values()) | set(ecorr.values())
        taken = set(pprime.items())
        cmap_nodes = {}
        extra_nodes = []
        for y in c.nodes:
            if y in a_img_nodes:
                cmap_nodes[y] = p.node_map[a_img_nodes[y]]
            elif y in merged_c:
                cmap_nodes[y] = {v: k for k, v in ncorr.items()}[y]
            else:
                name = fresh_name(y, taken)
                taken.add(name)
                cmap_nodes[y] = name
                extra_nodes.append((name, c.node_label(y)))
        cmap_edges = {}
        extra_edges = []
        for y in c.edges:
            if y in a_img_edges:
                cmap_edges[y] = p.edge_map[a_img_edges[y]]
            elif y in merged_c:
                cmap_edges[y] = {v: k for k, v in ecorr.items()}[y]
            else:
                name = fresh_name(y, taken)
                taken.add(name)
                cmap_edges[y] = name
                extra_edges.append((name, cmap_nodes[c.source(y)],
                                    cmap_nodes[c.target(y)], c.edge_label(y)))
        e_graph = pprime.add(extra_nodes, extra_edges)
        b = Morphism.inclusion(pprime, e_graph)
        s = Morphism(c, e_graph, cmap_nodes, cmap_edges)
        merged = tuple(sorted([(x, y) for x, y in ncorr.items()]
                              + [(x, y) for x, y in ecorr.items()]))
        return Overlap(e_graph, b, s, merged)

    built = [build(nc, ec) for nc, ec in overlaps]
    built.sort(key=lambda o: (len(o.merged), o.merged))
    return built


# -- serialization -----------------------------------------------------------


def graph_to_data(g: Graph) -> dict:
    return {
        "nodes": [{"id": n, "label": l} for n, l in g.node_entries()],
        "edges": [{"id": e, "source": s, "target": t, "label": l}
                  for e, s, t, l in g.edge_entries()],
    }


def graph_from_data(data: Mapping) -> Graph:
    return Graph([(n["id"], n.get("label", BLANK)) for n in data.get("nodes", [])],
                 [(e["id"], e["source"], e["target"], e.get("label", BLANK))
                  for e in data.get("edges", [])])


def graph_to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for n, l in g.node_entries():
        label = n if l == BLANK else f"{n}:{l}"
        lines.append(f'  "{n}" [label="{label}"];')
    for e, s, t, l in g.edge_entries():
        label = e if l == BLANK else f"{e}:{l}"
        lines.append(f'  "{s}" -> "{t}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
