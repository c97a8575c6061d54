"""Graph programs and their nondeterministic small-step semantics.

`run` explores the whole transition system of a configuration up to a step
budget, returning every proper result (deduplicated up to isomorphism),
whether failure is reachable, and whether the run can diverge, get stuck, or
exhausted its budget (the bottom flag).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import Graph, canonical_key_cached
from .rewrite import Rule, derive_all


class ProgramError(Exception):
    pass


class Program:
    __slots__ = ()


@dataclass(frozen=True)
class RuleCall(Program):
    rule: Rule


@dataclass(frozen=True)
class RuleSetCall(Program):
    rules: tuple

    def __post_init__(self):
        object.__setattr__(self, "rules",
                           tuple(sorted(self.rules, key=lambda r: r.name)))


@dataclass(frozen=True)
class Skip(Program):
    pass


@dataclass(frozen=True)
class Seq(Program):
    first: Program
    second: Program


@dataclass(frozen=True)
class Bang(Program):
    body: Program


@dataclass(frozen=True)
class IfElse(Program):
    guard: Program
    then: Program
    otherwise: Program


@dataclass(frozen=True)
class TryElse(Program):
    guard: Program
    then: Program
    otherwise: Program


SKIP = Skip()


def rules_of(p: Program):
    """The rule set of a rule or rule-set call, else None."""
    if isinstance(p, RuleCall):
        return (p.rule,)
    if isinstance(p, RuleSetCall):
        return p.rules
    return None


@dataclass(frozen=True)
class Running:
    """An unfinished configuration: a program paired with a graph."""
    program: Program
    graph: Graph


class _Fail:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FAIL"


FAIL = _Fail()


@dataclass(frozen=True)
class ResultSet:
    """The observable outcomes of running a program on a graph.

    graphs: one representative per isomorphism class of proper results;
    fail: a failing run exists; bottom: a run can diverge or get stuck, or
    the exploration ran out of budget.
    """
    graphs: tuple
    fail: bool
    bottom: bool

    def outcomes(self):
        out = [g for g in self.graphs]
        if self.fail:
            out.append(FAIL)
        return out


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, n: int):
        self.remaining = n

    def spend(self) -> bool:
        if self.remaining <= 0:
            return False
        self.remaining -= 1
        return True


@dataclass(frozen=True)
class _Rec:
    graphs: tuple       # representatives, pairwise non-isomorphic
    fail: bool
    bottom: bool        # divergence or stuckness detected
    truncated: bool     # budget ran out; outcomes may be missing


class _Engine:
    def __init__(self, budget: int):
        self.budget = _Budget(budget)
        self.memo: dict = {}

    # -- one-step successors -------------------------------------------------

    def step(self, cfg: Running):
        """Successor configurations of an unfinished configuration plus a flag
        for budget-truncated guard evaluation inside this step."""
        p, g = cfg.program, cfg.graph
        if isinstance(p, (RuleCall, RuleSetCall)):
            derivs = derive_all(rules_of(p), g)
            if not derivs:
                return [FAIL], False
            seen, succs = set(), []
            for d in derivs:
                key = canonical_key_cached(d.after)
                if key not in seen:
                    seen.add(key)
                    succs.append(d.after)
            return succs, False
        if isinstance(p, Skip):
            return [g], False
        if isinstance(p, Seq):
            inner, truncated = self.step(Running(p.first, g))
            succs = []
            for s in inner:
                if isinstance(s, Running):
                    succs.append(Running(Seq(s.program, p.second), s.graph))
                elif s is FAIL:
                    succs.append(FAIL)
                else:
                    succs.append(Running(p.second, s))
            return succs, truncated
        if isinstance(p, Bang):
            rec = self.run_rec(p.body, g)
            succs = [Running(p, h) for h in rec.graphs]
            if rec.fail:
                succs.append(g)
            return succs, rec.truncated
        if isinstance(p, IfElse):
            rec = self.run_rec(p.guard, g)
            succs = []
            if rec.graphs:
                succs.append(Running(p.then, g))
            if rec.fail:
                succs.append(Running(p.otherwise, g))
            return succs, rec.truncated
        if isinstance(p, TryElse):
            rec = self.run_rec(p.guard, g)
            succs = [Running(p.then, h) for h in rec.graphs]
            if rec.fail:
                succs.append(Running(p.otherwise, g))
            return succs, rec.truncated
        raise ProgramError(f"not a program: {p!r}")

    # -- exhaustive exploration -----------------------------------------------

    def run_rec(self, program: Program, graph: Graph) -> _Rec:
        key = (program, canonical_key_cached(graph))
        hit = self.memo.get(key)
        if hit is not None:
            return hit

        start = Running(program, graph)
        start_key = key
        visited = {start_key: start}
        edges: dict = {start_key: []}
        worklist = [start_key]
        result_keys: dict = {}
        fail = False
        bottom = False
        truncated = False

        while worklist:
            ckey = worklist.pop()
            cfg = visited[ckey]
            if not self.budget.spend():
                truncated = True
                break
            succs, trunc = self.step(cfg)
            truncated = truncated or trunc
            if not succs and not trunc:
                bottom = True  # terminal unfinished configuration: stuck
            for s in succs:
                if s is FAIL:
                    fail = True
                elif isinstance(s, Running):
                    skey = (s.program, canonical_key_cached(s.graph))
                    edges[ckey].append(skey)
                    if skey not in visited:
                        visited[skey] = s
                        edges[skey] = []
                        worklist.append(skey)
                else:
                    gkey = canonical_key_cached(s)
                    if gkey not in result_keys:
                        result_keys[gkey] = s
        if worklist:
            truncated = True

        if _has_cycle(edges):
            bottom = True  # an infinite run exists through the explored states

        rec = _Rec(tuple(result_keys.values()), fail, bottom, truncated)
        self.memo[key] = rec
        return rec


def _has_cycle(edges: dict) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {k: WHITE for k in edges}
    for root in edges:
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(edges[root]))]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for succ in it:
                if succ not in colour:
                    continue
                if colour[succ] == GREY:
                    return True
                if colour[succ] == WHITE:
                    colour[succ] = GREY
                    stack.append((succ, iter(edges[succ])))
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()
    return False


DEFAULT_STEP_BUDGET = 10_000


def step(cfg: Running, guard_budget: int = DEFAULT_STEP_BUDGET) -> list:
    """All one-step successors of an unfinished configuration.

    Premises of if/try/iteration are evaluated by a bounded recursive run.
    Calling this on a proper result or on fail is a contract violation.
    """
    if not isinstance(cfg, Running):
        raise ProgramError("step is only defined on unfinished configurations")
    succs, _ = _Engine(guard_budget).step(cfg)
    return succs


def run(program: Program, graph: Graph,
        step_budget: int = DEFAULT_STEP_BUDGET) -> ResultSet:
    """Exhaustively explore the transition system of (program, graph)."""
    if step_budget <= 0:
        raise ProgramError("step budget must be positive")
    rec = _Engine(step_budget).run_rec(program, graph)
    return ResultSet(rec.graphs, rec.fail, rec.bottom or rec.truncated)
