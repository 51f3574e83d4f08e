"""Deduction engine for the k-additivity-on-squares functional equation.

Pipeline: generate the equation system up to a bound, propagate (constant
folding, single-symbol linear solving, targeted multiplicative derivation
past the bound), and when stuck, derive a univariate eliminant by
substitution closure and branch over its rational roots.  Contradictory
branches are pruned; the verdict reports whether the identity function is
forced, with a replayable deduction trace.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Union

from .arith import (
    PartialFunction,
    factorize,
    prime_power_split,
    prime_powers_upto,
)
from .poly import Poly, Rational, Symbol
from .squares import enumerate_representations

# All representations of one n when their count is at most this, else the
# lexicographically first slice.  Keeps the equation count in check.
REPRESENTATION_CAP = 64

ELIMINANT_MAX_DEGREE = 4
ELIMINANT_MAX_SUBSTITUTIONS = 6

ACTIVE = "active"
CONTRADICTION = "contradiction"
SATURATED = "saturated"


# --------------------------------------------------------------------------
# Equations and provenance


@dataclass(frozen=True)
class Additivity:
    """f(n) minus the part sum of one representation of n."""

    n: int
    parts: tuple[int, ...]


@dataclass(frozen=True)
class CrossRepresentation:
    """Part sums of two representations of the same n equated."""

    n: int
    parts_a: tuple[int, ...]
    parts_b: tuple[int, ...]


@dataclass(frozen=True)
class Multiplicativity:
    """Coprime-split deduction f(n) = f(u) f(v) applied past the bound."""

    n: int
    known_factor: int
    target_factor: int


@dataclass(frozen=True)
class Derived:
    """Combination of earlier equations, identified by trace step."""

    step: int


Provenance = Union[Additivity, CrossRepresentation, Multiplicativity, Derived]


def provenance_fields(prov: Provenance) -> dict:
    if isinstance(prov, Additivity):
        return {"kind": "additivity", "n": prov.n, "parts": list(prov.parts)}
    if isinstance(prov, CrossRepresentation):
        return {
            "kind": "cross",
            "n": prov.n,
            "parts_a": list(prov.parts_a),
            "parts_b": list(prov.parts_b),
        }
    if isinstance(prov, Multiplicativity):
        return {
            "kind": "multiplicativity",
            "n": prov.n,
            "known_factor": prov.known_factor,
            "target_factor": prov.target_factor,
        }
    return {"kind": "derived", "step": prov.step}


@dataclass(frozen=True)
class Equation:
    """A polynomial required to equal zero, with its origin."""

    poly: Poly
    provenance: Provenance


# --------------------------------------------------------------------------
# Budgets, trace, branch state


@dataclass
class EngineBudget:
    max_steps: int = 1_000_000
    max_branches: int = 256
    multiplier_bound: int = 48
    derive_depth: int = 3


class BudgetExhausted(RuntimeError):
    """Raise the bound or the budget; never a mathematical claim."""

    def __init__(self, what: str, spent: int):
        super().__init__(f"budget exhausted: {what} after {spent} steps")
        self.what = what
        self.spent = spent


def _fmt_value(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass
class TraceStep:
    index: int
    branch: tuple[int, ...]
    rule: str
    inputs: dict
    output: dict

    def to_json(self) -> str:
        record = {
            "step": self.index,
            "branch": list(self.branch),
            "rule": self.rule,
            "inputs": self.inputs,
            "output": self.output,
        }
        return json.dumps(record, separators=(",", ":"))


@dataclass
class DeductionTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def serialize(self) -> str:
        return "\n".join(step.to_json() for step in self.steps) + (
            "\n" if self.steps else ""
        )

    def assignments(self) -> dict[tuple[int, ...], dict[int, Fraction]]:
        """Per branch path: prefix-inherited site assignments, replayed."""
        tables: dict[tuple[int, ...], dict[int, Fraction]] = {(): {}}
        for step in self.steps:
            if step.branch not in tables:
                parent = step.branch[:-1]
                while parent not in tables and parent:
                    parent = parent[:-1]
                tables[step.branch] = dict(tables.get(parent, {}))
            if step.rule in ("assign", "derive", "branch"):
                site = step.output.get("site")
                value = step.output.get("value")
                if site is not None:
                    tables[step.branch][int(site)] = _parse_value(value)
        return tables


def _parse_value(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


class _Counter:
    """Shared step counter; raises when the budget runs out."""

    __slots__ = ("steps", "limit")

    def __init__(self, limit: int):
        self.steps = 0
        self.limit = limit

    def tick(self, what: str = "propagation", weight: int = 1) -> None:
        self.steps += weight
        if self.steps > self.limit:
            raise BudgetExhausted(what, self.steps)


@dataclass
class BranchState:
    """One branch of the deduction search; single-writer, copy-on-fork."""

    pf: PartialFunction
    pending: list[Optional[Equation]]
    k: int
    bound: int
    path: tuple[int, ...] = ()
    status: str = ACTIVE
    note: str = ""
    log: list[TraceStep] = field(default_factory=list)
    derived: list[Equation] = field(default_factory=list)
    contradiction: Optional[Equation] = None

    def record(self, rule: str, inputs: dict, output: dict) -> None:
        self.log.append(TraceStep(0, self.path, rule, inputs, output))

    def fork(self, root_index: int, symbol: Symbol, value: Fraction) -> "BranchState":
        child = BranchState(
            pf=self.pf.copy(),
            pending=list(self.pending),
            k=self.k,
            bound=self.bound,
            path=self.path + (root_index,),
        )
        child.pf.assign(symbol.site, value)
        child.record(
            "branch",
            {"symbol": repr(symbol), "root_index": root_index},
            {"site": symbol.site, "value": _fmt_value(value)},
        )
        return child


# --------------------------------------------------------------------------
# Equation generation


def generate_equations(k: int, bound: int, pf: PartialFunction) -> list[Equation]:
    """The k-additivity system for all n <= bound.

    Per representation r of n: evaluate(pf, n) minus the sum of the part
    values, an Equation with Additivity provenance.  Order is n ascending,
    representations lexicographic.  Two representations of the same n imply
    their part sums are equal; that cross content is not materialized here,
    it falls out of elimination when the shared left side cancels.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if bound < k:
        raise ValueError(f"bound must be >= k, got {bound}")
    equations: list[Equation] = []
    for n in range(1, bound + 1):
        reps = enumerate_representations(n, k, REPRESENTATION_CAP)
        if not reps:
            continue
        left = pf.evaluate(n)
        for rep in reps:
            total = Poly.const(0)
            for a in rep.parts:
                total = total + pf.evaluate(a * a)
            equations.append(Equation(left - total, Additivity(n, rep.parts)))
    return equations


# --------------------------------------------------------------------------
# Propagation


def _fold(poly: Poly, pf: PartialFunction) -> Poly:
    for sym in poly.symbols():
        value = pf.known(sym.site)
        if value is not None:
            poly = poly.substitute(sym, value)
    return poly


def propagate(
    state: BranchState,
    budget: Optional[EngineBudget] = None,
    counter: Optional[_Counter] = None,
) -> BranchState:
    """Run every propagation rule to fixpoint.

    (a) constant-fold pending equations under current assignments;
    (b) an equation c*s + d with constants c != 0, d assigns s := -d/c;
    (c) equations that fold down to a single symbol, linearly, are solved
        the same way;
    (d) coprime-multiple derivation reaches past the bound for sites with
        no in-bound equation (multiplicativity division);
    (e) an equation folding to a nonzero constant flips the branch status
        to Contradiction.  Each action is logged; 0 = 0 is dropped silently.
    """
    budget = budget or EngineBudget()
    counter = counter or _Counter(budget.max_steps)
    pending = state.pending

    site_index: dict[int, set[int]] = {}
    for i, eq in enumerate(pending):
        if eq is None:
            continue
        for sym in eq.poly.symbols():
            site_index.setdefault(sym.site, set()).add(i)

    dirty: deque[int] = deque(i for i, eq in enumerate(pending) if eq is not None)
    in_dirty = set(dirty)

    def contradict(eq: Equation) -> None:
        state.status = CONTRADICTION
        state.contradiction = eq
        state.record(
            "contradiction",
            provenance_fields(eq.provenance),
            {"residue": _fmt_value(eq.poly.constant_value())},
        )

    def apply_assignment(site: int, value: Fraction, rule: str, inputs: dict) -> bool:
        """Record f(site) = value; False when it contradicts the branch."""
        current = state.pf.known(site)
        if current is not None:
            if current == value:
                return True
            residual = Equation(
                Poly.const(current - value), Derived(len(state.log))
            )
            contradict(residual)
            return False
        state.pf.assign(site, value)
        state.record(rule, inputs, {"site": site, "value": _fmt_value(value)})
        for i in site_index.pop(site, set()):
            if i not in in_dirty and pending[i] is not None:
                dirty.append(i)
                in_dirty.add(i)
        return True

    while True:
        progress = False
        while dirty:
            i = dirty.popleft()
            in_dirty.discard(i)
            eq = pending[i]
            if eq is None:
                continue
            counter.tick()
            folded = _fold(eq.poly, state.pf)
            if folded is not eq.poly:
                eq = Equation(folded, eq.provenance)
                pending[i] = eq
            if folded.is_zero():
                pending[i] = None
                continue
            if folded.is_constant():
                contradict(eq)
                return state
            solved = folded.linear_solve()
            if solved is not None:
                sym, value = solved
                pending[i] = None
                if not apply_assignment(
                    sym.site,
                    value,
                    "assign",
                    provenance_fields(eq.provenance),
                ):
                    return state
                progress = True

        if _derive_pass(state, budget, counter, apply_assignment):
            if state.status == CONTRADICTION:
                return state
            continue

        if not progress:
            break

    return state


# --------------------------------------------------------------------------
# Rule (d): coprime-multiple derivation past the bound


def _derive_pass(
    state: BranchState,
    budget: EngineBudget,
    counter: _Counter,
    apply_assignment: Callable[[int, Fraction, str, dict], bool],
) -> bool:
    """Pin stuck sites through equations beyond the generation bound.

    The in-bound system has no equation at all for some sites (for example
    f(2*4^m) when 2*4^m has no representation and its small multiples are
    out of range).  For those, an additivity instance at a coprime multiple
    m * p^e with f(m) known divides through to the missing value, exactly
    the coprime-multiple argument the inductive proofs use.
    """
    for site in state.pf.unassigned_sites(limit=state.bound):
        outcome = _attempt_derive(
            state, site, budget, counter, apply_assignment,
            depth=budget.derive_depth, visited={site},
        )
        if state.status == CONTRADICTION:
            return True
        if outcome:
            return True
    return False


def _attempt_derive(
    state: BranchState,
    site: int,
    budget: EngineBudget,
    counter: _Counter,
    apply_assignment: Callable[[int, Fraction, str, dict], bool],
    depth: int,
    visited: set[int],
) -> bool:
    pf = state.pf
    if pf.known(site) is not None:
        return True
    p, e = prime_power_split(site)
    # Sites beyond the generation bound are untracked until targeted here.
    pf.ensure_site(site)
    target = pf.symbol_for(site)
    allowed = {target} if target is not None else set()
    blockers: Counter[int] = Counter()

    def scan() -> Optional[tuple[Fraction, Equation, dict]]:
        for e2 in range(e, max(e - 2, 1) - 1, -1):
            base = p**e2
            for m in range(1, budget.multiplier_bound + 1):
                if gcd(m, p) != 1:
                    continue
                n2 = m * base
                if n2 <= state.bound:
                    continue
                left, missing = pf.peek(n2)
                if left is None or not left.symbols() <= allowed:
                    continue
                counter.tick("derivation")
                for rep in enumerate_representations(n2, state.k, REPRESENTATION_CAP):
                    total = Poly.const(0)
                    bad = False
                    for a in rep.parts:
                        part, missing = pf.peek(a * a)
                        if part is None:
                            blockers.update(missing)
                            bad = True
                            break
                        extra = part.symbols() - allowed
                        if extra:
                            blockers.update(s.site for s in extra)
                            bad = True
                            break
                        total = total + part
                    if bad:
                        continue
                    poly = left - total
                    if poly.is_zero():
                        continue
                    prov = Multiplicativity(n2, m, base)
                    if poly.is_constant():
                        # A valid instance folded to a nonzero constant:
                        # the branch is inconsistent.
                        state.status = CONTRADICTION
                        eq = Equation(poly, prov)
                        state.contradiction = eq
                        state.record(
                            "contradiction",
                            provenance_fields(prov),
                            {"residue": _fmt_value(poly.constant_value())},
                        )
                        return None
                    solved = poly.linear_solve()
                    if solved is None or solved[0].site != site:
                        continue
                    inputs = provenance_fields(prov)
                    inputs["parts"] = list(rep.parts)
                    return solved[1], Equation(poly, prov), inputs
        return None

    found = scan()
    if state.status == CONTRADICTION:
        return True
    if found is None and depth > 0:
        ranked = sorted(blockers.items(), key=lambda kv: (-kv[1], kv[0]))
        for blocked_site, _ in ranked[:3]:
            if blocked_site in visited:
                continue
            visited.add(blocked_site)
            if _attempt_derive(
                state, blocked_site, budget, counter, apply_assignment,
                depth - 1, visited,
            ):
                if state.status == CONTRADICTION:
                    return True
                found = scan()
                if state.status == CONTRADICTION:
                    return True
                if found is not None:
                    break
    if found is None:
        return False
    value, equation, inputs = found
    state.derived.append(equation)
    return apply_assignment(site, value, "derive", inputs)


# --------------------------------------------------------------------------
# Elimination and rational roots


def _eliminate_work(state: BranchState) -> list[Poly]:
    """Pending polynomials plus same-n cross differences, appended last.

    Two representations of one n share the left evaluation, so the
    difference of their equations drops it (resultant-style with respect to
    the shared monomial).  Appending the differences after all generated
    equations keeps discovery order anchored to generation order.
    """
    work: list[Poly] = []
    first_at_n: dict[int, Poly] = {}
    crosses: list[Poly] = []
    for eq in state.pending:
        if eq is None or eq.poly.is_zero():
            continue
        work.append(eq.poly)
        if isinstance(eq.provenance, Additivity):
            n = eq.provenance.n
            lead = first_at_n.get(n)
            if lead is None:
                first_at_n[n] = eq.poly
            else:
                diff = lead - eq.poly
                if not diff.is_zero():
                    crosses.append(diff)
    work.extend(crosses)
    return work


def eliminate(
    state: BranchState,
    budget: Optional[EngineBudget] = None,
    counter: Optional[_Counter] = None,
) -> Optional[tuple[Symbol, Poly]]:
    """Derive a univariate eliminant from the pending system, if any.

    Substitution closure over the pending equations and their same-n cross
    differences: walking symbols from the highest site down, an equation
    that defines a symbol as a degree-1 polynomial in other symbols (with a
    constant coefficient) substitutes it away everywhere, at most
    ELIMINANT_MAX_SUBSTITUTIONS per equation.  Every consequence that
    collapses to one symbol with degree 1..ELIMINANT_MAX_DEGREE is
    collected; the winner is the lowest-site symbol, breaking ties toward
    the earliest equation in generation order, primitive-normalized.
    Deterministic; None when the closure finds nothing within bounds.
    """
    budget = budget or EngineBudget()
    counter = counter or _Counter(budget.max_steps)
    work = _eliminate_work(state)
    if not work:
        return None
    occurs: dict[Symbol, set[int]] = {}
    for idx, poly in enumerate(work):
        for sym in poly.symbols():
            occurs.setdefault(sym, set()).add(idx)

    best: dict[Symbol, tuple[int, Poly]] = {}

    def consider(idx: int, poly: Poly) -> None:
        uni = poly.univariate_coeffs()
        if uni is None:
            return
        sym, coeffs = uni
        if not 1 <= len(coeffs) - 1 <= ELIMINANT_MAX_DEGREE:
            return
        cur = best.get(sym)
        if cur is None or idx < cur[0]:
            best[sym] = (idx, poly)

    for idx, poly in enumerate(work):
        consider(idx, poly)

    sub_counts = [0] * len(work)
    consumed: set[int] = set()
    substituted: set[Symbol] = set()
    universe = sorted(occurs, key=Symbol.sort_key, reverse=True)

    changed = True
    while changed:
        changed = False
        for sym in universe:
            if sym in substituted:
                continue
            candidates = []
            for idx in sorted(occurs.get(sym, ())):
                if idx in consumed:
                    continue
                poly = work[idx]
                if sym not in poly.symbols():
                    continue  # stale index entry
                expr = poly.solve_for(sym)
                if expr is not None and expr.total_degree() == 1:
                    candidates.append((len(expr.symbols()), idx, expr))
            if not candidates:
                continue
            _, source, expr = min(candidates, key=lambda c: c[:2])
            consumed.add(source)
            substituted.add(sym)
            changed = True
            for idx in sorted(occurs[sym]):
                if idx == source or idx in consumed:
                    continue
                poly = work[idx]
                if sym not in poly.symbols():
                    continue
                if sub_counts[idx] >= ELIMINANT_MAX_SUBSTITUTIONS:
                    continue
                counter.tick("elimination")
                replaced = poly.substitute_poly(sym, expr)
                sub_counts[idx] += 1
                work[idx] = replaced
                if replaced.is_zero():
                    consumed.add(idx)
                    continue
                for new_sym in replaced.symbols():
                    occurs.setdefault(new_sym, set()).add(idx)
                consider(idx, replaced)

    if not best:
        return None
    chosen = min(best, key=Symbol.sort_key)
    return chosen, best[chosen][1].primitive()


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def rational_roots(poly: Poly) -> list[Fraction]:
    """All rational roots of a univariate polynomial, each verified exactly.

    Complete over the rationals by the rational root theorem: every
    candidate from the divisor grid is tested, multiplicity is ignored.
    """
    if poly.is_zero():
        raise ValueError("zero polynomial has no well-defined root set")
    if poly.is_constant():
        return []
    uni = poly.univariate_coeffs()
    if uni is None:
        raise ValueError(f"not univariate: {poly}")
    _, coeffs = uni

    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]

    roots: set[Fraction] = set()
    while ints and ints[0] == 0:
        roots.add(Fraction(0))
        ints.pop(0)
    if not ints or len(ints) == 1:
        return sorted(roots)

    def value_at(x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(ints):
            acc = acc * x + c
        return acc

    for num in _divisors(ints[0]):
        for den2 in _divisors(ints[-1]):
            for cand in (Fraction(num, den2), Fraction(-num, den2)):
                if cand not in roots and value_at(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


# --------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Forced:
    """Exactly one branch survives and it is the identity up to the bound."""

    table: dict[int, Fraction]


@dataclass(frozen=True)
class Underdetermined:
    free_sites: tuple[int, ...]
    witness_count: int
    forced_prefix: int
    first_free: Optional[int]
    note: str = ""


@dataclass(frozen=True)
class AllBranchesContradict:
    """Impossible for a faithful system (identity is a model): defect signal."""


Outcome = Union[Forced, Underdetermined, AllBranchesContradict]


@dataclass
class Verdict:
    outcome: Outcome
    trace: DeductionTrace

    @property
    def kind(self) -> str:
        if isinstance(self.outcome, Forced):
            return "forced"
        if isinstance(self.outcome, Underdetermined):
            return "underdetermined"
        return "all_branches_contradict"


@dataclass
class _BranchNode:
    state: BranchState
    children: list["_BranchNode"] = field(default_factory=list)


def _explore(
    k: int,
    bound: int,
    budget: EngineBudget,
    threads: int = 1,
) -> tuple[list[BranchState], list[BranchState], DeductionTrace]:
    """Branch-and-prune search; returns survivors, pruned, merged trace."""
    pf = PartialFunction()
    for site in prime_powers_upto(bound):
        pf.ensure_site(site)
    equations = generate_equations(k, bound, pf)
    root = BranchState(pf=pf, pending=list(equations), k=k, bound=bound)
    counter = _Counter(budget.max_steps)
    branch_total = [1]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def explore(branch: BranchState, parallel_depth: int) -> _BranchNode:
        node = _BranchNode(branch)
        propagate(branch, budget, counter)
        if branch.status == CONTRADICTION:
            return node
        found = eliminate(branch, budget, counter)
        if found is None:
            branch.status = SATURATED
            branch.record("saturated", {}, {"free": branch.pf.unassigned_sites(bound)})
            return node
        symbol, eliminant = found
        roots = rational_roots(eliminant)
        if not roots:
            branch.status = SATURATED
            branch.note = "eliminant without rational roots; non-rational branches not explored"
            branch.record(
                "saturated",
                {"eliminant": str(eliminant), "symbol": repr(symbol)},
                {"note": branch.note},
            )
            return node
        branch.record(
            "split",
            {"eliminant": str(eliminant), "symbol": repr(symbol), "site": symbol.site},
            {"roots": [_fmt_value(r) for r in roots]},
        )
        children = []
        for idx, r in enumerate(roots):
            branch_total[0] += 1
            if branch_total[0] > budget.max_branches:
                raise BudgetExhausted("branches", branch_total[0])
            children.append(branch.fork(idx, symbol, r))
        if pool is not None and parallel_depth > 0:
            futures = [
                pool.submit(explore, child, parallel_depth - 1) for child in children
            ]
            node.children = [f.result() for f in futures]
        else:
            node.children = [explore(child, parallel_depth) for child in children]
        return node

    try:
        tree = explore(root, parallel_depth=1 if pool else 0)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    survivors: list[BranchState] = []
    pruned: list[BranchState] = []
    steps: list[TraceStep] = []

    def collect(node: _BranchNode) -> None:
        steps.extend(node.state.log)
        if node.children:
            for child in node.children:
                collect(child)
        elif node.state.status == CONTRADICTION:
            pruned.append(node.state)
        else:
            survivors.append(node.state)

    collect(tree)
    for i, step in enumerate(steps):
        step.index = i
    return survivors, pruned, DeductionTrace(steps)


def _identity_prefix(branches: list[BranchState], bound: int) -> tuple[int, Optional[int]]:
    """Largest m with f(n) = n forced for all n <= m in every branch."""
    for n in range(1, bound + 1):
        for branch in branches:
            value = branch.pf.known_value(n)
            if value is None or value != n:
                return n - 1, n
    return bound, None


def run_uniqueness(
    k: int,
    bound: int = 500,
    budget: Optional[EngineBudget] = None,
    threads: int = 1,
) -> Verdict:
    """Decide whether k-additivity on squares forces the identity up to bound.

    Forced requires exactly one surviving branch whose assignments evaluate
    to f(n) = n for every n <= bound; anything else is Underdetermined with
    the free sites, surviving-branch count (capped at 16), and the largest
    identity-forced prefix.  AllBranchesContradict signals a defect, and
    budget exhaustion raises rather than returning a verdict.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if bound < k:
        raise ValueError(f"bound must be >= k, got {bound}")
    budget = budget or EngineBudget()
    survivors, _, trace = _explore(k, bound, budget, threads)
    if not survivors:
        return Verdict(AllBranchesContradict(), trace)
    prefix, first_free = _identity_prefix(survivors, bound)
    if len(survivors) == 1 and prefix == bound:
        table = survivors[0].pf.assigned_table(limit=bound)
        return Verdict(Forced(table), trace)
    lead = survivors[0]
    note = lead.note
    return Verdict(
        Underdetermined(
            free_sites=tuple(lead.pf.unassigned_sites(limit=bound)),
            witness_count=min(len(survivors), 16),
            forced_prefix=prefix,
            first_free=first_free,
            note=note,
        ),
        trace,
    )


# --------------------------------------------------------------------------
# Model checking and witness search


class IncompleteTableError(ValueError):
    def __init__(self, missing: list[int]):
        super().__init__(f"table missing sites: {missing}")
        self.missing = missing


@dataclass
class VerificationReport:
    ok: bool
    first_violation: Optional[Equation]
    checked: int


def verify_assignment(
    table: dict[int, Rational], k: int, bound: int
) -> VerificationReport:
    """Substitute an explicit multiplicative f into every generated equation.

    The table must cover all prime powers <= bound; the first violated
    equation (n ascending, representations lexicographic) is reported with
    its provenance.
    """
    required = prime_powers_upto(bound)
    missing = [site for site in required if site not in table]
    if missing:
        raise IncompleteTableError(missing)

    values: dict[int, Fraction] = {1: Fraction(1)}

    def f(n: int) -> Fraction:
        got = values.get(n)
        if got is None:
            acc = Fraction(1)
            for p, e in factorize(n).pairs:
                acc *= Fraction(table[p**e])
            values[n] = acc
            got = acc
        return got

    checked = 0
    for n in range(1, bound + 1):
        for rep in enumerate_representations(n, k, REPRESENTATION_CAP):
            checked += 1
            residue = f(n) - sum(f(a * a) for a in rep.parts)
            if residue:
                poly = Poly.const(residue)
                return VerificationReport(
                    False, Equation(poly, Additivity(n, rep.parts)), checked
                )
    return VerificationReport(True, None, checked)


# Candidate values tried at each free site, in order.  Small rationals are
# enough: a genuinely free site accepts any value.
_WITNESS_GRID = (
    Fraction(1),
    Fraction(0),
    Fraction(2),
    Fraction(3),
    Fraction(1, 2),
    Fraction(-1),
    Fraction(5),
)


def search_nonidentity(
    k: int,
    bound: int,
    site_bound: int,
    budget: Optional[EngineBudget] = None,
) -> Optional[dict[int, Fraction]]:
    """Hunt for a non-identity multiplicative model of the k-additive system.

    Surviving branches of the uniqueness run are instantiated on their free
    sites (up to site_bound) over a small rational grid, identity elsewhere,
    and each candidate is model-checked by verify_assignment.  Returns the
    first passing table that differs from the identity, or None.
    """
    budget = budget or EngineBudget()
    survivors, _, _ = _explore(k, bound, budget, threads=1)
    attempts = 0
    for branch in survivors:
        base = {site: Fraction(site) for site in prime_powers_upto(bound)}
        base.update(branch.pf.assigned_table(limit=bound))
        if _differs_from_identity(base):
            report = verify_assignment(base, k, bound)
            if report.ok:
                return base
        for site in branch.pf.unassigned_sites(limit=min(site_bound, bound)):
            for value in _WITNESS_GRID:
                if value == site:
                    continue
                attempts += 1
                if attempts > budget.max_branches * 16:
                    raise BudgetExhausted("witness grid", attempts)
                candidate = dict(base)
                candidate[site] = value
                report = verify_assignment(candidate, k, bound)
                if report.ok:
                    return candidate
    return None


def _differs_from_identity(table: dict[int, Fraction]) -> bool:
    return any(value != site for site, value in table.items())
