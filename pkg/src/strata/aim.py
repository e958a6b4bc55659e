"""Symplectic tangent-space analyses and the minimal-stratum decompositions.

The absolute-homology data comes in as a skew intersection matrix, the images
of an absolute basis inside the extended relative model, and the absolute
images of the vanishing cycles.  Subspaces are reported in absolute homology
coordinates (through the intersection-form duality), so symplecticity is the
directly assertable condition rank(B J B^T) = dim.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import linalg
from .deformation import CylinderClass
from .equations import (
    EquationSystem,
    correlated_witness,
    cross_equivalence_classes,
    hor_support,
    is_correlated,
)
from .errors import AimError, Violation
from .gaussian import ZERO, GaussianRational
from .homology import Cycle, pair


@dataclass(frozen=True)
class SymplecticData:
    """Absolute homology: skew form, inclusion into the model, lambda images."""

    j_matrix: tuple[tuple[int, ...], ...]
    iota: tuple[Cycle, ...]  # image of each absolute basis vector
    u_lambda: dict[str, tuple[GaussianRational, ...]]
    minimal: bool = False

    @property
    def dim(self) -> int:
        return len(self.j_matrix)


def validate_symplectic(data: SymplecticData, system: EquationSystem) -> list[Violation]:
    out: list[Violation] = []
    n = data.dim
    for row in data.j_matrix:
        if len(row) != n:
            out.append(Violation("J", "shape", "intersection matrix is not square"))
            return out
    for a in range(n):
        for b in range(n):
            if data.j_matrix[a][b] != -data.j_matrix[b][a]:
                out.append(Violation("J", "skew", f"J[{a}][{b}] != -J[{b}][{a}]"))
                return out
    j_rows = [[GaussianRational(x) for x in row] for row in data.j_matrix]
    if linalg.rank(j_rows) != n:
        out.append(Violation("J", "nondegenerate", "intersection matrix is singular"))
    if len(data.iota) != n:
        out.append(
            Violation("iota", "shape", f"{len(data.iota)} rows for a rank-{n} absolute basis")
        )
    edge_ids = sorted(e.id for e in system.graph.edges)
    for eid in edge_ids:
        if eid not in data.u_lambda:
            out.append(Violation(f"u_lambda {eid}", "complete", "missing vanishing-cycle image"))
        elif len(data.u_lambda[eid]) != n:
            out.append(Violation(f"u_lambda {eid}", "shape", f"vector length != {n}"))
    for eid in data.u_lambda:
        if eid not in set(edge_ids):
            out.append(Violation(f"u_lambda {eid}", "unknown-edge", "no such edge"))
    if out:
        return out
    # Adjunction: pairing an absolute vector against a lambda image downstairs
    # equals pairing its inclusion against the vanishing cycle upstairs.
    for a in range(n):
        for eid in edge_ids:
            lhs = ZERO
            for b in range(n):
                if data.j_matrix[a][b]:
                    lhs = lhs + GaussianRational(data.j_matrix[a][b]) * data.u_lambda[eid][b]
            rhs = pair(data.iota[a], eid)
            if lhs != rhs:
                out.append(
                    Violation(
                        f"adjunction ({a}, {eid})", "adjunction",
                        f"<x_{a}, u(lambda)> = {lhs} but <iota(x_{a}), lambda> = {rhs}",
                    )
                )
    if data.minimal != system.minimal_stratum:
        out.append(
            Violation("minimal", "flags", "symplectic data and system disagree on minimality")
        )
    if data.minimal:
        if len(system.basis.elements) != n:
            out.append(
                Violation("minimal", "rank", "minimal stratum requires basis rank = absolute rank")
            )
        iota_rows = [c.to_vector() for c in data.iota]
        if linalg.rank(iota_rows) != n:
            out.append(Violation("minimal", "invertible", "inclusion is not injective"))
    return out


def _require_valid(data: SymplecticData, system: EquationSystem) -> None:
    problems = validate_symplectic(data, system)
    if problems:
        raise AimError(f"symplectic data rejected: {problems[0]}")


@dataclass(frozen=True)
class SubspaceReport:
    """A subspace in absolute homology coordinates with its restricted form."""

    basis_rows: tuple[tuple[GaussianRational, ...], ...]
    dim: int
    form_rank: int
    symplectic: bool


def _constraint_cycles(system: EquationSystem) -> list[Cycle]:
    cycles = [eq.cycle for eq in system.rref_rows]
    cycles += [rel for rel, _ in system.relations.relations]
    cycles += system.ratios.forms(system.basis)
    return cycles


def _subspace_report(j_matrix, vectors: Sequence[Sequence[GaussianRational]]) -> SubspaceReport:
    reduced, _ = linalg.rref(vectors)
    dim = len(reduced)
    j_rows = [[GaussianRational(x) for x in row] for row in j_matrix]
    gram = [
        [sum((a * b for a, b in zip(linalg.matvec(j_rows, v), w)), start=ZERO) for v in reduced]
        for w in reduced
    ]
    form_rank = linalg.rank(gram) if dim else 0
    return SubspaceReport(
        tuple(tuple(row) for row in reduced), dim, form_rank, form_rank == dim
    )


def tangent_absolute(system: EquationSystem, data: SymplecticData) -> SubspaceReport:
    """Absolute-homology image of the tangent space to the candidate variety.

    The tangent space is the annihilator, inside the extended model, of the
    equations together with every declared relation and ratio; its pullback
    along the inclusion lands in absolute cohomology and is reported in
    homology coordinates via the inverse intersection form.
    """
    _require_valid(data, system)
    ncols = len(system.basis.columns())
    constraints = [c.to_vector() for c in _constraint_cycles(system)]
    tangent = linalg.nullspace(constraints, ncols) if constraints else linalg.identity(ncols)
    iota_rows = [c.to_vector() for c in data.iota]
    images = []
    for v in tangent:
        images.append([sum((a * b for a, b in zip(row, v)), start=ZERO) for row in iota_rows])
    j_rows = [[GaussianRational(x) for x in row] for row in data.j_matrix]
    j_inv = linalg.invert(j_rows)
    assert j_inv is not None
    homology_vectors = [linalg.matvec(j_inv, w) for w in images]
    return _subspace_report(data.j_matrix, homology_vectors)


@dataclass(frozen=True)
class LemmaBoundReport:
    dim: int
    bound_satisfied: bool


def lemma_bound(system: EquationSystem, data: SymplecticData, cls: CylinderClass) -> LemmaBoundReport:
    """Dimension of the tangent directions supported on one parallel class.

    Deformations supported on the cylinders of the class are the functionals
    carried by its cross-curve coordinates; intersecting with the tangent
    space and pushing to absolute homology must give dimension at most 1 when
    the data models an affine invariant manifold.
    """
    _require_valid(data, system)
    report = tangent_absolute(system, data)
    if not report.symplectic:
        raise AimError("tangent image is not symplectic; the bound does not apply")
    if len(cls.edges) > 1:
        for a in cls.edges:
            for b in cls.edges:
                if a < b and system.ratios.ratio(a, b) is None:
                    raise AimError(
                        f"class is not declared parallel: no ratio linking {a} and {b}"
                    )
    constraints = _constraint_cycles(system)
    curve_names = cls.curve_names()
    rows = [[c.coeffs.get(name, ZERO) for name in curve_names] for c in constraints]
    coefficient_basis = linalg.nullspace(rows, len(curve_names)) if rows else linalg.identity(len(curve_names))
    images = []
    for coeffs in coefficient_basis:
        vec = []
        for iota_cycle in data.iota:
            total = ZERO
            for c, (eid, _) in zip(coeffs, cls.cross_curves):
                if c:
                    total = total + c * pair(iota_cycle, eid)
            vec.append(total)
        images.append(vec)
    dim = linalg.rank(images) if images else 0
    return LemmaBoundReport(dim, dim <= 1)


@dataclass(frozen=True)
class CrossWitnessResult:
    witness: Cycle | None
    diagnostic: str | None


def pairwise_cross_witness(
    system: EquationSystem, data: SymplecticData | None, e1: str, e2: str
) -> CrossWitnessResult:
    """Span element crossing exactly two given cross-related nodes.

    In the minimal stratum such a witness must exist; its absence is evidence
    the data does not model an affine invariant manifold, reported as a
    diagnostic rather than an error.
    """
    if not system.minimal_stratum:
        raise AimError("minimal stratum required")
    if data is not None:
        _require_valid(data, system)
    horizontal = set(system.graph.horizontal_edges)
    if e1 not in horizontal or e2 not in horizontal or e1 == e2:
        raise AimError("need two distinct horizontal edges")
    same = any(e1 in cls and e2 in cls for cls in cross_equivalence_classes(system))
    if not same:
        raise AimError(f"{e1} and {e2} are not cross-related")
    witness = correlated_witness(system, {e1, e2})
    if witness is None:
        return CrossWitnessResult(
            None,
            f"no defining equation crosses exactly {{{e1}, {e2}}}; the minimal-stratum"
            " pairwise-crossing guarantee fails, so this system does not model an"
            " affine invariant manifold",
        )
    return CrossWitnessResult(witness, None)


def _extended_rows(system: EquationSystem) -> tuple[list[linalg.Vector], list[int]]:
    rows = [eq.cycle.to_vector() for eq in system.rref_rows]
    rows += [rel.to_vector() for rel, _ in system.relations.relations]
    rows += [f.to_vector() for f in system.ratios.forms(system.basis)]
    return linalg.rref(rows)


def _pure_lambda_subspace(system: EquationSystem) -> list[Cycle]:
    """Extended-span elements supported on horizontal vanishing cycles only."""
    reduced, _ = _extended_rows(system)
    if not reduced:
        return []
    columns = system.basis.columns()
    horizontal = set(system.graph.horizontal_edges)
    constraints = []
    for col, (kind, key) in enumerate(columns):
        if kind == "b" or key not in horizontal:
            constraints.append([row[col] for row in reduced])
    coeff_basis = linalg.nullspace(constraints, len(reduced)) if constraints else linalg.identity(len(reduced))
    out = []
    for coords in coeff_basis:
        vec = linalg.zeros(len(columns))
        for c, row in zip(coords, reduced):
            if c:
                vec = linalg.vec_add(vec, linalg.vec_scale(c, row))
        out.append(Cycle.from_vector(system.basis, vec))
    return out


def _pair_form_candidates(
    system: EquationSystem, preferred: Sequence[str]
) -> list[tuple[tuple[str, str], Cycle]]:
    """Two-node period forms in the extended span, preferred pairs first."""
    horizontal = sorted(system.graph.horizontal_edges)
    pure = _pure_lambda_subspace(system)
    if not pure:
        return []
    pure_vectors = [c.to_vector() for c in pure]
    columns = system.basis.columns()
    preferred_set = set(preferred)
    pairs = []
    for a_idx in range(len(horizontal)):
        for b_idx in range(a_idx + 1, len(horizontal)):
            a, b = horizontal[a_idx], horizontal[b_idx]
            inside = a in preferred_set and b in preferred_set
            pairs.append((0 if inside else 1, a, b))
    pairs.sort()
    out = []
    for _, a, b in pairs:
        constraints = []
        for col, (kind, key) in enumerate(columns):
            if kind == "l" and key in (a, b):
                continue
            constraints.append([v[col] for v in pure_vectors])
        coeff_basis = linalg.nullspace(constraints, len(pure))
        for coords in coeff_basis:
            vec = linalg.zeros(len(columns))
            for c, v in zip(coords, pure_vectors):
                if c:
                    vec = linalg.vec_add(vec, linalg.vec_scale(c, v))
            form = Cycle.from_vector(system.basis, vec)
            if not form.is_zero():
                out.append(((a, b), form))
    return out


def pairwise_circum_decompose(
    cycle: Cycle, system: EquationSystem, data: SymplecticData | None = None
) -> list[Cycle]:
    """Write a pure circumference-period equation as two-node proportionalities.

    Solves for a combination of two-node period forms in the extended span,
    preferring forms supported on the input's own nodes, then repeatedly
    rewrites away any term touching an outside node.  Every output is a
    two-node (or smaller) period form in the extended span and the outputs
    sum exactly to the input.
    """
    if not system.minimal_stratum:
        raise AimError("minimal stratum required")
    if data is not None:
        _require_valid(data, system)
    horizontal = set(system.graph.horizontal_edges)
    if cycle.coeffs or not set(cycle.lam) <= horizontal:
        raise AimError("input must be a combination of horizontal vanishing-cycle periods")
    reduced, pivots = _extended_rows(system)
    if not linalg.in_span(cycle.to_vector(), reduced, pivots):
        raise AimError("input is not in the span of the system and its relations")
    target_nodes = sorted(cycle.lam)
    candidates = _pair_form_candidates(system, target_nodes)
    if not candidates:
        raise AimError("recombination stuck: the span contains no two-node period forms")
    columns = system.basis.columns()
    matrix_rows = []
    rhs = []
    target_vec = cycle.to_vector()
    for col in range(len(columns)):
        matrix_rows.append([form.to_vector()[col] for _, form in candidates])
        rhs.append(target_vec[col])
    solution = linalg.solve_linear(matrix_rows, rhs)
    if solution is None:
        raise AimError(
            "recombination stuck: the input is not a combination of two-node period"
            " forms; no pairwise decomposition exists in this span"
        )
    terms = [form.scale(c) for c, (_, form) in zip(solution, candidates) if c]
    terms = _rewrite_outside_terms(terms, set(target_nodes))
    total = system.basis.zero()
    for t in terms:
        total = total + t
        assert len(t.lam) <= 2 and not t.coeffs
        assert linalg.in_span(t.to_vector(), reduced, pivots)
    assert (total - cycle).is_zero()
    return terms


def _rewrite_outside_terms(terms: list[Cycle], inside: set[str]) -> list[Cycle]:
    """Eliminate terms meeting outside nodes by pairwise recombination."""
    work = [t for t in terms if not t.is_zero()]
    for _ in range(10_000):
        mixed = None
        for idx, t in enumerate(work):
            outside_nodes = sorted(set(t.lam) - inside)
            if outside_nodes and len(set(t.lam) & inside) > 0:
                mixed = (idx, t, outside_nodes[0])
                break
        if mixed is None:
            keep = [t for t in work if set(t.lam) <= inside]
            drop = [t for t in work if not set(t.lam) <= inside]
            if drop:
                total = drop[0]
                for t in drop[1:]:
                    total = total + t
                if not total.is_zero():
                    raise AimError(
                        "recombination stuck: outside-node terms do not cancel"
                    )
            return keep
        idx, term1, node = mixed
        partner = None
        for k, t in enumerate(work):
            if k != idx and node in t.lam:
                partner = k
                break
        if partner is None:
            raise AimError(f"recombination stuck: unmatched outside node {node}")
        c1 = term1.lam[node]
        c2 = work[partner].lam[node]
        scaled = term1.scale(c2 / c1)
        new_terms = [
            t for k, t in enumerate(work) if k not in (idx, partner)
        ]
        combined1 = term1 + scaled
        combined2 = work[partner] - scaled
        for t in (combined1, combined2):
            if not t.is_zero():
                new_terms.append(t)
        work = new_terms
    raise AssertionError("recombination failed to terminate")


def at_most_two_decompose(
    cycle: Cycle, system: EquationSystem, data: SymplecticData | None = None
) -> list[Cycle]:
    """Split an equation into summands crossing at most two horizontal nodes.

    Repeatedly subtracts witnesses supported on proper correlated subsets; in
    the minimal stratum the pairwise witnesses the recursion needs are
    guaranteed, so failure to find one is reported as evidence against the
    data rather than tolerated.
    """
    if not system.minimal_stratum:
        raise AimError("minimal stratum required")
    if data is not None:
        _require_valid(data, system)
    reduced, pivots = _extended_rows(system)
    if not linalg.in_span(cycle.to_vector(), reduced, pivots):
        raise AimError("input is not in the span of the system and its relations")

    out: list[Cycle] = []
    stack = [cycle]
    for _ in range(4 ** (len(system.graph.horizontal_edges) + 1) + len(stack)):
        if not stack:
            return out
        work = stack.pop()
        if work.is_zero():
            continue
        support = sorted(hor_support(work))
        if len(support) <= 2:
            out.append(work)
            continue
        found = None
        for size in range(1, len(support)):
            for combo in combinations(support, size):
                if is_correlated(system, frozenset(combo)):
                    witness = correlated_witness(system, frozenset(combo))
                    if witness is not None:
                        found = witness
                        break
            if found is not None:
                break
        if found is None:
            raise AimError(
                f"no proper correlated subset of {support} has a witness; the"
                " minimal-stratum decomposition guarantee fails for this system"
            )
        anchor = next(e for e in support if pair(found, e))
        factor = pair(work, anchor) / pair(found, anchor)
        piece = found.scale(factor)
        stack.append(piece)
        stack.append(work - piece)
    raise AssertionError("decomposition failed to terminate")
