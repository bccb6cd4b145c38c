"""Pushforward measures of step kernels and the flatness order.

Flatness of L1 relative to L2 is decided as LP feasibility: a coupling with
the two mass vectors as marginals whose conditional averages reproduce L1's
atoms.  For discrete L1 the barycenter condition only needs to hold at atoms,
which makes the constraint system finite.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, nnls

from .errors import MarginalMismatch, SolverFailure, StepGraphonError, ValueOutOfRange
from .core import _freeze
from .metrics import Coupling

ATOM_DEDUP_TOL = 1e-12


class DiscreteMeasure:
    """Finite measure on [0,1]: strictly increasing atoms with positive masses."""

    def __init__(self, atoms, masses):
        a = np.asarray(atoms, dtype=float)
        m = np.asarray(masses, dtype=float)
        if a.shape != m.shape or a.ndim != 1:
            raise StepGraphonError("atoms and masses must be equal-length vectors")
        if ((a < -ATOM_DEDUP_TOL) | (a > 1 + ATOM_DEDUP_TOL) | ~np.isfinite(a)).any():
            i = int(np.argwhere((a < -ATOM_DEDUP_TOL) | (a > 1 + ATOM_DEDUP_TOL)
                                | ~np.isfinite(a))[0])
            raise ValueOutOfRange(i, i, a[i], 0.0, 1.0)
        if (m < 0).any():
            i = int(np.argwhere(m < 0)[0])
            raise ValueOutOfRange(i, i, m[i], 0.0, float("inf"))
        order = np.argsort(a, kind="stable")
        a, m = a[order], m[order]
        out_a, out_m = [], []
        for x, w in zip(a, m):
            if out_a and x - out_a[-1] <= ATOM_DEDUP_TOL:
                out_m[-1] += w
            else:
                out_a.append(float(np.clip(x, 0.0, 1.0)))
                out_m.append(float(w))
        keep = [i for i, w in enumerate(out_m) if w > 0]
        self.atoms = _freeze(np.array([out_a[i] for i in keep]))
        self.masses = _freeze(np.array([out_m[i] for i in keep]))

    @property
    def n(self):
        return len(self.atoms)

    def total_mass(self):
        return float(self.masses.sum())

    def integrate(self, f):
        if self.n == 0:
            return 0.0
        return float(np.sum(self.masses * np.vectorize(f, otypes=[float])(self.atoms)))

    def first_moment(self):
        return float(np.dot(self.atoms, self.masses))

    def approx_equal(self, other, tol=1e-9):
        if self.n != other.n:
            return False
        if self.n == 0:
            return True
        return (np.abs(self.atoms - other.atoms).max() <= tol
                and np.abs(self.masses - other.masses).max() <= tol)

    def to_dict(self):
        return {"atoms": self.atoms.tolist(), "masses": self.masses.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["atoms"], d["masses"])

    def __repr__(self):
        return f"DiscreteMeasure(n={self.n}, total={self.total_mass():.6g})"


class FlatnessWitness:
    """Outcome of a flatness check: coupling witness or a refusal reason."""

    def __init__(self, feasible, coupling=None, residual=float("inf"), reason=""):
        self.feasible = bool(feasible)
        self.coupling = coupling
        self.residual = float(residual)
        self.reason = reason

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "residual": self.residual,
            "reason": self.reason,
            "coupling": self.coupling.to_dict() if self.coupling else None,
        }

    def __repr__(self):
        tag = "feasible" if self.feasible else f"infeasible ({self.reason})"
        return f"FlatnessWitness({tag}, residual={self.residual:.3g})"


def _sorted_group_sums(keys, contributions):
    """Group contributions by key with a canonical summation order.

    Sorting by (key, contribution) before accumulating makes the sums
    independent of the input enumeration order, so rearranged kernels yield
    bitwise-identical measures.
    """
    order = np.lexsort((contributions, keys))
    keys, contributions = keys[order], contributions[order]
    atoms, masses = [], []
    for k, c in zip(keys, contributions):
        if atoms and k == atoms[-1]:
            masses[-1] += c
        else:
            atoms.append(float(k))
            masses.append(float(c))
    return np.array(atoms), np.array(masses)


def range_frequencies(W):
    """Distribution of block values weighted by pair mass."""
    a = W.weights
    mass = np.outer(a, a).ravel()
    vals = W.values.ravel()
    keep = mass > 0
    atoms, masses = _sorted_group_sums(vals[keep], mass[keep])
    return DiscreteMeasure(atoms, masses)


def degree_frequencies(W):
    """Distribution of block degrees weighted by block mass."""
    keep = W.weights > 0
    degs = (W.values @ W.weights)[keep]
    atoms, masses = _sorted_group_sums(np.clip(degs, 0.0, 1.0), W.weights[keep])
    return DiscreteMeasure(atoms, masses)


def _flatness_system(l1, l2):
    """Equality system A psi = b for the coupling variables (row-major)."""
    n, m = l1.n, l2.n
    rows = n + m + n
    a = np.zeros((rows, n * m))
    for i in range(n):
        a[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a[n + j, j::m] = 1.0
    for i in range(n):
        a[n + m + i, i * m:(i + 1) * m] = l2.atoms
    b = np.concatenate((l1.masses, l2.masses, l1.masses * l1.atoms))
    return a, b


def _cleanup_solution(a, b, x, support_tol=1e-11):
    """Re-fit the LP solution on its support with nonnegative least squares."""
    support = np.flatnonzero(x > support_tol)
    if len(support) == 0:
        x2 = np.zeros_like(x)
    else:
        try:
            coef, _ = nnls(a[:, support], b)
        except Exception as exc:  # pragma: no cover - nnls rarely fails
            raise SolverFailure(f"support refit failed: {exc}") from exc
        x2 = np.zeros_like(x)
        x2[support] = coef
    res2 = float(np.abs(a @ x2 - b).max())
    res1 = float(np.abs(a @ x - b).max())
    return (x2, res2) if res2 <= res1 else (np.clip(x, 0.0, None), res1)


def check_flatter(l1, l2, tol=1e-9, minimize_offdiagonal=True, exact=False):
    """Decide whether l1 is at least as flat as l2, returning a witness.

    Fast-fails on total-mass or first-moment mismatch (both are forced by
    the coupling constraints), then solves the feasibility LP.  With
    minimize_offdiagonal the LP objective is the transport cost |x - y|,
    which pins the witness to the diagonal whenever the measures coincide.
    The exact mode re-decides feasibility in rational arithmetic over the
    exact binary expansions of the inputs.
    """
    t1, t2 = l1.total_mass(), l2.total_mass()
    if abs(t1 - t2) > tol:
        return FlatnessWitness(False, reason="total mass mismatch")
    if l1.n == 0 or l2.n == 0:
        # a coupling with one empty marginal forces the other to vanish
        if max(t1, t2) <= tol:
            return FlatnessWitness(True, None, residual=max(t1, t2),
                                   reason="effectively empty measures")
        return FlatnessWitness(False, reason="empty versus nonempty measure")
    if abs(l1.first_moment() - l2.first_moment()) > tol:
        return FlatnessWitness(False, reason="first moment mismatch")
    if exact:
        return _check_flatter_exact(l1, l2)
    a, b = _flatness_system(l1, l2)
    cost = np.abs(np.subtract.outer(l1.atoms, l2.atoms)).ravel()
    if not minimize_offdiagonal:
        cost = np.zeros_like(cost)
    res = linprog(cost, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 2:
        return FlatnessWitness(False, reason="no coupling satisfies the barycenter constraints")
    if res.status != 0 or res.x is None:
        raise SolverFailure(f"flatness LP ended with status {res.status}: {res.message}")
    x, residual = _cleanup_solution(a, b, res.x)
    coupling = Coupling(x.reshape(l1.n, l2.n), l1.masses, l2.masses)
    return FlatnessWitness(True, coupling, residual=residual)


def _check_flatter_exact(l1, l2):
    """Rational-arithmetic feasibility over exact binary expansions."""
    x = [Fraction(v) for v in l1.atoms]
    p = [Fraction(v) for v in l1.masses]
    y = [Fraction(v) for v in l2.atoms]
    q = [Fraction(v) for v in l2.masses]
    if sum(p) != sum(q):
        return FlatnessWitness(False, reason="total mass mismatch (exact)")
    n, m = len(x), len(y)
    rows = []
    b = []
    for i in range(n):
        row = [Fraction(0)] * (n * m)
        for j in range(m):
            row[i * m + j] = Fraction(1)
        rows.append(row)
        b.append(p[i])
    for j in range(m):
        row = [Fraction(0)] * (n * m)
        for i in range(n):
            row[i * m + j] = Fraction(1)
        rows.append(row)
        b.append(q[j])
    for i in range(n):
        row = [Fraction(0)] * (n * m)
        for j in range(m):
            row[i * m + j] = y[j]
        rows.append(row)
        b.append(p[i] * x[i])
    feasible, sol = _phase_one_simplex(rows, b)
    if not feasible:
        return FlatnessWitness(False, reason="no coupling satisfies the barycenter constraints (exact)")
    mat = np.array([[float(sol[i * m + j]) for j in range(m)] for i in range(n)])
    coupling = Coupling(mat, l1.masses, l2.masses)
    return FlatnessWitness(True, coupling, residual=0.0, reason="exact rational certificate")


def _phase_one_simplex(rows, b):
    """Phase-one simplex with Bland's rule over exact rationals.

    Decides feasibility of A x = b, x >= 0 and returns a basic feasible point.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    tableau = []
    for i in range(m):
        row = list(rows[i])
        if b[i] < 0:
            row = [-v for v in row]
            bi = -b[i]
        else:
            bi = b[i]
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tableau.append(row + art + [bi])
    basis = [n + i for i in range(m)]
    total = n + m

    def objective_row():
        # sum of basic artificial rows = reduced costs of minimizing artificials
        obj = [Fraction(0)] * (total + 1)
        for r, bv in enumerate(basis):
            if bv >= n:
                for c in range(total + 1):
                    obj[c] += tableau[r][c]
        return obj

    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            raise SolverFailure("exact simplex failed to terminate")
        obj = objective_row()
        enter = -1
        for j in range(n):  # artificials never re-enter
            if obj[j] > 0:
                enter = j
                break
        if enter == -1:
            break
        leave, best = -1, None
        for r in range(m):
            if tableau[r][enter] > 0:
                ratio = tableau[r][total] / tableau[r][enter]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave == -1:
            break  # defensive; phase one is bounded below by 0
        piv = tableau[leave][enter]
        tableau[leave] = [v / piv for v in tableau[leave]]
        for r in range(m):
            if r != leave and tableau[r][enter] != 0:
                f = tableau[r][enter]
                tableau[r] = [v - f * w for v, w in zip(tableau[r], tableau[leave])]
        basis[leave] = enter
    infeas = objective_row()[total]
    if infeas != 0:
        return False, None
    sol = [Fraction(0)] * n
    for r, bv in enumerate(basis):
        if bv < n:
            sol[bv] = tableau[r][total]
    return True, sol


def compose_couplings(p1, p2, mid):
    """Chain two flatness witnesses through the shared middle measure."""
    q = np.asarray(mid.masses, dtype=float)
    if len(p1.col_marginal) != len(q) or len(p2.row_marginal) != len(q):
        raise MarginalMismatch("middle measure size does not match the couplings")
    if (np.abs(p1.col_marginal - q).max() > Coupling.TOL
            or np.abs(p2.row_marginal - q).max() > Coupling.TOL):
        raise MarginalMismatch("couplings do not share the middle marginal")
    keep = q > 0
    left = p1.matrix[:, keep]
    right = p2.matrix[keep, :] / q[keep, None]
    xi = left @ right
    return Coupling(xi, p1.row_marginal, p2.col_marginal)


DEFAULT_CONVEX_FAMILY = (
    ("x^2", lambda x: x * x),
    ("|x-1/4|", lambda x: abs(x - 0.25)),
    ("|x-1/2|", lambda x: abs(x - 0.5)),
    ("|x-3/4|", lambda x: abs(x - 0.75)),
    ("exp(x)", np.exp),
)


class ConvexOrderReport:
    def __init__(self, entries):
        self.entries = entries

    @property
    def violations(self):
        return [e["name"] for e in self.entries if not e["ok"]]

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {"entries": self.entries, "violations": self.violations}


def convex_order_test(l1, l2, family=None, slack=1e-10):
    """Necessary Choquet-order checks: int f dL1 <= int f dL2 for convex f."""
    fam = family if family is not None else DEFAULT_CONVEX_FAMILY
    entries = []
    for name, f in fam:
        v1, v2 = l1.integrate(f), l2.integrate(f)
        entries.append({
            "name": name,
            "int_l1": v1,
            "int_l2": v2,
            "ok": bool(v1 <= v2 + slack),
        })
    return ConvexOrderReport(entries)


def strictly_flatter(l1, l2, tol=1e-9):
    """Operational strict flatness: feasible witness and distinct measures."""
    witness = check_flatter(l1, l2, tol=tol)
    return witness.feasible and not l1.approx_equal(l2, tol=tol)


def add_measures(l1, l2):
    """Atom-wise union with summed masses (totals add)."""
    return DiscreteMeasure(
        np.concatenate((l1.atoms, l2.atoms)),
        np.concatenate((l1.masses, l2.masses)),
    )


def graphon_measures(W):
    """(range frequencies, degree frequencies) of a step graphon."""
    return range_frequencies(W), degree_frequencies(W)


__all__ = [
    "DiscreteMeasure",
    "FlatnessWitness",
    "range_frequencies",
    "degree_frequencies",
    "check_flatter",
    "compose_couplings",
    "convex_order_test",
    "ConvexOrderReport",
    "strictly_flatter",
    "add_measures",
    "graphon_measures",
]
