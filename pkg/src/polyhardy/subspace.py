"""Invariant subspaces: orbit construction, wandering subspaces, rebuilds.

All spans are computed in an enlarged working grade and intersected with the
target caps by linear algebra, so that linear combinations of high-degree
orbit elements that cancel back inside the caps are not lost.  Bases are
stored in a canonical organization: the block supported on the safe band
comes first, each block ordered by ascending outer degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, GradeError, NotInvariantError
from .grading import Grade, HardyVector
from .operators import OperatorMatrix, shift_matrix, spectral_norm

SVD_CUTOFF = 1e-10
_SUPPORT_TOL = 1e-12
_RESIDUAL_ORTH_TOL = 1e-8

DEFAULT_MARGIN = 2
INVARIANCE_TOL = 1e-10


@dataclass(frozen=True)
class Provenance:
    """How a basis was produced; enough to re-derive working-grade data."""

    kind: str
    generators: tuple[HardyVector, ...] = ()
    labels: tuple[str, ...] = ()
    margin: int = 0
    working_caps: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a capped slice of an invariant subspace."""

    grade: Grade
    columns: np.ndarray
    provenance: Provenance
    n_certified: int = 0

    def __post_init__(self) -> None:
        cols = np.asarray(self.columns, dtype=complex)
        if cols.shape[0] != self.grade.dim:
            raise GradeError("column length does not match the grade")
        gram = cols.conj().T @ cols
        if cols.shape[1] and spectral_norm(gram - np.eye(cols.shape[1])) > 1e-10:
            raise GradeError("basis columns are not orthonormal")
        cols.flags.writeable = False
        object.__setattr__(self, "columns", cols)

    @property
    def dim(self) -> int:
        return int(self.columns.shape[1])

    @property
    def n_flagged(self) -> int:
        return self.dim - self.n_certified


@dataclass(frozen=True)
class InvarianceReport:
    """Residuals ''(I - P_S) T B_safe'' per tuple member."""

    residuals: tuple[float, ...]
    verdict: bool
    tolerance: float
    n_safe_columns: int


@dataclass(frozen=True)
class WoldReport:
    residual: float
    verdict: bool
    tolerance: float
    reconstruction_caps: int
    safe_band_dim: int


def orthonormal_columns(a: np.ndarray, tol: float = SVD_CUTOFF) -> np.ndarray:
    """SVD basis of the column span with a relative singular-value cutoff."""
    if a.size == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if len(s) == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    return u[:, s > tol * max(1.0, s[0])]


def coordinate_slice(basis: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(basis) ∩ {x : x vanishes off ``keep``}."""
    if basis.shape[1] == 0:
        return basis
    outside = basis[~keep, :]
    if outside.shape[0] == 0:
        return basis
    _, s, vh = np.linalg.svd(outside, full_matrices=True)
    rank = int((s > SVD_CUTOFF).sum())
    null = vh.conj().T[:, rank:]
    return orthonormal_columns(basis @ null)


def _outer_degree_mask(grade: Grade, d: int) -> np.ndarray:
    return np.array([t[0] <= d for t in grade.indices])


def graded_basis(grade: Grade, basis: np.ndarray) -> np.ndarray:
    """Re-basis a span so columns have minimal max outer degree, ascending."""
    if basis.shape[1] == 0:
        return basis
    done = np.zeros((grade.dim, 0), dtype=complex)
    for d in range(grade.outer_cap + 1):
        part = coordinate_slice(basis, _outer_degree_mask(grade, d))
        fresh = orthonormal_columns(
            part - done @ (done.conj().T @ part), tol=_RESIDUAL_ORTH_TOL
        )
        done = np.hstack([done, fresh])
        if done.shape[1] == basis.shape[1]:
            break
    return done


def organize_basis(grade: Grade, basis: np.ndarray) -> tuple[np.ndarray, int]:
    """Canonical layout: [safe-supported block | remainder], each graded."""
    safe_part = graded_basis(grade, coordinate_slice(basis, grade.safe_mask))
    rest = orthonormal_columns(
        basis - safe_part @ (safe_part.conj().T @ basis), tol=_RESIDUAL_ORTH_TOL
    )
    rest = graded_basis(grade, rest)
    return np.hstack([safe_part, rest]), safe_part.shape[1]


def embedding_positions(small: Grade, big: Grade) -> np.ndarray:
    """Positions of the small grade's indices inside the big grade's order."""
    if (
        small.n != big.n
        or small.coeff_dim != big.coeff_dim
        or small.outer_cap > big.outer_cap
        or small.inner_cap > big.inner_cap
    ):
        raise GradeError("grades do not nest")
    pos = big.index_of
    return np.array([pos[t] for t in small.indices])


def lift_dense(small: Grade, big: Grade, vectors: np.ndarray) -> np.ndarray:
    idx = embedding_positions(small, big)
    lifted = np.zeros((big.dim, vectors.shape[1]), dtype=complex)
    lifted[idx, :] = vectors
    return lifted


def restrict_dense(small: Grade, big: Grade, vectors: np.ndarray) -> np.ndarray:
    return vectors[embedding_positions(small, big), :]


def _monomial_orbit_columns(gw: Grade, dense_gens: Sequence[np.ndarray]) -> np.ndarray:
    """All monomial multiples of the generators that fit the caps of ``gw``."""
    shifts = [shift_matrix(gw, axis).entries for axis in range(gw.n + 1)]
    cols: list[np.ndarray] = []
    for vec in dense_gens:
        support = [t for t, c in zip(gw.indices, vec) if abs(c) > 1e-14]
        deg_outer = max(t[0] for t in support)
        deg_inner = [max(t[1 + i] for t in support) for i in range(gw.n)]
        powers = [vec]
        for _ in range(gw.outer_cap - deg_outer):
            powers.append(shifts[0] @ powers[-1])
        for base in powers:
            stack = [base]
            for i in range(gw.n):
                grown: list[np.ndarray] = []
                for w in stack:
                    grown.append(w)
                    cur = w
                    for _ in range(gw.inner_cap - deg_inner[i]):
                        cur = shifts[1 + i] @ cur
                        grown.append(cur)
                stack = grown
            cols.extend(stack)
    return np.stack(cols, axis=1)


def orbit_span(
    generators: Sequence[HardyVector],
    grade: Grade,
    working_margin: int = DEFAULT_MARGIN,
    labels: Sequence[str] = (),
) -> SubspaceBasis:
    """Capped slice of the smallest joint invariant subspace containing the
    generators, spanned in an enlarged working grade and intersected with the
    target caps."""
    if not generators:
        raise DegenerateInputError("empty generator list")
    if working_margin < 0:
        raise GradeError("working margin must be nonnegative")
    cleaned = []
    for g in generators:
        if g.grade != grade:
            raise GradeError("generator grade does not match the target grade")
        if g.coeffs:
            cleaned.append(g)
    if not cleaned:
        raise DegenerateInputError("generators span {0} after cleanup")
    for g in cleaned:
        if g.outer_degree() > grade.outer_cap or any(
            b > grade.inner_cap for b in g.inner_degrees()
        ):
            raise GradeError("generator degree too high for the grade")
    gw = Grade(
        grade.n,
        grade.outer_cap + working_margin,
        grade.inner_cap + working_margin,
        grade.coeff_dim,
        grade.safe_margin,
    )
    dense = [lift_dense(grade, gw, g.to_dense()[:, None])[:, 0] for g in cleaned]
    working = orthonormal_columns(_monomial_orbit_columns(gw, dense))
    keep = np.zeros(gw.dim, dtype=bool)
    keep[embedding_positions(grade, gw)] = True
    sliced = restrict_dense(grade, gw, coordinate_slice(working, keep))
    organized, n_safe = organize_basis(grade, orthonormal_columns(sliced))
    if organized.shape[1] == 0:
        raise DegenerateInputError("generators produce an empty capped slice")
    prov = Provenance(
        kind="orbit",
        generators=tuple(cleaned),
        labels=tuple(labels),
        margin=working_margin,
        working_caps=(gw.outer_cap, gw.inner_cap),
    )
    return SubspaceBasis(grade, organized, prov, n_certified=n_safe)


def orbit_stability(
    generators: Sequence[HardyVector],
    grade: Grade,
    working_margin: int = DEFAULT_MARGIN,
) -> tuple[SubspaceBasis, bool]:
    """Orbit plus the margin-stability flag (re-run at margin + 1)."""
    base = orbit_span(generators, grade, working_margin)
    probe = orbit_span(generators, grade, working_margin + 1)
    return base, probe.dim == base.dim


def _naive_wandering(mz: np.ndarray, basis: np.ndarray) -> np.ndarray:
    shifted = orthonormal_columns(mz @ basis)
    if shifted.shape[1] == 0:
        return basis
    overlap = shifted.conj().T @ basis
    _, s, vh = np.linalg.svd(overlap, full_matrices=True)
    null = vh.conj().T[:, int((s > SVD_CUTOFF).sum()):]
    return orthonormal_columns(basis @ null)


def wandering_subspace(s: SubspaceBasis) -> SubspaceBasis:
    """Basis of S ⊖ zS; certified block first, truncation-suspect block after.

    When the input carries orbit provenance, the wandering space is computed
    at the recorded working grade and sliced to the target caps so that every
    returned vector is genuinely wandering; otherwise it is computed directly
    at the target grade.
    """
    grade = s.grade
    report = check_invariant(s, [shift_matrix(grade, 0)])
    if not report.verdict:
        raise NotInvariantError(
            f"subspace is not invariant under the outer shift "
            f"(residual {max(report.residuals):.2e})"
        )
    prov = s.provenance
    if prov.kind == "orbit" and prov.generators:
        gw = Grade(
            grade.n,
            prov.working_caps[0],
            prov.working_caps[1],
            grade.coeff_dim,
            grade.safe_margin,
        )
        dense = [
            lift_dense(grade, gw, g.to_dense()[:, None])[:, 0] for g in prov.generators
        ]
        working = orthonormal_columns(_monomial_orbit_columns(gw, dense))
        ww = _naive_wandering(shift_matrix(gw, 0).entries, working)
        keep = np.zeros(gw.dim, dtype=bool)
        keep[embedding_positions(grade, gw)] = True
        wt = orthonormal_columns(restrict_dense(grade, gw, coordinate_slice(ww, keep)))
    else:
        wt = _naive_wandering(shift_matrix(grade, 0).entries, s.columns)
    organized, n_cert = organize_basis(grade, wt)
    return SubspaceBasis(
        grade,
        organized,
        Provenance(
            kind="wandering",
            generators=prov.generators,
            labels=prov.labels,
            margin=prov.margin,
            working_caps=prov.working_caps,
        ),
        n_certified=n_cert,
    )


def safe_column_mask(s: SubspaceBasis) -> np.ndarray:
    """Columns of the stored basis fully supported on the safe band."""
    unsafe = ~s.grade.safe_mask
    return np.array(
        [bool(np.all(np.abs(s.columns[unsafe, j]) < _SUPPORT_TOL)) for j in range(s.dim)]
    )


def check_invariant(
    s: SubspaceBasis,
    operators: Sequence[OperatorMatrix],
    tolerance: float = INVARIANCE_TOL,
) -> InvarianceReport:
    """Per-operator residual ``‖(I − P_S)·T·B_safe‖`` over safe-supported columns."""
    for op in operators:
        if op.domain != s.grade or op.codomain != s.grade:
            raise GradeError("operator grade does not match the subspace grade")
    mask = safe_column_mask(s)
    b_safe = s.columns[:, mask]
    residuals = []
    for op in operators:
        image = op.entries @ b_safe
        residuals.append(
            spectral_norm(image - s.columns @ (s.columns.conj().T @ image))
        )
    verdict = all(r < tolerance for r in residuals)
    return InvarianceReport(tuple(residuals), verdict, tolerance, int(mask.sum()))


def build_from_theta(theta, grade: Grade) -> SubspaceBasis:
    """Orthonormal basis of the image of multiplication by Θ on the capped
    one-variable Hardy space with wandering coefficients, intersected with
    the target caps."""
    from .blh import is_isometric_multiplier  # local import to avoid a cycle

    iso = is_isometric_multiplier(theta)
    if not iso.verdict:
        from .errors import NotIsometricError

        raise NotIsometricError(
            f"theta is not an isometric multiplier (residual {iso.max_residual:.2e})"
        )
    slot = grade.inner_slot_dim
    if theta.coeffs[0].shape[0] != slot:
        raise GradeError("theta codomain does not match the grade's inner slot")
    if theta.degree > grade.outer_cap:
        raise GradeError("theta degree exceeds the outer cap")
    # wandering columns at the target grade, one per domain coordinate
    inner_positions = [i for i, t in enumerate(grade.indices) if t[0] == 0]
    r = theta.coeffs[0].shape[1]
    w_cols = np.zeros((grade.dim, r), dtype=complex)
    outer_step = shift_matrix(grade, 0).entries
    lift = np.zeros((grade.dim, slot), dtype=complex)
    lift[inner_positions, :] = np.eye(slot)
    for m, coeff in enumerate(theta.coeffs):
        w_cols += np.linalg.matrix_power(outer_step, m) @ (lift @ coeff)
    # image columns generated in an outer-enlarged working grade, then sliced
    gw = Grade(
        grade.n,
        grade.outer_cap + grade.n * grade.inner_cap,
        grade.inner_cap,
        grade.coeff_dim,
        grade.safe_margin,
    )
    lifted = lift_dense(grade, gw, w_cols)
    mzw = shift_matrix(gw, 0).entries
    cols: list[np.ndarray] = []
    for j in range(r):
        deg = max(
            (t[0] for t, c in zip(grade.indices, w_cols[:, j]) if abs(c) > _SUPPORT_TOL),
            default=0,
        )
        cur = lifted[:, j]
        for _ in range(gw.outer_cap - deg + 1):
            cols.append(cur)
            cur = mzw @ cur
    span = orthonormal_columns(np.stack(cols, axis=1))
    keep = np.zeros(gw.dim, dtype=bool)
    keep[embedding_positions(grade, gw)] = True
    sliced = restrict_dense(grade, gw, coordinate_slice(span, keep))
    organized, n_safe = organize_basis(grade, orthonormal_columns(sliced))
    prov = Provenance(kind="theta-image", working_caps=(gw.outer_cap, gw.inner_cap))
    return SubspaceBasis(grade, organized, prov, n_certified=n_safe)


def wold_reconstruction(s: SubspaceBasis, tolerance: float = INVARIANCE_TOL) -> WoldReport:
    """Residual of ``P_S − Σ_m M_z^m P_W M_z^{*m}`` on the target safe band.

    Computed at a dedicated grade large enough to hold every wandering
    stratum the target safe band touches, plus one cleaning degree.
    """
    prov = s.provenance
    if prov.kind != "orbit" or not prov.generators:
        raise GradeError("wold reconstruction needs orbit provenance")
    grade = s.grade
    caps = (grade.outer_cap - 1) + grade.n * (grade.inner_cap - 1) + 1
    gb = Grade(grade.n, caps, caps, grade.coeff_dim, grade.safe_margin)
    dense = [lift_dense(grade, gb, g.to_dense()[:, None])[:, 0] for g in prov.generators]
    sb = orthonormal_columns(_monomial_orbit_columns(gb, dense))
    wb = _naive_wandering(shift_matrix(gb, 0).entries, sb)
    inner_caps_mask = np.array(
        [all(x <= caps - 1 for x in t[:-1]) for t in gb.indices]
    )
    wc = coordinate_slice(wb, inner_caps_mask)
    mz = shift_matrix(gb, 0).entries
    reconstruction = np.zeros((gb.dim, gb.dim), dtype=complex)
    cur = wc
    for _ in range(caps + 1):
        reconstruction += cur @ cur.conj().T
        cur = mz @ cur
    defect = sb @ sb.conj().T - reconstruction
    embed_cols = embedding_positions(grade, gb)[grade.safe_mask]
    compressed = defect[np.ix_(embed_cols, embed_cols)]
    residual = spectral_norm(compressed)
    return WoldReport(
        residual=residual,
        verdict=residual < tolerance,
        tolerance=tolerance,
        reconstruction_caps=caps,
        safe_band_dim=int(grade.safe_mask.sum()),
    )


def principal_angle_sines(b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Sines of the min(d1, d2) principal angles, descending.

    Computed as singular values of the projection residual of the smaller
    basis against the larger span, which is stable near zero.
    """
    c1 = np.asarray(getattr(b1, "columns", b1), dtype=complex)
    c2 = np.asarray(getattr(b2, "columns", b2), dtype=complex)
    if c1.shape[1] == 0 or c2.shape[1] == 0:
        return np.zeros(0)
    small, big = (c1, c2) if c1.shape[1] <= c2.shape[1] else (c2, c1)
    residual = small - big @ (big.conj().T @ small)
    sines = np.linalg.svd(residual, compute_uv=False)
    return np.clip(sines, 0.0, 1.0)


def max_principal_angle_sine(b1, b2) -> float:
    sines = principal_angle_sines(b1, b2)
    return float(sines[0]) if sines.size else 0.0


def subspace_from_columns(
    grade: Grade, columns: np.ndarray, kind: str = "adhoc"
) -> SubspaceBasis:
    organized, n_safe = organize_basis(grade, orthonormal_columns(columns))
    return SubspaceBasis(grade, organized, Provenance(kind=kind), n_certified=n_safe)
