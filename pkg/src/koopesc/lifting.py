"""Polynomial lifting, least-squares operator fit, and dominant-mode projection.

The two-dimensional measured state is lifted to the ten monomials of degree
<= 3; a linear one-step operator K is fitted over snapshot pairs of lifted
states by least squares; the eigenmodes of K are ranked by their average
energy in the training data and the top ones span the dominant subspace.
The squared norm of a measurement's coordinates in that subspace is the
lifted cost used by the controller.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Monomial dictionary: fixed degree 3 in (x, y), in this exact order.
LIFT_DEGREE = 3
LIFT_DIM = 10
LIFT_ORDER = ("1", "x", "y", "x^2", "xy", "y^2", "x^3", "x^2y", "xy^2", "y^3")

DEFAULT_SVD_CUTOFF = 1e-10

# Tolerances for recognizing conjugate eigenvalue pairs of a real operator.
_IMAG_TOL = 1e-12
_PAIR_TOL = 1e-8


class KoopmanFitError(RuntimeError):
    """Least-squares fit failed; carries rank/conditioning diagnostics."""

    def __init__(self, message: str, rank: int | None = None, cond: float | None = None):
        detail = message
        if rank is not None:
            detail += f" (rank={rank}"
            if cond is not None:
                detail += f", cond={cond:.3g}"
            detail += ")"
        super().__init__(detail)
        self.rank = rank
        self.cond = cond


def lift(x: float, y: float) -> np.ndarray:
    """Monomial vector [1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3].

    Exact: products only, so integer inputs give integer-valued outputs.
    """
    xx = x * x
    xy = x * y
    yy = y * y
    return np.array([1.0, x, y, xx, xy, yy, xx * x, xx * y, x * yy, yy * y])


def lift_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Column-per-sample lifting of equal-length coordinate arrays -> (10, n)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx = x * x
    xy = x * y
    yy = y * y
    return np.stack(
        [np.ones_like(x), x, y, xx, xy, yy, xx * x, xx * y, x * yy, yy * y]
    )


@dataclass(frozen=True)
class SnapshotMatrices:
    """Lifted snapshot pairs: column k of psi_y is the successor of column k of psi_x."""

    psi_x: np.ndarray  # (p, M)
    psi_y: np.ndarray  # (p, M)
    m: int


def build_snapshots(trajectories) -> SnapshotMatrices:
    """Assemble snapshot matrices from measured-state time series.

    ``trajectories`` is a sequence of (n_i, 2) arrays; consecutive rows within
    a trajectory form one snapshot pair, and pairs never straddle trajectory
    boundaries.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories given")
    xs, ys = [], []
    for i, traj in enumerate(trajectories):
        arr = np.asarray(traj, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"trajectory {i} is not an (n, 2) series")
        if arr.shape[0] < 2:
            raise ValueError(f"trajectory {i} has fewer than 2 samples")
        psi = lift_array(arr[:, 0], arr[:, 1])
        xs.append(psi[:, :-1])
        ys.append(psi[:, 1:])
    psi_x = np.concatenate(xs, axis=1)
    psi_y = np.concatenate(ys, axis=1)
    return SnapshotMatrices(psi_x=psi_x, psi_y=psi_y, m=psi_x.shape[1])


def fit_koopman(s: SnapshotMatrices, svd_cutoff: float = DEFAULT_SVD_CUTOFF) -> np.ndarray:
    """Minimizer of ||psi_y - K psi_x||_F via the SVD pseudoinverse.

    Singular values below ``svd_cutoff`` times the largest are truncated,
    which yields the minimum-norm solution when psi_x is row-rank deficient.
    """
    try:
        u, sv, vt = np.linalg.svd(s.psi_x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise KoopmanFitError(f"SVD of snapshot matrix failed: {exc}") from exc
    if not np.all(np.isfinite(sv)) or sv[0] <= 0.0:
        raise KoopmanFitError("degenerate snapshot matrix", rank=0)
    keep = sv > svd_cutoff * sv[0]
    rank = int(np.count_nonzero(keep))
    cond = float(sv[0] / sv[keep][-1])
    k = ((s.psi_y @ vt[keep].T) / sv[keep]) @ u[:, keep].T
    if not np.all(np.isfinite(k)):
        raise KoopmanFitError("non-finite operator from fit", rank=rank, cond=cond)
    return k


def eigendecompose(k_matrix: np.ndarray):
    """Eigenvalues and unit-norm right eigenvectors (columns) of K."""
    eigenvalues, v = np.linalg.eig(k_matrix)
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    return eigenvalues, v


def mode_energies(
    right_eigvecs: np.ndarray,
    psi_x: np.ndarray,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
    _chunk: int = 1 << 18,
) -> np.ndarray:
    """Average squared magnitude of each mode coefficient over the snapshots.

    The coefficients are C = pinv(V) @ psi_x; E_j = mean_k |C[j, k]|^2.
    Computed in column chunks to bound memory on large snapshot sets.
    """
    v_pinv = np.linalg.pinv(right_eigvecs, rcond=svd_cutoff)
    p = right_eigvecs.shape[0]
    m = psi_x.shape[1]
    total = np.zeros(p)
    for start in range(0, m, _chunk):
        c = v_pinv @ psi_x[:, start : start + _chunk]
        total += (c.real * c.real + c.imag * c.imag).sum(axis=1)
    return total / m


def conjugate_partners(eigenvalues: np.ndarray) -> np.ndarray:
    """Index of each eigenvalue's conjugate partner, or -1 for real/unpaired.

    Partners are mutual nearest matches of lambda_j ~= conj(lambda_i) within
    a small tolerance; real eigenvalues (negligible imaginary part) get -1.
    """
    eigenvalues = np.asarray(eigenvalues)
    n = eigenvalues.shape[0]
    partner = np.full(n, -1, dtype=int)
    scale = np.maximum(1.0, np.abs(eigenvalues))
    complex_idx = [i for i in range(n) if abs(eigenvalues[i].imag) > _IMAG_TOL * scale[i]]
    for i in complex_idx:
        best, best_d = -1, np.inf
        for j in complex_idx:
            if j == i:
                continue
            d = abs(eigenvalues[j] - np.conj(eigenvalues[i]))
            if d < best_d:
                best, best_d = j, d
        if best >= 0 and best_d <= _PAIR_TOL * (1.0 + abs(eigenvalues[i])):
            partner[i] = best
    # keep only mutual matches
    for i in range(n):
        if partner[i] >= 0 and partner[partner[i]] != i:
            partner[i] = -1
    return partner


def select_dominant(
    eigenvalues: np.ndarray,
    right_eigvecs: np.ndarray,
    energies: np.ndarray,
    n_modes: int,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
):
    """Pick the ``n_modes`` highest-energy modes, never splitting a conjugate pair.

    Ties break by ascending index.  If the cutoff would land mid-pair the pair
    is kept whole (selection widens by one) and a warning is emitted.  Returns
    (dominant_indices, v_dom, v_dom_pinv) with indices in ascending order.
    """
    p = right_eigvecs.shape[0]
    if not 1 <= n_modes <= p:
        raise ValueError(f"n_modes must be in [1, {p}], got {n_modes}")
    order = sorted(range(p), key=lambda j: (-energies[j], j))
    selected = set(order[:n_modes])
    partner = conjugate_partners(eigenvalues)
    widened = [j for j in sorted(selected) if partner[j] >= 0 and partner[j] not in selected]
    for j in widened:
        selected.add(partner[j])
    if widened:
        warnings.warn(
            f"selection widened from {n_modes} to {len(selected)} modes to keep "
            "a conjugate eigenvalue pair together",
            RuntimeWarning,
            stacklevel=2,
        )
    indices = sorted(selected)
    v_dom = right_eigvecs[:, indices]
    v_dom_pinv = np.linalg.pinv(v_dom, rcond=svd_cutoff)
    return indices, v_dom, v_dom_pinv


@dataclass(frozen=True)
class KoopmanModel:
    """Fitted operator plus everything needed for the lifted cost."""

    k_matrix: np.ndarray  # (p, p) real
    eigenvalues: np.ndarray  # (p,) complex
    right_eigvecs: np.ndarray  # (p, p) complex, unit-norm columns
    energies: np.ndarray  # (p,) nonnegative
    dominant_indices: tuple  # ascending mode indices
    v_dom: np.ndarray  # (p, N) complex
    v_dom_pinv: np.ndarray  # (N, p) complex
    svd_cutoff: float = DEFAULT_SVD_CUTOFF

    @property
    def p(self) -> int:
        return self.k_matrix.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.dominant_indices)


def build_model(
    k_matrix: np.ndarray,
    psi_x: np.ndarray,
    n_modes: int,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
) -> KoopmanModel:
    """Eigendecompose K, rank modes by energy on psi_x, and finalize the model."""
    eigenvalues, v = eigendecompose(k_matrix)
    energies = mode_energies(v, psi_x, svd_cutoff)
    indices, v_dom, v_dom_pinv = select_dominant(eigenvalues, v, energies, n_modes, svd_cutoff)
    return KoopmanModel(
        k_matrix=k_matrix,
        eigenvalues=eigenvalues,
        right_eigvecs=v,
        energies=energies,
        dominant_indices=tuple(indices),
        v_dom=v_dom,
        v_dom_pinv=v_dom_pinv,
        svd_cutoff=svd_cutoff,
    )


def coordinate_energy(z: np.ndarray, model: KoopmanModel) -> float:
    """Squared norm of the dominant-subspace coordinates of a lifted vector."""
    c = model.v_dom_pinv @ z
    return float(np.sum(c.real * c.real + c.imag * c.imag))


def project_energy(x_m: float, y_m: float, model: KoopmanModel) -> float:
    """Lift a measured state and return its dominant-subspace energy (>= 0)."""
    return coordinate_energy(lift(x_m, y_m), model)


# ---------------------------------------------------------------------------
# Model file I/O: line-oriented UTF-8 text, full double precision, so a saved
# model reloads (and re-saves) byte-identically.

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_model(model: KoopmanModel, path) -> None:
    p = model.p
    lines = [
        f"p={p}",
        f"n_modes={model.n_modes}",
        f"svd_cutoff={_fmt(model.svd_cutoff)}",
        "K:",
    ]
    for row in model.k_matrix:
        lines.append(" ".join(_fmt(v) for v in row))
    lines.append("eigvals:")
    for lam in model.eigenvalues:
        lines.append(f"{_fmt(lam.real)} {_fmt(lam.imag)}")
    lines.append("V:")
    for row in model.right_eigvecs:
        lines.append(" ".join(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in row))
    lines.append("E:")
    lines.append(" ".join(_fmt(v) for v in model.energies))
    lines.append("selected:")
    lines.append(" ".join(str(i) for i in model.dominant_indices))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> KoopmanModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    try:
        header = dict(ln.split("=", 1) for ln in lines[:3])
        p = int(header["p"])
        n_modes = int(header["n_modes"])
        svd_cutoff = float(header["svd_cutoff"])
        idx = 3

        def block(tag, count):
            nonlocal idx
            if lines[idx] != tag:
                raise ValueError(f"expected block {tag!r}, found {lines[idx]!r}")
            idx += 1
            rows = lines[idx : idx + count]
            idx += count
            return rows

        k = np.array([[float(v) for v in row.split()] for row in block("K:", p)])
        ev_rows = [[float(v) for v in row.split()] for row in block("eigvals:", p)]
        eigenvalues = np.array([complex(re, im) for re, im in ev_rows])
        v_rows = [[float(v) for v in row.split()] for row in block("V:", p)]
        v = np.array([[complex(r[2 * j], r[2 * j + 1]) for j in range(p)] for r in v_rows])
        energies = np.array([float(v_) for v_ in block("E:", 1)[0].split()])
        indices = tuple(int(i) for i in block("selected:", 1)[0].split())
    except (KeyError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed model file {path}: {exc}") from exc
    if len(indices) != n_modes:
        raise ValueError(f"model file {path}: selected count != n_modes header")
    v_dom = v[:, list(indices)]
    v_dom_pinv = np.linalg.pinv(v_dom, rcond=svd_cutoff)
    return KoopmanModel(
        k_matrix=k,
        eigenvalues=eigenvalues,
        right_eigvecs=v,
        energies=energies,
        dominant_indices=indices,
        v_dom=v_dom,
        v_dom_pinv=v_dom_pinv,
        svd_cutoff=svd_cutoff,
    )
