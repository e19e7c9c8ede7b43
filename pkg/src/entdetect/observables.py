"""Operator bases, commuting classes, unbiased-basis projectors and Bloch data.

Supported systems are 2x2, 2x3 and 3x3.  Four basis kinds are built here:

* ``su-product``   -- tensor products of SU(d) generators, uniformly normalized.
* ``table1-pauli`` -- products of shift/clock powers with the printed integer
  labelling; non-Hermitian entries are replaced for measurement purposes by an
  orthogonal Hermitian pair per adjoint-conjugate label pair (the raw
  unitaries stay available as ``unitaries``).
* ``mub-projectors`` -- rank-1 projectors onto the common eigenbases of the
  maximally commuting classes (2x2 and 3x3 only).
* ``optimal-2x3``  -- 35 informationally complete projectors organized into 7
  complete 6-outcome measurements for the qubit-qutrit system.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .linalg import Dims, dagger, herm_coords as _herm_coords, hermitize, hs_inner, kron

SUPPORTED_DIMS = ((2, 2), (2, 3), (3, 3))

# ---------------------------------------------------------------------------
# SU(d) generators
# ---------------------------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def su_generators(d: int) -> list[np.ndarray]:
    """Traceless Hermitian generators with Tr(g_i g_j) = 2 delta_ij.

    d=2 gives the three Pauli matrices, d=3 the eight Gell-Mann matrices.
    """
    if d == 2:
        return [PAULI_X.copy(), PAULI_Y.copy(), PAULI_Z.copy()]
    if d == 3:
        gm = []
        # symmetric and antisymmetric off-diagonal pairs
        for j, k in ((0, 1), (0, 2), (1, 2)):
            s = np.zeros((3, 3), dtype=complex)
            s[j, k] = s[k, j] = 1
            gm.append(s)
            a = np.zeros((3, 3), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            gm.append(a)
        gm.append(np.diag([1, -1, 0]).astype(complex))
        gm.append(np.diag([1, 1, -2]).astype(complex) / np.sqrt(3))
        return gm
    raise ValueError(f"unsupported dimension {d}")


# ---------------------------------------------------------------------------
# Shift/clock operators and the printed label tables
# ---------------------------------------------------------------------------


def shift_clock(d: int) -> dict[str, np.ndarray]:
    """Shift X, clock Z, and the products Y = XZ and (d>2) V = XZ^2.

    Z uses the primitive root exp(2 pi i / d); at d=2 X and Z reduce to the
    usual Pauli matrices.
    """
    if d not in (2, 3):
        raise ValueError(f"unsupported dimension {d}")
    x = np.zeros((d, d), dtype=complex)
    for j in range(d):
        x[(j + 1) % d, j] = 1.0
    omega = np.exp(2j * np.pi / d)
    z = np.diag([omega**j for j in range(d)])
    ops = {"X": x, "Z": z, "Y": x @ z}
    if d > 2:
        ops["V"] = x @ z @ z
    return ops


def _single_system_ops(d: int) -> tuple[list[str], list[np.ndarray]]:
    """Row/column header operators of the printed tables, in printed order."""
    sc = shift_clock(d)
    if d == 2:
        names = ["I", "Z", "X", "Y"]
        mats = [np.eye(2, dtype=complex), sc["Z"], sc["X"], sc["Y"]]
    else:
        names = ["I", "Z", "X", "Y", "V", "Z2", "X2", "Y2", "V2"]
        base = [sc["Z"], sc["X"], sc["Y"], sc["V"]]
        mats = [np.eye(3, dtype=complex)] + base + [m @ m for m in base]
    return names, mats


# label grids exactly as printed; rows/cols follow _single_system_ops order.
_GRID_2x2 = [
    [0, 13, 14, 15],
    [1, 4, 7, 10],
    [2, 5, 8, 11],
    [3, 6, 9, 12],
]
# 2x3 grid: rows run over the qutrit operators, columns over the qubit ones.
_GRID_2x3 = [
    [0, 33, 34, 35],
    [1, 9, 17, 25],
    [2, 10, 18, 26],
    [3, 11, 19, 27],
    [4, 12, 20, 28],
    [5, 13, 21, 29],
    [6, 14, 22, 30],
    [7, 15, 23, 31],
    [8, 16, 24, 32],
]
_GRID_3x3 = [
    [0, 73, 74, 75, 76, 77, 78, 79, 80],
    [1, 9, 17, 25, 33, 41, 49, 57, 65],
    [2, 10, 18, 26, 34, 42, 50, 58, 66],
    [3, 11, 19, 27, 35, 43, 51, 59, 67],
    [4, 12, 20, 28, 36, 44, 52, 60, 68],
    [5, 13, 21, 29, 37, 45, 53, 61, 69],
    [6, 14, 22, 30, 38, 46, 54, 62, 70],
    [7, 15, 23, 31, 39, 47, 55, 63, 71],
    [8, 16, 24, 32, 40, 48, 56, 64, 72],
]

_CLASSES = {
    (2, 2): [
        [1, 4, 13],
        [2, 8, 14],
        [3, 12, 15],
        [5, 9, 10],
        [6, 7, 11],
    ],
    (2, 3): [
        [1, 5, 33, 9, 13],
        [2, 6, 33, 10, 14],
        [3, 7, 33, 11, 15],
        [4, 8, 33, 12, 16],
        [1, 5, 34, 17, 21],
        [2, 6, 34, 18, 22],
        [3, 7, 34, 19, 23],
        [4, 8, 34, 20, 24],
        [1, 5, 35, 25, 29],
        [2, 6, 35, 26, 30],
        [3, 7, 35, 27, 31],
        [4, 8, 35, 28, 32],
    ],
    (3, 3): [
        [1, 5, 73, 9, 13, 77, 41, 45],
        [2, 6, 74, 18, 22, 78, 50, 54],
        [3, 7, 75, 27, 31, 79, 59, 63],
        [4, 8, 76, 36, 40, 80, 68, 72],
        [10, 46, 33, 19, 32, 69, 60, 55],
        [11, 47, 17, 28, 38, 53, 66, 64],
        [12, 48, 25, 34, 23, 61, 51, 70],
        [14, 42, 29, 20, 39, 57, 67, 56],
        [15, 43, 37, 26, 24, 65, 52, 62],
        [16, 44, 21, 35, 30, 49, 58, 71],
    ],
}


def _check_dims(dims: Dims) -> None:
    if tuple(dims) not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported dims {dims}")


def table_labelled_unitaries(dims: Dims) -> dict[int, tuple[str, str, np.ndarray]]:
    """Label -> (A-side name, B-side name, operator) for the printed tables.

    For 2x2 and 3x3 the printed rows act on subsystem A and columns on B; the
    2x3 table is printed transposed (rows carry the qutrit operators), so
    there columns act on A (qubit) and rows on B (qutrit).
    """
    _check_dims(dims)
    da, db = dims
    if dims == (2, 2):
        grid, (row_names, row_ops), (col_names, col_ops), rows_are_a = (
            _GRID_2x2, _single_system_ops(2), _single_system_ops(2), True)
    elif dims == (2, 3):
        grid, (row_names, row_ops), (col_names, col_ops), rows_are_a = (
            _GRID_2x3, _single_system_ops(3), _single_system_ops(2), False)
    else:
        grid, (row_names, row_ops), (col_names, col_ops), rows_are_a = (
            _GRID_3x3, _single_system_ops(3), _single_system_ops(3), True)

    out: dict[int, tuple[str, str, np.ndarray]] = {}
    for r, row in enumerate(grid):
        for c, label in enumerate(row):
            if rows_are_a:
                a_name, b_name = row_names[r], col_names[c]
                op = kron(row_ops[r], col_ops[c])
            else:
                a_name, b_name = col_names[c], row_names[r]
                op = kron(col_ops[c], row_ops[r])
            out[label] = (a_name, b_name, op)
    return out


# ---------------------------------------------------------------------------
# Observable basis container
# ---------------------------------------------------------------------------


@dataclass
class ObservableBasis:
    """Ordered family of Hermitian measurement operators with integer labels.

    ``ops[i]`` is what gets measured under ``labels[i]``.  For projector kinds
    ``measurements`` groups the full outcome sets (each summing to identity);
    ``ops`` then lists only the independent projectors.  For the labelled
    product tables ``unitaries`` retains the printed, generally non-Hermitian
    operators.
    """

    dims: Dims
    kind: str
    ops: list[np.ndarray]
    labels: list[int]
    names: list[str] = field(default_factory=list)
    unitaries: dict[int, np.ndarray] = field(default_factory=dict)
    measurements: list[list[np.ndarray]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.ops)

    def op_for_label(self, label: int) -> np.ndarray:
        return self.ops[self.labels.index(label)]

    def is_projector_kind(self) -> bool:
        return self.kind in ("mub-projectors", "optimal-2x3")


@dataclass
class MeasurementRecord:
    """Ordered (basis index, exact expectation value) pairs -- the known data."""

    basis: ObservableBasis
    entries: list[tuple[int, float]]

    def __post_init__(self) -> None:
        idx = [k for k, _ in self.entries]
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate measurement indices")
        if self.basis.is_projector_kind():
            for k, v in self.entries:
                if not -1e-10 <= v <= 1 + 1e-10:
                    raise ValueError(f"projector value {v} at index {k} outside [0, 1]")

    def indices(self) -> list[int]:
        return [k for k, _ in self.entries]


def su_product_basis(dims: Dims) -> ObservableBasis:
    """Tensor products of SU(d) generators (identity excluded), all scaled to
    a common Hilbert-Schmidt norm Tr(P^2) = dim."""
    _check_dims(dims)
    da, db = dims
    d = da * db
    ga = [np.eye(da, dtype=complex)] + su_generators(da)
    gb = [np.eye(db, dtype=complex)] + su_generators(db)
    ops, labels, names = [], [], []
    for i in range(da * da):
        for j in range(db * db):
            if i == 0 and j == 0:
                continue
            p = kron(ga[i], gb[j])
            p *= np.sqrt(d / hs_inner(p, p))
            ops.append(p)
            labels.append(i * db * db + j)
            names.append(f"s{i}xs{j}")
    return ObservableBasis(dims=dims, kind="su-product", ops=ops, labels=labels, names=names)


def su_product_nonlocal_labels(dims: Dims) -> list[int]:
    """Labels of the correlation-type entries (both factors non-identity)."""
    da, db = dims
    return [i * db * db + j for i in range(1, da * da) for j in range(1, db * db)]


def _hermitize_table(dims: Dims, table: dict[int, tuple[str, str, np.ndarray]]
                     ) -> tuple[list[np.ndarray], list[str]]:
    """One Hermitian operator per non-identity label, orthogonal and uniformly
    normalized to Tr(O^2) = dim.

    Hermitian entries are kept; anti-Hermitian ones are multiplied by i; each
    remaining adjoint-conjugate pair (l < l') is replaced by the orthogonal
    pair (P + P^dag)/sqrt(2) at l and (P - P^dag)/(i sqrt(2)) at l'.
    """
    d = dims[0] * dims[1]
    labels = sorted(k for k in table if k != 0)
    ops: dict[int, np.ndarray] = {}
    names: dict[int, str] = {}
    done: set[int] = set()
    for lab in labels:
        if lab in done:
            continue
        a_name, b_name, p = table[lab]
        pd = dagger(p)
        base = f"{a_name}(x){b_name}"
        if np.max(np.abs(p - pd)) < 1e-12:
            ops[lab], names[lab] = p.copy(), base
            done.add(lab)
            continue
        if np.max(np.abs(p + pd)) < 1e-12:
            ops[lab], names[lab] = 1j * p, f"i.{base}"
            done.add(lab)
            continue
        partner = None
        for lab2 in labels:
            if lab2 in done or lab2 == lab:
                continue
            if abs(np.trace(dagger(table[lab2][2]) @ pd)) > d - 1e-9:
                partner = lab2
                break
        if partner is None:
            raise RuntimeError(f"no adjoint partner found for label {lab}")
        ops[lab] = (p + pd) / np.sqrt(2)
        ops[partner] = (p - pd) / (1j * np.sqrt(2))
        names[lab] = f"re.{base}"
        names[partner] = f"im.{base}"
        done.update((lab, partner))
    return [ops[k] for k in labels], [names[k] for k in labels]


def table1_basis(dims: Dims) -> ObservableBasis:
    """Labelled complete operator basis from the printed shift/clock tables."""
    table = table_labelled_unitaries(dims)
    ops, names = _hermitize_table(dims, table)
    labels = sorted(k for k in table if k != 0)
    return ObservableBasis(
        dims=dims, kind="table1-pauli", ops=ops, labels=labels, names=names,
        unitaries={k: v[2] for k, v in table.items()},
    )


# ---------------------------------------------------------------------------
# Commuting classes and their common eigenbases
# ---------------------------------------------------------------------------


@dataclass
class CommutingClass:
    """Mutually commuting table labels together with a joint eigenbasis."""

    labels: list[int]
    common_basis: np.ndarray  # orthonormal columns


def _joint_eigenbasis(unitaries: list[np.ndarray], seed: int = 7) -> np.ndarray:
    """Simultaneously diagonalize a family of commuting normal matrices.

    Diagonalizes a random Hermitian combination of the family's Hermitian and
    anti-Hermitian parts; retries with a fresh combination if any member fails
    to come out diagonal (degenerate draw).  Columns are sorted by the joint
    eigenvalue pattern, making the result independent of the draw.
    """
    n = unitaries[0].shape[0]
    rng = np.random.default_rng(seed)
    for _ in range(32):
        h = np.zeros((n, n), dtype=complex)
        for u in unitaries:
            h += rng.standard_normal() * (u + dagger(u)) / 2
            h += rng.standard_normal() * (u - dagger(u)) / 2j
        _, vecs = np.linalg.eigh(hermitize(h))
        diag_ok = all(
            np.max(np.abs(dagger(vecs) @ u @ vecs - np.diag(np.diag(dagger(vecs) @ u @ vecs)))) < 1e-8
            for u in unitaries
        )
        if not diag_ok:
            continue
        cols = []
        for u in unitaries:
            ev = np.diag(dagger(vecs) @ u @ vecs)
            cols.extend([np.round(ev.real, 6), np.round(ev.imag, 6)])
        pattern = np.stack(cols, axis=1)
        order = np.lexsort(pattern.T[::-1])
        vecs = vecs[:, order]
        # fix global phases: largest-magnitude entry made real positive
        for c in range(n):
            k = int(np.argmax(np.abs(vecs[:, c])))
            vecs[:, c] *= np.exp(-1j * np.angle(vecs[k, c]))
        return vecs
    raise RuntimeError("simultaneous diagonalization failed to converge")


def commuting_classes(dims: Dims) -> list[CommutingClass]:
    """The printed maximally commuting classes with verified joint eigenbases."""
    _check_dims(dims)
    table = table_labelled_unitaries(dims)
    out = []
    for class_labels in _CLASSES[tuple(dims)]:
        mats = [table[lab][2] for lab in class_labels]
        for i, mi in enumerate(mats):
            for mj in mats[i + 1:]:
                if np.max(np.abs(mi @ mj - mj @ mi)) > 1e-10:
                    raise RuntimeError(f"class {class_labels} is not commuting")
        out.append(CommutingClass(labels=list(class_labels), common_basis=_joint_eigenbasis(mats)))
    return out


def mub_projectors(dims: Dims) -> ObservableBasis:
    """Rank-1 projectors onto the class eigenbases; cross-basis overlaps are 1/d.

    Only 2x2 and 3x3 carry such a set.  One projector per basis (the last in
    the canonical eigen-order) is dropped from ``ops`` as redundant via the
    completeness relation; ``measurements`` keeps all of them.
    """
    if tuple(dims) not in ((2, 2), (3, 3)):
        raise ValueError(f"no unbiased-basis set for dims {dims}")
    d = dims[0] * dims[1]
    classes = commuting_classes(dims)
    ops, labels, names, measurements = [], [], [], []
    k = 1
    for ci, cls in enumerate(classes):
        projs = [np.outer(cls.common_basis[:, j], cls.common_basis[:, j].conj())
                 for j in range(d)]
        measurements.append(projs)
        for j in range(d - 1):
            ops.append(projs[j])
            labels.append(k)
            names.append(f"B{ci + 1}P{j + 1}")
            k += 1
    return ObservableBasis(dims=dims, kind="mub-projectors", ops=ops, labels=labels,
                           names=names, measurements=measurements)


# ---------------------------------------------------------------------------
# Informationally complete projector set for 2x3
# ---------------------------------------------------------------------------




def independent_projector_counts(dims: Dims = (2, 3)) -> list[int]:
    """Per-class counts of projectors that enlarge the operator span.

    Classes are processed in printed order; the span starts from the identity.
    The counts are order-independent within each class.
    """
    _check_dims(dims)
    d = dims[0] * dims[1]
    classes = commuting_classes(dims)
    basis_rows = [_herm_coords(np.eye(d, dtype=complex))]
    counts = []
    for cls in classes:
        new = 0
        for j in range(d):
            v = cls.common_basis[:, j]
            row = _herm_coords(np.outer(v, v.conj()))
            stack = np.vstack(basis_rows + [row])
            if np.linalg.matrix_rank(stack, tol=1e-8) > len(basis_rows):
                basis_rows.append(row)
                new += 1
        counts.append(new)
    return counts


def optimal_projectors_2x3() -> ObservableBasis:
    """35 independent projectors for 2x3, regrouped into 7 complete measurements.

    Vectors are extracted class by class (keeping only those whose projectors
    enlarge the operator span), packed greedily into 7 near-orthogonal sets of
    5, Gram-Schmidt re-orthonormalized within each set, and each set is
    completed with its orthocomplement vector to a full 6-outcome measurement.
    Packing orders are tried in a fixed sequence until the delivered 35
    projectors plus identity span the full operator space.
    """
    dims = (2, 3)
    d = 6
    classes = commuting_classes(dims)
    basis_rows = [_herm_coords(np.eye(d, dtype=complex))]
    extracted: list[np.ndarray] = []
    for cls in classes:
        for j in range(d):
            v = cls.common_basis[:, j]
            row = _herm_coords(np.outer(v, v.conj()))
            stack = np.vstack(basis_rows + [row])
            if np.linalg.matrix_rank(stack, tol=1e-8) > len(basis_rows):
                basis_rows.append(row)
                extracted.append(v.copy())
    if len(extracted) != 35:
        raise RuntimeError(f"extracted {len(extracted)} projectors, expected 35")

    orders = [list(range(35))] + [
        list(np.random.default_rng(s).permutation(35)) for s in range(16)
    ]
    for order in orders:
        built = _pack_and_complete(extracted, order, d)
        if built is not None:
            measurements = built
            break
    else:
        raise RuntimeError("no packing order yields an informationally complete grouping")

    ops, labels, names = [], [], []
    k = 1
    for mi, projs in enumerate(measurements):
        for j in range(5):
            ops.append(projs[j])
            labels.append(k)
            names.append(f"M{mi + 1}P{j + 1}")
            k += 1
    return ObservableBasis(dims=dims, kind="optimal-2x3", ops=ops, labels=labels,
                           names=names, measurements=measurements)


def _pack_and_complete(extracted: list[np.ndarray], order: list[int], d: int
                       ) -> list[list[np.ndarray]] | None:
    """Greedy 7x5 packing + per-set orthonormalization; None if rank-deficient."""
    bins: list[list[np.ndarray]] = [[] for _ in range(7)]
    for vi in order:
        v = extracted[vi]
        scores = []
        for bi, b in enumerate(bins):
            if len(b) >= 5:
                continue
            worst = max((abs(np.vdot(u, v)) for u in b), default=0.0)
            scores.append((worst, len(b), bi))
        if not scores:
            return None
        _, _, bi = min(scores)
        bins[bi].append(v)

    measurements = []
    rows = [_herm_coords(np.eye(d, dtype=complex))]
    for b in bins:
        ortho: list[np.ndarray] = []
        for v in b:
            w = v.copy()
            for u in ortho:
                w = w - np.vdot(u, w) * u
            nrm = np.linalg.norm(w)
            if nrm < 1e-8:
                return None
            ortho.append(w / nrm)
        comp = np.eye(d, dtype=complex) - sum(np.outer(u, u.conj()) for u in ortho)
        _, vecs = np.linalg.eigh(hermitize(comp))
        ortho.append(vecs[:, -1])
        projs = [np.outer(u, u.conj()) for u in ortho]
        measurements.append(projs)
        rows.extend(_herm_coords(p) for p in projs[:5])
    if np.linalg.matrix_rank(np.vstack(rows), tol=1e-8) != 36:
        return None
    return measurements


def build_basis(dims: Dims, kind: str) -> ObservableBasis:
    """Uniform constructor used by the experiment layer."""
    if kind == "su-product":
        return su_product_basis(dims)
    if kind == "table1-pauli":
        return table1_basis(dims)
    if kind == "mub-projectors":
        return mub_projectors(dims)
    if kind == "optimal-2x3":
        if tuple(dims) != (2, 3):
            raise ValueError("optimal-2x3 basis exists only for dims (2, 3)")
        return optimal_projectors_2x3()
    raise ValueError(f"unknown basis kind {kind!r}")


# ---------------------------------------------------------------------------
# Bloch decomposition and measurement
# ---------------------------------------------------------------------------


@dataclass
class BlochDecomposition:
    """Local vectors and the correlation matrix of a bipartite state."""

    dims: Dims
    r_a: np.ndarray
    r_b: np.ndarray
    t: np.ndarray


def bloch_decompose(rho: np.ndarray, dims: Dims) -> BlochDecomposition:
    """Local Bloch vectors r_a, r_b and correlation matrix t_ij = Tr(rho g_i x g_j)."""
    _check_dims(dims)
    da, db = dims
    ga, gb = su_generators(da), su_generators(db)
    r_a = np.array([(da / 2) * hs_inner(rho, kron(g, np.eye(db))) for g in ga])
    r_b = np.array([(db / 2) * hs_inner(rho, kron(np.eye(da), g)) for g in gb])
    t = np.array([[hs_inner(rho, kron(gi, gj)) for gj in gb] for gi in ga])
    return BlochDecomposition(dims=dims, r_a=r_a, r_b=r_b, t=t)


def bloch_reconstruct(dec: BlochDecomposition) -> np.ndarray:
    """Rebuild the state from its Bloch data.

    The local terms carry the 1/d normalization of the marginal expansion;
    the correlation term uses the exact Hilbert-Schmidt weight 1/4 fixed by
    Tr(g^2) = 2 (the two coincide only for the two-qubit system).
    """
    da, db = dec.dims
    d = da * db
    ga, gb = su_generators(da), su_generators(db)
    rho = np.eye(d, dtype=complex) / d
    for i, g in enumerate(ga):
        rho += dec.r_a[i] * kron(g, np.eye(db)) / d
    for j, g in enumerate(gb):
        rho += dec.r_b[j] * kron(np.eye(da), g) / d
    for i, gi in enumerate(ga):
        for j, gj in enumerate(gb):
            rho += dec.t[i, j] * kron(gi, gj) / 4
    return rho


def measure(rho: np.ndarray, basis: ObservableBasis, indices: list[int]) -> MeasurementRecord:
    """Exact expectation values of the requested basis entries, in request order."""
    n = len(basis.ops)
    for k in indices:
        if not 0 <= k < n:
            raise ValueError(f"index {k} outside basis of size {n}")
    entries = [(k, hs_inner(rho, basis.ops[k])) for k in indices]
    return MeasurementRecord(basis=basis, entries=entries)


def export_basis_csv(basis: ObservableBasis, path: str) -> None:
    """Write (label, kind, row, col, re, im) rows for golden-file comparisons."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "kind", "row", "col", "re", "im"])
        for lab, op in zip(basis.labels, basis.ops):
            n = op.shape[0]
            for r in range(n):
                for c in range(n):
                    w.writerow([lab, basis.kind, r, c, repr(op[r, c].real), repr(op[r, c].imag)])
