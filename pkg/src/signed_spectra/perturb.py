"""Numerical laboratory for block-model perturbation analysis.

Models an observed graph as a block-diagonal nonnegative base A plus an
intra-cluster negative perturbation E_I and an inter-cluster perturbation
E_O. Provides first-order approximations of the perturbed dominant
eigenvectors, per-node coordinate approximations, rotation verdicts for
single injected cross edges, and a spectral-regime classifier for signed
blocks. Everything here runs dense and is guarded to desk-scale sizes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigen import canonicalize_sign, dense_eigen_oracle
from .errors import PerronCheckError, SingularOperatorError
from .graph import strongly_connected_components
from .parallel import max_workers

__all__ = [
    "PerturbationModel",
    "PerturbWorkspace",
    "build_workspace",
    "perron_pair",
    "approx_perturbed_subspace",
    "approx_node_coordinate",
    "rotation_verdict",
    "CrossEdgeReport",
    "cross_edge_experiment",
    "rotation_agreement_sweep",
    "residual_decay_experiment",
    "Regime",
    "RegimeReport",
    "classify_block_regime",
    "positivity_exponent",
    "k_block_model",
    "random_block",
    "single_cross_edge",
    "random_inter_perturbation",
]

REAL_TOL = 1e-9
LAB_GUARD = 512


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class PerturbationModel:
    """Block-diagonal nonnegative base plus intra/inter perturbations.

    ``a`` is zero off the diagonal blocks; ``e_intra`` is block-diagonal and
    nonpositive; ``e_inter`` is zero on the diagonal blocks.
    """

    block_sizes: tuple[int, ...]
    a: np.ndarray
    e_intra: np.ndarray
    e_inter: np.ndarray

    def __post_init__(self):
        n = self.n
        for name in ("a", "e_intra", "e_inter"):
            mat = getattr(self, name)
            if mat.shape != (n, n):
                raise ValueError(f"{name} must be {n} x {n}")
        mask = self.block_mask()
        if np.any(self.a[~mask] != 0):
            raise ValueError("base matrix has entries off the diagonal blocks")
        if np.any(self.a < 0):
            raise ValueError("base matrix must be nonnegative")
        if np.any(self.e_intra[~mask] != 0):
            raise ValueError("intra perturbation must be block-diagonal")
        if np.any(self.e_intra > 0):
            raise ValueError("intra perturbation must be nonpositive")
        if np.any(self.e_inter[mask] != 0):
            raise ValueError("inter perturbation must vanish on the blocks")

    @property
    def n(self):
        return int(sum(self.block_sizes))

    @property
    def k(self):
        return len(self.block_sizes)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.block_sizes)]).astype(int)

    @property
    def cluster_of(self):
        return np.repeat(np.arange(self.k), self.block_sizes)

    def block_mask(self):
        mask = np.zeros((self.n, self.n), dtype=bool)
        off = self.offsets
        for b in range(self.k):
            mask[off[b]:off[b + 1], off[b]:off[b + 1]] = True
        return mask

    def block(self, b):
        off = self.offsets
        return self.a[off[b]:off[b + 1], off[b]:off[b + 1]]

    def perturbed(self):
        return self.a + self.e_intra + self.e_inter


def random_block(size, density, rng, max_tries=200):
    """Random {0,1} block, no self-loops, redrawn until strongly connected."""
    for _ in range(max_tries):
        block = (rng.random((size, size)) < density).astype(float)
        np.fill_diagonal(block, 0.0)
        if len(strongly_connected_components(block)) == 1:
            return block
    raise PerronCheckError(
        f"could not draw a strongly connected {size}-node block at density {density}")


def k_block_model(block_sizes, density=0.5, seed=0) -> PerturbationModel:
    """Disconnected nonnegative base with random strongly connected blocks."""
    rng = np.random.default_rng(seed)
    sizes = tuple(int(s) for s in block_sizes)
    n = int(sum(sizes))
    if n > LAB_GUARD:
        raise ValueError(f"lab models are limited to n <= {LAB_GUARD}")
    densities = density if np.ndim(density) else [density] * len(sizes)
    a = np.zeros((n, n))
    off = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    for b, size in enumerate(sizes):
        a[off[b]:off[b + 1], off[b]:off[b + 1]] = random_block(size, densities[b], rng)
    zero = np.zeros((n, n))
    return PerturbationModel(block_sizes=sizes, a=a, e_intra=zero, e_inter=zero.copy())


def single_cross_edge(model: PerturbationModel, u, v, sign, direction="uv"):
    """Inter perturbation holding one signed edge (or its reverse, or both)."""
    if model.cluster_of[u] == model.cluster_of[v]:
        raise ValueError("u and v must lie in different blocks")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    e = np.zeros((model.n, model.n))
    if direction in ("uv", "both"):
        e[u, v] = sign
    if direction in ("vu", "both"):
        e[v, u] = sign
    if direction not in ("uv", "vu", "both"):
        raise ValueError("direction must be 'uv', 'vu', or 'both'")
    return e


def random_inter_perturbation(model: PerturbationModel, density, rng,
                              negative_fraction=0.5):
    """Random +/-1 entries on the off-block slots at the given density."""
    n = model.n
    u = rng.random((n, n))
    e = np.zeros((n, n))
    e[u < density * (1 - negative_fraction)] = 1.0
    e[(u >= density * (1 - negative_fraction)) & (u < density)] = -1.0
    e[model.block_mask()] = 0.0
    return e


# ---------------------------------------------------------------------------
# workspace and first-order approximations


def perron_pair(block, tol=REAL_TOL):
    """Dominant (lambda, vector) of a block; the eigenvalue must be real,
    positive, simple among the radius-attaining values, and the canonicalized
    eigenvector entrywise positive within tolerance."""
    block = np.asarray(block, dtype=np.float64)
    eig = dense_eigen_oracle(block)
    radius = eig.spectral_radius()
    if radius == 0.0:
        raise PerronCheckError("block has zero spectral radius")
    scale = max(1.0, radius)
    candidates = [p for p in eig.pairs if radius - p.modulus <= tol * scale]
    real_pos = [p for p in candidates
                if abs(p.value.imag) <= tol * scale and p.value.real > 0]
    if not real_pos:
        raise PerronCheckError(
            "no real positive eigenvalue attains the spectral radius")
    top = real_pos[0]
    others = [p for p in eig.pairs if p is not top]
    if any(abs(p.value - top.value) <= tol * scale for p in others):
        raise PerronCheckError("dominant eigenvalue is not simple")
    vec = canonicalize_sign(top.vector.real)
    if vec.min() < -tol * vec.max():
        raise PerronCheckError("dominant eigenvector is not entrywise positive")
    return float(top.value.real), vec


@dataclass
class PerturbWorkspace:
    """Block eigpost-basis and resolvent operators for first-order formulas.

    ``x`` holds the K block dominant eigenvectors placed on their blocks
    (zero elsewhere); ``q`` completes an orthonormal basis of R^n and
    ``l2 = q^T a q`` is the reduced block. The per-target operator
    ``nabla(i)`` compresses the resolvent onto the orthogonal complement of
    column i alone, which carries the full first-order eigenvector change.
    """

    model: PerturbationModel
    x: np.ndarray
    eigenvalues: np.ndarray
    q: np.ndarray
    l2: np.ndarray
    _nabla_cache: dict = field(default_factory=dict, repr=False)

    def nabla(self, i):
        """Resolvent compression Q_i (I - L2_i / lambda_i)^-1 Q_i^T for
        target eigenvalue i; cached."""
        if i in self._nabla_cache:
            return self._nabla_cache[i]
        lam = self.eigenvalues[i]
        xi = self.x[:, i:i + 1]
        qfull, _ = np.linalg.qr(xi, mode="complete")
        qi = qfull[:, 1:]
        l2i = qi.T @ self.model.a @ qi
        m = np.eye(self.model.n - 1) - l2i / lam
        cond = np.linalg.cond(m)
        if not np.isfinite(cond) or cond > 1e13:
            raise SingularOperatorError(
                f"I - L2/lambda is singular for lambda = {lam}; the target "
                "eigenvalue collides with the reduced spectrum")
        nab = qi @ np.linalg.solve(m, qi.T)
        self._nabla_cache[i] = nab
        return nab


def build_workspace(model: PerturbationModel) -> PerturbWorkspace:
    """Block dominant eigenvectors plus the Gram-Schmidt completion.

    Raises PerronCheckError when a block fails the dominant-pair check.
    """
    n, k = model.n, model.k
    off = model.offsets
    x = np.zeros((n, k))
    lams = np.zeros(k)
    for b in range(k):
        lam, vec = perron_pair(model.block(b))
        lams[b] = lam
        x[off[b]:off[b + 1], b] = vec
    qfull, _ = np.linalg.qr(x, mode="complete")
    q = qfull[:, k:]
    l2 = q.T @ model.a @ q
    return PerturbWorkspace(model=model, x=x, eigenvalues=lams, q=q, l2=l2)


def _check_inter_only(model, e):
    mask = model.block_mask()
    if np.any(np.asarray(e)[mask] != 0):
        raise ValueError("perturbation must be zero on the diagonal blocks")


def approx_perturbed_subspace(w: PerturbWorkspace, e) -> np.ndarray:
    """First-order approximation of the perturbed dominant eigenvectors:
    column i is x_i + nabla_i E x_i / lambda_i."""
    e = np.asarray(e, dtype=np.float64)
    _check_inter_only(w.model, e)
    out = np.array(w.x, copy=True)
    for i in range(w.model.k):
        out[:, i] += w.nabla(i) @ (e @ w.x[:, i]) / w.eigenvalues[i]
    return out


def approx_node_coordinate(w: PerturbWorkspace, e, u) -> np.ndarray:
    """Approximate spectral coordinate of node u under perturbation ``e``.

    Home-axis entry plus, per column j, the resolvent-weighted sum over the
    perturbation edges that point into block j:

        coord[j] = x_j[u] + sum_k nabla_j[u, k] * sum_v e[k, v] x_j[v] / lambda_j

    Agrees with row u of approx_perturbed_subspace by construction; the
    sparse evaluation only touches nonzero entries of ``e``.
    """
    e = np.asarray(e, dtype=np.float64)
    _check_inter_only(w.model, e)
    k = w.model.k
    coord = np.zeros(k)
    rows, cols = np.nonzero(e)
    for j in range(k):
        coord[j] = w.x[u, j]
        if rows.size == 0:
            continue
        weights = e[rows, cols] * w.x[cols, j]
        touched = weights != 0
        if not touched.any():
            continue
        nab_row = w.nabla(j)[u]
        coord[j] += float(nab_row[rows[touched]] @ weights[touched]) / w.eigenvalues[j]
    return coord


# ---------------------------------------------------------------------------
# rotations


def rotation_verdict(before, after, eps=0.0):
    """Signed rotation from ``before`` to ``after`` in the plane.

    Returns "clockwise" (negative angle), "anticlockwise" (positive), or
    "unchanged" when |angle| <= eps. Raises on a zero before-vector.
    """
    bx, by = float(before[0]), float(before[1])
    ax, ay = float(after[0]), float(after[1])
    if bx == 0.0 and by == 0.0:
        raise ValueError("before-vector must be non-zero")
    angle = signed_rotation_angle(before, after)
    if abs(angle) <= eps:
        return "unchanged"
    return "anticlockwise" if angle > 0 else "clockwise"


def signed_rotation_angle(before, after):
    """Angle in radians from before to after; positive = anticlockwise."""
    bx, by = float(before[0]), float(before[1])
    ax, ay = float(after[0]), float(after[1])
    cross = bx * ay - by * ax
    dot = bx * ax + by * ay
    return math.atan2(cross, dot)


@dataclass
class CrossEdgeReport:
    """Observed versus predicted rotations for one injected cross edge."""

    u: int
    v: int
    sign: int
    direction: str
    lambda_u: float
    lambda_v: float
    coords_before: np.ndarray  # (n, 2) in the (block_u, block_v) plane
    coords_after: np.ndarray
    angles: np.ndarray  # per-node signed rotation, radians
    verdicts: list[str]
    predicted: dict  # block index -> "clockwise" | "anticlockwise" | "unchanged"

    def predicted_for(self, node, cluster_of):
        return self.predicted[int(cluster_of[node])]


def _predict_rotation(sign, lam_src, lam_dst):
    """A signed edge rotates its source community: clockwise when the edge
    sign and the eigenvalue gap (dst - src) disagree in sign."""
    gap = lam_dst - lam_src
    product = sign * gap
    if product < 0:
        return "clockwise"
    if product > 0:
        return "anticlockwise"
    return "unchanged"


def cross_edge_experiment(model: PerturbationModel, u, v, sign,
                          direction="uv", eps=1e-9) -> CrossEdgeReport:
    """Inject one cross edge and compare exact rotations with prediction.

    Exact eigenvectors of the base and the perturbed matrix (dense oracle,
    canonicalized signs) are projected into the 2-D plane of the two block
    eigenvectors. Requires distinct block eigenvalues.
    """
    cluster_of = model.cluster_of
    bu, bv = int(cluster_of[u]), int(cluster_of[v])
    if bu == bv:
        raise ValueError("u and v must lie in different blocks")
    w = build_workspace(model)
    lam_u, lam_v = w.eigenvalues[bu], w.eigenvalues[bv]
    scale = max(abs(lam_u), abs(lam_v), 1.0)
    if abs(lam_u - lam_v) <= 1e-8 * scale:
        raise ValueError("block eigenvalues coincide; prediction undefined")

    e = single_cross_edge(model, u, v, sign, direction)
    before = np.column_stack([w.x[:, bu], w.x[:, bv]])
    perturbed = model.a + e
    after = np.column_stack([
        _matched_eigenvector(perturbed, lam_u),
        _matched_eigenvector(perturbed, lam_v),
    ])

    # Verdicts use each node's home-block axis as the first coordinate, so
    # "clockwise" consistently means rotating off the home axis toward
    # negative second-coordinate territory.
    n = model.n
    angles = np.zeros(n)
    verdicts = []
    for node in range(n):
        if before[node, 0] == 0.0 and before[node, 1] == 0.0:
            angles[node] = 0.0
            verdicts.append("unchanged")
            continue
        flip = cluster_of[node] == bv
        b_frame = before[node, ::-1] if flip else before[node]
        a_frame = after[node, ::-1] if flip else after[node]
        angles[node] = signed_rotation_angle(b_frame, a_frame)
        verdicts.append(rotation_verdict(b_frame, a_frame, eps=eps))

    predicted = {b: "unchanged" for b in range(model.k)}
    if direction in ("uv", "both"):
        predicted[bu] = _predict_rotation(sign, lam_u, lam_v)
    if direction in ("vu", "both"):
        predicted[bv] = _predict_rotation(sign, lam_v, lam_u)

    return CrossEdgeReport(
        u=u, v=v, sign=sign, direction=direction,
        lambda_u=float(lam_u), lambda_v=float(lam_v),
        coords_before=before, coords_after=after,
        angles=angles, verdicts=verdicts, predicted=predicted,
    )


def _matched_eigenvector(matrix, target):
    """Canonicalized real eigenvector of the value nearest to ``target``."""
    eig = dense_eigen_oracle(matrix)
    real = [p for p in eig.pairs if p.is_real]
    if not real:
        raise PerronCheckError("perturbed matrix lost all real eigenvalues")
    best = min(real, key=lambda p: abs(p.value.real - target))
    return canonicalize_sign(best.vector.real)


def _rotation_test_model(rng, sizes=(20, 20), density=0.6,
                         gap_range=(0.15, 0.45), bulk_sep=6.0, tries=400):
    """Random 2-block model with close dominant eigenvalues and a strong
    dominant-to-bulk gap, the regime where the first-order term governs.

    The gap window keeps the dominant-pair mixing coefficient below ~0.4 so
    sign canonicalization of the perturbed eigenvectors stays aligned."""
    for _ in range(tries):
        model = k_block_model(sizes, density=density,
                              seed=int(rng.integers(2 ** 31)))
        w = build_workspace(model)
        gap = abs(w.eigenvalues[0] - w.eigenvalues[1])
        if not gap_range[0] <= gap <= gap_range[1]:
            continue
        subs = [np.sort(np.abs(np.linalg.eigvals(model.block(b))))[-2]
                for b in range(2)]
        if w.eigenvalues.min() - max(subs) < bulk_sep:
            continue
        return model, w
    raise PerronCheckError("could not draw a well-separated 2-block model")


def _one_rotation_trial(seed, sign, src_larger, direction):
    """Build a random 2-block model and run one cross-edge experiment.

    Returns (moving-node agreement bool, stationary/moving angle ratio).
    The endpoints are the strongest-projected node of each block.
    """
    rng = np.random.default_rng(seed)
    model, w = _rotation_test_model(rng)
    lam0, lam1 = w.eigenvalues
    bigger = 0 if lam0 > lam1 else 1
    src_block = bigger if src_larger else 1 - bigger
    off = model.offsets
    n0 = int(np.argmax(w.x[off[0]:off[1], 0]))
    n1 = int(off[1] + np.argmax(w.x[off[1]:off[2], 1]))
    src_candidate = n0 if src_block == 0 else n1
    dst_candidate = n1 if src_block == 0 else n0
    if direction == "uv":
        u, v = src_candidate, dst_candidate
    else:
        v, u = src_candidate, dst_candidate
    report = cross_edge_experiment(model, u, v, sign, direction=direction)
    src_node, dst_node = (u, v) if direction == "uv" else (v, u)
    expected = report.predicted_for(src_node, model.cluster_of)
    observed = report.verdicts[src_node]
    moving = abs(report.angles[src_node])
    stationary = abs(report.angles[dst_node])
    ratio = stationary / moving if moving > 0 else math.inf
    return observed == expected, ratio


def rotation_agreement_sweep(trials_per_case=13, seed=0):
    """Run single-cross-edge experiments across all sign/eigenvalue-order
    cases and both edge directions.

    Returns (agreement fraction, list of stationary/moving ratios, total).
    Trials run concurrently, capped by SIGNED_SPECTRA_THREADS.
    """
    cases = [
        (sign, src_larger, direction)
        for sign in (1, -1)
        for src_larger in (True, False)
        for direction in ("uv", "vu")
    ]
    jobs = []
    base = np.random.default_rng(seed)
    for case_idx, (sign, src_larger, direction) in enumerate(cases):
        for t in range(trials_per_case):
            jobs.append((int(base.integers(2 ** 31)), sign, src_larger, direction))
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        results = list(pool.map(lambda args: _one_rotation_trial(*args), jobs))
    agreements = [ok for ok, _ in results]
    ratios = [r for _, r in results]
    return sum(agreements) / len(agreements), ratios, len(results)


# ---------------------------------------------------------------------------
# first-order residual decay


def residual_decay_experiment(model: PerturbationModel, e_base, eps_list):
    """Residual between the first-order approximation and exact eigenvectors
    for a ladder of perturbation scales.

    Exact eigenvectors of A + eps * E are matched to the block eigenvalues
    and sign-canonicalized before the Frobenius residual. Returns a dict
    with the ladder, residuals, and consecutive ratios.
    """
    w = build_workspace(model)
    e_base = np.asarray(e_base, dtype=np.float64)
    _check_inter_only(model, e_base)
    residuals = []
    for eps in eps_list:
        e = eps * e_base
        approx = approx_perturbed_subspace(w, e)
        exact = np.column_stack([
            _matched_eigenvector(model.a + e, w.eigenvalues[i])
            for i in range(model.k)
        ])
        for i in range(model.k):
            approx[:, i] = canonicalize_sign(approx[:, i])
        residuals.append(float(np.linalg.norm(approx - exact)))
    ratios = [residuals[i] / residuals[i + 1] if residuals[i + 1] > 0 else math.inf
              for i in range(len(residuals) - 1)]
    return {"eps": list(eps_list), "residuals": residuals, "ratios": ratios}


# ---------------------------------------------------------------------------
# spectral regime classification


class Regime:
    PFN = "PFn"
    REAL_RADIUS_MIXED_SIGN = "RealRadiusMixedSign"
    COMPLEX_RADIUS = "ComplexRadius"


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    spectral_radius: float
    dominant_value: complex
    positivity_exponent: int | None

    def to_json(self):
        return {
            "regime": self.regime,
            "spectral_radius": self.spectral_radius,
            "dominant_value": [self.dominant_value.real, self.dominant_value.imag],
            "positivity_exponent": self.positivity_exponent,
        }


def positivity_exponent(matrix, m_cap=None):
    """Smallest m <= m_cap with matrix^m entrywise positive, else None.

    Powers are renormalized by their max magnitude each step, which
    preserves the sign pattern while avoiding overflow.
    """
    a = np.asarray(matrix, dtype=np.float64)
    n = a.shape[0]
    if m_cap is None:
        m_cap = n * n + 1
    power = np.array(a, copy=True)
    for m in range(1, m_cap + 1):
        if np.all(power > 0):
            return m
        if m == m_cap:
            break
        power = power @ a
        peak = np.abs(power).max()
        if peak == 0:
            return None
        power /= peak
    return None


def classify_block_regime(block, m_cap=None, tol=REAL_TOL) -> RegimeReport:
    """Classify a signed block by how its spectral radius is attained.

    PFn: a real, simple, positive radius-attaining eigenvalue with an
    entrywise-positive canonicalized eigenvector. RealRadiusMixedSign: the
    radius is attained by a real eigenvalue but the PFn conditions fail.
    ComplexRadius: every radius-attaining eigenvalue has nonzero imaginary
    part. Also reports the eventual-positivity probe.
    """
    block = np.asarray(block, dtype=np.float64)
    eig = dense_eigen_oracle(block)
    radius = eig.spectral_radius()
    exponent = positivity_exponent(block, m_cap=m_cap)
    if radius == 0.0:
        return RegimeReport(Regime.REAL_RADIUS_MIXED_SIGN, 0.0, 0j, exponent)
    scale = max(1.0, radius)
    attaining = [p for p in eig.pairs if radius - p.modulus <= tol * scale]
    real_attaining = [p for p in attaining if abs(p.value.imag) <= tol * scale]
    if not real_attaining:
        return RegimeReport(Regime.COMPLEX_RADIUS, radius,
                            attaining[0].value, exponent)
    regime = Regime.REAL_RADIUS_MIXED_SIGN
    dominant = real_attaining[0].value
    for p in real_attaining:
        if p.value.real <= 0:
            continue
        others = [q for q in eig.pairs if q is not p]
        simple = all(abs(q.value - p.value) > tol * scale for q in others)
        if not simple:
            continue
        vec = canonicalize_sign(p.vector.real)
        if vec.min() > -tol * vec.max() and np.all(vec > -tol * vec.max()):
            regime = Regime.PFN
            dominant = p.value
            break
    return RegimeReport(regime, radius, dominant, exponent)
