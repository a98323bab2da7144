"""Constructive decompositions of PSD block matrices.

Three families, all emitting replayable certificates:

* corner decompositions: a PSD matrix as a sum of unitary conjugates of
  its diagonal blocks embedded at their slots (two slots of free widths,
  or alpha equal slots);
* the two-isometry average for Hermitian-block 2x2 partitions, where the
  matrix becomes half of ``U (A+B) U* + V (A+B) V*``;
* the quaternion-unit route for 3 or 4 Hermitian blocks, decomposing
  ``H (+) H`` into a quarter of four isometry conjugates of the doubled
  partial trace.

A certificate stores the target, the conjugated core, the factor list
and its measured defects; :func:`verify_certificate` recomputes the
defects from scratch so third parties can replay acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .blocks import (
    BlockMatrix,
    direct_sum,
    duplicate_blocks,
    get_block,
    interleave_permutation,
    partial_trace,
    validate_hermitian_blocks,
)
from .checks import CheckReport, compare_le
from .errors import (
    DomainError,
    HypothesisError,
    MalformedCertificateError,
    NumericalError,
)
from .kernel import (
    DEFAULT_TOL,
    PsdClass,
    Tolerance,
    as_matrix,
    dagger,
    frobenius,
    hermitian_eig,
    hermitian_part,
    matrix_from_json,
    matrix_to_json,
    psd_sqrt,
    unitary_completion,
    validate_hermitian_psd,
)

__all__ = [
    "CORNER_KINDS",
    "DecompositionCertificate",
    "KINDS",
    "QuaternionStageTrace",
    "certificate_from_json",
    "certificate_to_json",
    "corner_decomposition_general",
    "corner_unitary",
    "isometry_defects",
    "measure_defects",
    "quaternion_pipeline",
    "quaternion_unit_blocks",
    "quaternion_units",
    "reconstruction_residual",
    "two_block_congruence",
    "two_block_isometries",
    "two_corner_decomposition",
    "verify_certificate",
]

KINDS = ("two_corner", "corner_general", "two_block_isometry", "quaternion")
CORNER_KINDS = ("two_corner", "corner_general")

_EXPECTED_WEIGHT = {
    "two_corner": Fraction(1),
    "corner_general": Fraction(1),
    "two_block_isometry": Fraction(1, 2),
    "quaternion": Fraction(1, 4),
}


def quaternion_units() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The 2x2 complex representations of the quaternion units 1, i, j, k.

    Entries are exact complex integers, so the unit identities
    ``i^2 = j^2 = k^2 = ijk = -1`` hold with zero floating-point defect.
    """
    one = np.array([[1, 0], [0, 1]], dtype=np.complex128)
    i = np.array([[1j, 0], [0, -1j]], dtype=np.complex128)
    j = np.array([[0, 1j], [1j, 0]], dtype=np.complex128)
    k = np.array([[0, -1], [1, 0]], dtype=np.complex128)
    return one, i, j, k


def quaternion_unit_blocks(n: int) -> tuple[np.ndarray, ...]:
    """The unit matrices inflated to 2n x 2n (each scalar becomes that
    multiple of the n x n identity)."""
    eye = np.eye(n)
    return tuple(np.kron(u, eye) for u in quaternion_units())


def _require_psd(a: np.ndarray, tol: Tolerance, what: str) -> None:
    kind = validate_hermitian_psd(a, tol)
    if kind is not PsdClass.PSD:
        raise DomainError(f"{what} must be PSD, classified {kind.value!r}")


def corner_unitary(m, offset: int) -> np.ndarray:
    """Unitary U with ``M M* = U embed(M*M, offset) U*`` for tall M.

    ``embed(X, offset)`` places the q x q matrix X on the diagonal of a
    p x p zero matrix starting at ``offset``. Built from the SVD
    ``M = P diag(s) Q*``: a coordinate permutation routes the leading
    singular directions into the requested slot and Q aligns the bases.
    Handles rank deficiency for free since the SVD basis is complete.
    """
    a = as_matrix(m)
    p, q = a.shape
    if p < q:
        raise ValueError(f"corner factor must be tall, got shape {p}x{q}")
    if not 0 <= offset <= p - q:
        raise ValueError(f"slot [{offset}, {offset + q}) does not fit in side {p}")
    try:
        left, _, right_h = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed on a {p}x{q} corner factor: {exc}") from exc
    qhat = np.eye(p, dtype=np.complex128)
    qhat[offset : offset + q, offset : offset + q] = dagger(right_h)
    dest = np.array(
        list(range(offset, offset + q))
        + list(range(0, offset))
        + list(range(offset + q, p))
    )
    pi = np.zeros((p, p), dtype=np.complex128)
    pi[dest, np.arange(p)] = 1.0
    return left @ pi.T @ dagger(qhat)


@dataclass(frozen=True, eq=False)
class DecompositionCertificate:
    """Replayable decomposition: ``target ~= weight * sum_k F_k core_k F_k*``.

    For the corner kinds ``core`` is the block-diagonal matrix of the
    target's diagonal blocks and ``core_k`` masks it to slot k (slot
    widths in ``slots``); the isometry kinds share ``core`` across all
    factors. ``defects`` holds the measured reconstruction residual and
    per-factor isometry defects.
    """

    kind: str
    target: np.ndarray
    weight: Fraction
    core: np.ndarray
    factors: tuple[np.ndarray, ...]
    defects: dict | None = None
    slots: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise MalformedCertificateError(f"unknown certificate kind {self.kind!r}")
        object.__setattr__(self, "target", as_matrix(self.target))
        object.__setattr__(self, "core", as_matrix(self.core))
        object.__setattr__(self, "weight", Fraction(self.weight))
        object.__setattr__(self, "factors", tuple(as_matrix(f) for f in self.factors))
        if self.slots is not None:
            object.__setattr__(self, "slots", tuple(int(w) for w in self.slots))


def _validate_certificate(cert: DecompositionCertificate) -> None:
    side = cert.target.shape[0]
    if cert.target.shape[0] != cert.target.shape[1]:
        raise MalformedCertificateError("target must be square")
    if cert.core.shape[0] != cert.core.shape[1]:
        raise MalformedCertificateError("core must be square")
    if cert.weight != _EXPECTED_WEIGHT[cert.kind]:
        raise MalformedCertificateError(
            f"kind {cert.kind!r} carries weight {cert.weight}, expected {_EXPECTED_WEIGHT[cert.kind]}"
        )
    if cert.kind in CORNER_KINDS:
        if cert.slots is None:
            raise MalformedCertificateError("corner certificates need slot widths")
        if len(cert.slots) != len(cert.factors):
            raise MalformedCertificateError("one slot width per factor required")
        if sum(cert.slots) != side or cert.core.shape[0] != side:
            raise MalformedCertificateError("slot widths must tile the target side")
        for f in cert.factors:
            if f.shape != (side, side):
                raise MalformedCertificateError(
                    f"corner factors must be {side}x{side} unitaries, got {f.shape}"
                )
    else:
        expected = 2 if cert.kind == "two_block_isometry" else 4
        if len(cert.factors) != expected:
            raise MalformedCertificateError(
                f"kind {cert.kind!r} needs {expected} factors, got {len(cert.factors)}"
            )
        q = cert.core.shape[0]
        for f in cert.factors:
            if f.shape != (side, q):
                raise MalformedCertificateError(
                    f"factors must be {side}x{q} isometries, got {f.shape}"
                )


def _per_factor_cores(cert: DecompositionCertificate) -> list[np.ndarray]:
    if cert.kind in CORNER_KINDS:
        side = cert.target.shape[0]
        cores = []
        offset = 0
        for width in cert.slots:
            masked = np.zeros((side, side), dtype=np.complex128)
            masked[offset : offset + width, offset : offset + width] = cert.core[
                offset : offset + width, offset : offset + width
            ]
            cores.append(masked)
            offset += width
        return cores
    return [cert.core] * len(cert.factors)


def reconstruction_residual(cert: DecompositionCertificate) -> float:
    """``||target - weight * sum_k F_k core_k F_k*||_F``, recomputed."""
    _validate_certificate(cert)
    acc = np.zeros_like(cert.target)
    for f, core in zip(cert.factors, _per_factor_cores(cert)):
        acc += f @ core @ dagger(f)
    return frobenius(cert.target - float(cert.weight) * acc)


def isometry_defects(cert: DecompositionCertificate) -> tuple[float, ...]:
    """``||F*F - I||_F`` for each factor."""
    _validate_certificate(cert)
    return tuple(
        frobenius(dagger(f) @ f - np.eye(f.shape[1])) for f in cert.factors
    )


def measure_defects(cert: DecompositionCertificate) -> dict:
    return {
        "reconstruction": reconstruction_residual(cert),
        "isometry": list(isometry_defects(cert)),
    }


def _certified(cert: DecompositionCertificate) -> DecompositionCertificate:
    return replace(cert, defects=measure_defects(cert))


def two_corner_decomposition(
    h, n: int, m: int, tol: Tolerance = DEFAULT_TOL
) -> DecompositionCertificate:
    """Write a PSD matrix of side n+m as ``U (A (+) 0) U* + V (0 (+) B) V*``.

    A and B are the diagonal corners of H; no hypothesis is placed on the
    off-diagonal block. Realization: column-split the PSD square root
    ``S = [M N]`` (so ``M*M = A``, ``N*N = B`` and ``H = MM* + NN*``) and
    route each Gram factor into its slot with :func:`corner_unitary`.
    """
    a = as_matrix(h)
    if n < 1 or m < 1:
        raise ValueError("corner widths must be positive")
    if a.shape[0] != a.shape[1] or a.shape[0] != n + m:
        raise ValueError(f"expected a square matrix of side {n + m}, got {a.shape}")
    _require_psd(a, tol, "corner decomposition input")
    root = psd_sqrt(a, tol)
    u = corner_unitary(root[:, :n], 0)
    v = corner_unitary(root[:, n:], n)
    core = np.zeros_like(a)
    core[:n, :n] = hermitian_part(a[:n, :n])
    core[n:, n:] = hermitian_part(a[n:, n:])
    cert = DecompositionCertificate(
        kind="two_corner",
        target=a,
        weight=Fraction(1),
        core=core,
        factors=(u, v),
        slots=(n, m),
    )
    return _certified(cert)


def corner_decomposition_general(
    h: BlockMatrix, tol: Tolerance = DEFAULT_TOL
) -> DecompositionCertificate:
    """Columnwise corner decomposition over all alpha diagonal slots:
    ``H = sum_s U_s embed(A_ss, s) U_s*`` with unitary U_s.

    Hermitian blocks are not required, only positivity.
    """
    n, alpha = h.block_dim, h.block_count
    _require_psd(h.data, tol, "corner decomposition input")
    root = psd_sqrt(h.data, tol)
    factors = []
    core = np.zeros_like(h.data)
    for s in range(alpha):
        offset = s * n
        factors.append(corner_unitary(root[:, offset : offset + n], offset))
        core[offset : offset + n, offset : offset + n] = hermitian_part(
            h.data[offset : offset + n, offset : offset + n]
        )
    cert = DecompositionCertificate(
        kind="corner_general",
        target=h.data.copy(),
        weight=Fraction(1),
        core=core,
        factors=tuple(factors),
        slots=(n,) * alpha,
    )
    return _certified(cert)


def two_block_congruence(h: BlockMatrix) -> tuple[np.ndarray, np.ndarray]:
    """The balancing congruence of the two-isometry construction.

    Returns ``(W, K)`` with W unitary and ``K = W* H W``. When the
    off-diagonal block of H is Hermitian, both diagonal n x n blocks of K
    equal ``(A+B)/2``; complex entries in W are what makes this work even
    for real H.
    """
    if h.block_count != 2:
        raise ValueError("two-block congruence needs exactly 2x2 blocks")
    n = h.block_dim
    eye = np.eye(n)
    w = np.block([[-1j * eye, 1j * eye], [eye, eye]]) / np.sqrt(2.0)
    k = hermitian_part(dagger(w) @ h.data @ w)
    return w, k


def two_block_isometries(
    h: BlockMatrix, tol: Tolerance = DEFAULT_TOL
) -> DecompositionCertificate:
    """Average of two isometry conjugates of A+B reconstructing a PSD
    2x2-block matrix with Hermitian blocks.

    Pipeline: the congruence by W equalizes the diagonal blocks at
    (A+B)/2, a two-corner decomposition splits the transformed matrix,
    and the active block column of each corner unitary (first for the
    slot-1 core, second for the slot-2 core) is pulled back through W.
    Produces 2n x n isometries U, V with
    ``H = (U (A+B) U* + V (A+B) V*)/2``.
    """
    if h.block_count != 2:
        raise ValueError("two-block decomposition needs exactly 2x2 blocks")
    report = validate_hermitian_blocks(h, tol)
    if not report.ok:
        raise HypothesisError(
            f"off-diagonal blocks must be Hermitian; offending (s, t, defect): {report.offending}"
        )
    _require_psd(h.data, tol, "two-block decomposition input")
    n = h.block_dim
    w, k = two_block_congruence(h)
    root = psd_sqrt(k, tol)
    u0 = corner_unitary(root[:, :n], 0)
    v0 = corner_unitary(root[:, n:], n)
    u = w @ u0[:, :n]
    v = w @ v0[:, n:]
    core = hermitian_part(np.asarray(get_block(h, 1, 1) + get_block(h, 2, 2)))
    cert = DecompositionCertificate(
        kind="two_block_isometry",
        target=h.data.copy(),
        weight=Fraction(1, 2),
        core=core,
        factors=(u, v),
    )
    return _certified(cert)


@dataclass(frozen=True, eq=False)
class QuaternionStageTrace:
    """Intermediate matrices of the quaternion route, kept for stage checks.

    ``omega = w @ g @ w*`` has skew-Hermitian off-diagonal 2n-blocks;
    ``phi = r2 @ omega @ r2*`` has all four diagonal 2n-blocks equal to
    ``d``, a quarter of the doubled partial trace.
    """

    g: np.ndarray
    w: np.ndarray
    omega: np.ndarray
    r2: np.ndarray
    phi: np.ndarray
    d: np.ndarray


def _zero_pad_blocks(h: BlockMatrix, new_count: int) -> BlockMatrix:
    n = h.block_dim
    side = new_count * n
    data = np.zeros((side, side), dtype=np.complex128)
    data[: h.side, : h.side] = h.data
    return BlockMatrix(data, block_dim=n, block_count=new_count)


def _restrict_rows(
    factor: np.ndarray,
    keep: np.ndarray,
    drop: np.ndarray,
    core: np.ndarray,
    tol: Tolerance,
) -> np.ndarray:
    """Delete padded rows of an isometry, restoring orthonormality on the
    kernel of the core when the deleted rows carried weight there.

    Components of the deleted rows on ran(core) are already negligible
    (the padded coordinates of the target vanish, and the isometry defect
    is quadratic in the row norms); components on ker(core) are free and
    get re-orthonormalized, which cannot change ``V core V*``.
    """
    trimmed = factor[keep, :]
    dropped = factor[drop, :]
    row_norms = np.linalg.norm(dropped, axis=1)
    if row_norms.size == 0 or float(row_norms.max()) <= tol.atol:
        return trimmed
    cols = trimmed.shape[1]
    defect = frobenius(dagger(trimmed) @ trimmed - np.eye(cols))
    if tol.allows(defect, 1.0):
        return trimmed
    spectrum = hermitian_eig(core)
    threshold = tol.slack(float(abs(spectrum.values).max()))
    kernel_mask = spectrum.values <= threshold
    kdim = int(kernel_mask.sum())
    if kdim == 0:
        raise NumericalError(
            "padded rows carry weight outside the core kernel; cannot restore isometry"
        )
    b_ker = spectrum.vectors[:, kernel_mask]
    b_ran = spectrum.vectors[:, ~kernel_mask]
    rows = trimmed.shape[0]
    if b_ran.shape[1] == 0:
        # core vanishes: any isometry reconstructs it, take coordinate columns
        fresh = np.eye(rows, dtype=np.complex128)[:, :kdim]
        return fresh @ dagger(b_ker)
    ran_part = trimmed @ b_ran
    completion = unitary_completion(ran_part, tol)
    fresh = completion[:, b_ran.shape[1] : b_ran.shape[1] + kdim]
    return ran_part @ dagger(b_ran) + fresh @ dagger(b_ker)


def quaternion_pipeline(
    h: BlockMatrix, beta: int, tol: Tolerance = DEFAULT_TOL
) -> tuple[QuaternionStageTrace, DecompositionCertificate]:
    """Decompose ``H (+) H`` as a quarter of four isometry conjugates of
    the doubled partial trace, for 3 or 4 Hermitian blocks.

    Stages: duplicate every block, conjugate by the direct sum of the
    four inflated quaternion units (off-diagonal blocks become
    skew-Hermitian), then by the sign-pattern unitary R2 (all diagonal
    blocks collapse onto a quarter of the doubled partial trace), corner
    decompose, and pull the active column blocks back through the
    congruences. For beta = 3 the computation runs on a zero-padded
    fourth block and the padded rows are deleted afterwards; beta = 4
    with a 3x3 partition keeps the padded target instead.

    Returns the stage trace alongside the certificate.
    """
    alpha, n = h.block_count, h.block_dim
    if beta not in (3, 4):
        raise ValueError("beta must be 3 or 4")
    if alpha not in (3, 4):
        raise ValueError("partition must have 3 or 4 block rows")
    if beta == 3 and alpha != 3:
        raise ValueError("beta = 3 requires a 3x3 partition")
    report = validate_hermitian_blocks(h, tol)
    if not report.ok:
        raise HypothesisError(
            f"all blocks must be Hermitian; offending (s, t, defect): {report.offending}"
        )
    _require_psd(h.data, tol, "quaternion decomposition input")
    padded = h if alpha == 4 else _zero_pad_blocks(h, 4)
    g = duplicate_blocks(padded)
    w = np.zeros((8 * n, 8 * n), dtype=np.complex128)
    for i, unit in enumerate(quaternion_unit_blocks(n)):
        w[2 * n * i : 2 * n * (i + 1), 2 * n * i : 2 * n * (i + 1)] = unit
    omega = hermitian_part(w @ g.data @ dagger(w))
    sign = np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=float
    )
    r2 = np.kron(sign, np.eye(2 * n)).astype(np.complex128) / 2.0
    phi = hermitian_part(r2 @ omega @ dagger(r2))
    delta = partial_trace(h)
    core = direct_sum(delta, delta)
    inner = corner_decomposition_general(
        BlockMatrix(phi, block_dim=2 * n, block_count=4), tol
    )
    pre = interleave_permutation(4, n).matrix().T @ dagger(w) @ dagger(r2)
    factors = [
        pre @ uk[:, 2 * n * k : 2 * n * (k + 1)] for k, uk in enumerate(inner.factors)
    ]
    if beta == 3:
        keep = np.r_[0 : 3 * n, 4 * n : 7 * n]
        drop = np.r_[3 * n : 4 * n, 7 * n : 8 * n]
        factors = [_restrict_rows(f, keep, drop, core, tol) for f in factors]
        target = direct_sum(h.data, h.data)
    else:
        target = direct_sum(padded.data, padded.data)
    cert = DecompositionCertificate(
        kind="quaternion",
        target=target,
        weight=Fraction(1, 4),
        core=core,
        factors=tuple(factors),
    )
    trace = QuaternionStageTrace(
        g=g.data, w=w, omega=omega, r2=r2, phi=phi, d=core / 4.0
    )
    return trace, _certified(cert)


def verify_certificate(
    cert: DecompositionCertificate, tol: Tolerance = DEFAULT_TOL
) -> CheckReport:
    """Recompute both certificate defects from scratch and judge them.

    The reconstruction bound scales with ``1 + ||target||_F``; isometry
    defects are judged at unit scale.
    """
    residual = reconstruction_residual(cert)
    bound = tol.slack(1.0 + frobenius(cert.target))
    items = [compare_le("reconstruction_defect", residual, bound, tol)]
    for k, defect in enumerate(isometry_defects(cert), start=1):
        items.append(compare_le(f"isometry_defect_{k}", defect, tol.slack(1.0), tol))
    return CheckReport(checks=tuple(items), tolerance=tol)


def certificate_to_json(cert: DecompositionCertificate) -> dict:
    obj = {
        "kind": cert.kind,
        "weight": str(cert.weight),
        "target": matrix_to_json(cert.target),
        "core": matrix_to_json(cert.core),
        "factors": [matrix_to_json(f) for f in cert.factors],
        "defects": {
            "reconstruction": float(cert.defects["reconstruction"]),
            "isometry": [float(d) for d in cert.defects["isometry"]],
        }
        if cert.defects is not None
        else None,
    }
    if cert.slots is not None:
        obj["slots"] = list(cert.slots)
    return obj


def certificate_from_json(obj) -> DecompositionCertificate:
    if not isinstance(obj, dict):
        raise MalformedCertificateError("certificate JSON must be an object")
    try:
        kind = obj["kind"]
        weight = Fraction(obj["weight"])
        target = matrix_from_json(obj["target"])
        core = matrix_from_json(obj["core"])
        factors = tuple(matrix_from_json(f) for f in obj["factors"])
    except MalformedCertificateError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedCertificateError(f"malformed certificate JSON: {exc}") from exc
    defects = obj.get("defects")
    slots = tuple(int(w) for w in obj["slots"]) if "slots" in obj else None
    cert = DecompositionCertificate(
        kind=kind,
        target=target,
        weight=weight,
        core=core,
        factors=factors,
        defects=defects,
        slots=slots,
    )
    _validate_certificate(cert)
    return cert
