"""
Repair any single failed node from one symbol per surviving node.

Every repair follows the same shape:
- pick two helpers whose segments, together with the failed segment, form a
  basis of the message ("basis helpers"), and the two remaining helpers
  ("mixed helpers") whose segments are combinations of all three;
- the mixed helpers send v^T u for a download vector v chosen so that what
  they contribute about each basis helper lines up in one direction;
- each basis helper sends its segment projected on that direction, which
  cancels the interference and leaves two clean equations for the failed
  segment.

Four symbols cross the network instead of the six a full decode reads.

Layout per failed node:
- 1..3: basis helpers are the other systematic nodes, mixed helpers 4 and 5
- 4:    basis helpers 1 and 2, mixed helpers 3 and 5
- 5:    basis helpers 1 and 2, mixed helpers 3 and 4
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

from mds53.construction import ALPHA, K, MESSAGE_SYMBOLS, N_NODES, CodeInstance, check_node
from mds53.errors import LinalgError, MDSError, RepairError
from mds53.galois import FieldSpec, combine
from mds53.linalg import (
    Mat,
    Vec2,
    mat_inv,
    mat_inv2,
    mat_rank,
    mat_scale,
    mat_vec,
    null_vec2,
    row_vec,
    vec_scale,
    vstack,
)

log = logging.getLogger(__name__)

FAMILY_SYSTEMATIC = "systematic"
FAMILY_FIRST_PARITY = "first-parity"
FAMILY_SECOND_PARITY = "second-parity"

E1 = Vec2(1, 0)
E2 = Vec2(0, 1)


def min_repair_bandwidth(n: int = N_NODES, k: int = K, file_symbols: int = MESSAGE_SYMBOLS) -> Fraction:
    """Cut-set lower bound on symbols downloaded to repair one node with n-1 helpers."""
    if not 0 < k < n:
        raise RepairError(f"need 0 < k < n, got n={n}, k={k}")
    return Fraction(file_symbols, k) * Fraction(n - 1, n - k)


def helper_layout(failed: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """(basis helpers, mixed helpers) for a failed node."""
    check_node(failed)
    if failed in (1, 2, 3):
        basis = tuple(n for n in (1, 2, 3) if n != failed)
        return basis, (4, 5)
    if failed == 4:
        return (1, 2), (3, 5)
    return (1, 2), (3, 4)


def family_of(failed: int) -> str:
    check_node(failed)
    if failed <= 3:
        return FAMILY_SYSTEMATIC
    return FAMILY_FIRST_PARITY if failed == 4 else FAMILY_SECOND_PARITY


# Download vectors
@dataclass(frozen=True)
class RepairVectors:
    """
    Download vectors for the two mixed helpers.

    first goes to the first mixed helper, second to the other one. For the
    second parity node the vectors are derived in the coordinates of A3^T;
    those pre-images are kept as first_base / second_base.
    """

    failed: int
    family: str
    first: Vec2
    second: Vec2
    first_base: Vec2 | None = None
    second_base: Vec2 | None = None
    ratio: int | None = None


def systematic_repair_vectors(i: int, inst: CodeInstance) -> RepairVectors:
    """Failed systematic node i: one vector is fixed, the other is its image under A1 or A2."""
    a1, a2 = inst.a1, inst.a2
    if i == 3:
        second = E2
        first = mat_vec(a1, second)
    elif i == 2:
        second = E1
        first = mat_vec(a1, second)
    elif i == 1:
        second = Vec2(1, 1)
        first = mat_vec(a2, second)
    else:
        raise RepairError(f"node {i} is not systematic")
    return RepairVectors(i, FAMILY_SYSTEMATIC, first, second)


def parity1_repair_vectors(inst: CodeInstance) -> RepairVectors:
    """Failed node 4: second = (lambda-1, mu-1), first = (A1 - A3) second."""
    f = inst.field
    lam, mu = inst.params.lambda_, inst.params.mu
    second = Vec2(f.sub(lam, 1), f.sub(mu, 1))
    if second.is_zero():
        raise RepairError("condition 6i: download vector for node 5 is zero")
    first = mat_vec(inst.a1 - inst.a3, second)
    return RepairVectors(4, FAMILY_FIRST_PARITY, first, second)


def parity2_repair_vectors(inst: CodeInstance) -> RepairVectors:
    """
    Failed node 5.

    With p = (mu-1)/(mu-lambda), second_base spans the kernel of
    A1 ((A1^-1 A3 - I) - p (A2^-1 A3 - I)), first_base = A1^-1 (A3 - A1) second_base,
    and the vectors actually sent are A3 times each.
    """
    f = inst.field
    a1, a2, a3 = inst.matrices
    lam, mu = inst.params.lambda_, inst.params.mu
    if mu == lam:
        raise RepairError("condition 6j: mu equals lambda")
    ratio = f.div(f.sub(mu, 1), f.sub(mu, lam))
    eye = Mat.identity(f, 2)
    try:
        a1_inv = mat_inv2(a1)
        a2_inv = mat_inv2(a2)
    except LinalgError as exc:
        raise RepairError(f"condition 6j: {exc}") from exc
    residual = (a1_inv @ a3 - eye) - mat_scale(ratio, a2_inv @ a3 - eye)
    kernel_of = a1 @ residual
    if mat_rank(kernel_of) != 1:
        raise RepairError(
            f"condition 6j: alignment matrix has rank {mat_rank(kernel_of)}, need 1"
        )
    second_base = null_vec2(kernel_of)
    first_base = mat_vec(a1_inv @ (a3 - a1), second_base)
    if mat_rank(Mat.from_rows(f, [first_base, second_base])) != 2:
        raise RepairError("condition 6j: download vectors for node 5 are collinear")
    return RepairVectors(
        5,
        FAMILY_SECOND_PARITY,
        first=mat_vec(a3, first_base),
        second=mat_vec(a3, second_base),
        first_base=first_base,
        second_base=second_base,
        ratio=ratio,
    )


def repair_vectors(failed: int, inst: CodeInstance) -> RepairVectors:
    family = family_of(failed)
    if family == FAMILY_SYSTEMATIC:
        return systematic_repair_vectors(failed, inst)
    if family == FAMILY_FIRST_PARITY:
        return parity1_repair_vectors(inst)
    return parity2_repair_vectors(inst)


# Change of basis
def mixed_blocks(failed: int, inst: CodeInstance) -> dict[int, tuple[Mat, Mat, Mat]]:
    """
    For each mixed helper, its segment written in the basis
    (basis helper a, basis helper b, failed node): three 2x2 blocks.
    """
    (a, b), mixed = helper_layout(failed)
    change = vstack([inst.node_rows(a), inst.node_rows(b), inst.node_rows(failed)])
    try:
        back = mat_inv(change)
    except LinalgError as exc:
        raise RepairError(f"nodes {a}, {b}, {failed} do not span the message: {exc}") from exc
    out = {}
    for p in mixed:
        rows = inst.node_rows(p) @ back
        out[p] = (rows[:, 0:2], rows[:, 2:4], rows[:, 4:6])
    return out


def _normalized(v: Vec2, f: FieldSpec) -> Vec2:
    lead = v.x if v.x else v.y
    return vec_scale(f.inv(lead), v, f)


def _coefficient(r: Vec2, direction: Vec2, f: FieldSpec) -> int:
    """c with r == c * direction, for r already known to lie on direction."""
    return f.div(r.x, direction.x) if direction.x else f.div(r.y, direction.y)


# Plans
@dataclass(frozen=True, eq=False)
class RepairPlan:
    """
    Everything needed to rebuild one node.

    downloads[j] is the vector helper j combines its segment with.
    cancel[j] = (c1, c2): how much of helper j's symbol to strip from each
    mixed helper's symbol. reconstruct maps the failed segment to the two
    cleaned symbols.
    """

    failed: int
    family: str
    downloads: dict[int, Vec2]
    cancel: dict[int, tuple[int, int]]
    mixed: tuple[int, int]
    reconstruct: Mat
    bandwidth: int
    vectors: RepairVectors | None = dc_field(default=None, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.reconstruct.field

    @property
    def helpers(self) -> tuple[int, ...]:
        return tuple(sorted(self.downloads))

    def to_manifest(self) -> str:
        f = self.field

        def hx(*values: int) -> str:
            return " ".join(f"{v:#04x}" for v in values)

        lines = [
            f"# repair plan for node {self.failed}",
            f"field {f.order} {f.prim_poly:#x}",
            f"failed {self.failed}",
            f"family {self.family}",
            f"bandwidth {self.bandwidth}",
        ]
        lines += [f"download {node} {hx(*vec)}" for node, vec in sorted(self.downloads.items())]
        lines += [f"cancel {node} {hx(*coeffs)}" for node, coeffs in sorted(self.cancel.items())]
        lines.append(f"reconstruct {hx(*(v for row in self.reconstruct.tolist() for v in row))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_manifest(cls, text: str) -> RepairPlan:
        downloads: dict[int, Vec2] = {}
        cancel: dict[int, tuple[int, int]] = {}
        values: dict[str, list[str]] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, *rest = line.split()
            try:
                if key == "download":
                    downloads[int(rest[0])] = Vec2(int(rest[1], 0), int(rest[2], 0))
                elif key == "cancel":
                    cancel[int(rest[0])] = (int(rest[1], 0), int(rest[2], 0))
                else:
                    values[key] = rest
            except (IndexError, ValueError) as exc:
                raise RepairError(f"bad plan line {raw!r}") from exc
        missing = {"field", "failed", "family", "bandwidth", "reconstruct"} - set(values)
        if missing:
            raise RepairError(f"plan manifest is missing {sorted(missing)}")
        try:
            f = FieldSpec(int(values["field"][0]), int(values["field"][1], 0))
            failed = check_node(int(values["failed"][0]))
            r = [int(v, 0) for v in values["reconstruct"]]
            if len(r) != 4:
                raise ValueError(f"reconstruct needs 4 entries, got {len(r)}")
            reconstruct = Mat.from_rows(f, [r[0:2], r[2:4]])
            bandwidth = int(values["bandwidth"][0])
            for pair in (*downloads.values(), *cancel.values()):
                for x in pair:
                    f.check(x)
        except (IndexError, ValueError, MDSError) as exc:
            raise RepairError(f"bad plan manifest: {exc}") from exc
        basis, mixed = helper_layout(failed)
        survivors = set(basis) | set(mixed)
        if set(downloads) != survivors:
            raise RepairError(
                f"plan for node {failed} must download from nodes {sorted(survivors)}, got {sorted(downloads)}"
            )
        if set(cancel) != set(basis):
            raise RepairError(
                f"plan for node {failed} must cancel nodes {list(basis)}, got {sorted(cancel)}"
            )
        family = values["family"][0]
        if family != family_of(failed):
            raise RepairError(f"node {failed} belongs to the {family_of(failed)} family, not {family}")
        return cls(
            failed=failed,
            family=family,
            downloads=dict(sorted(downloads.items())),
            cancel=cancel,
            mixed=mixed,
            reconstruct=reconstruct,
            bandwidth=bandwidth,
        )


def _project(blocks: dict[int, tuple[Mat, Mat, Mat]], mixed: tuple[int, int], v1: Vec2, v2: Vec2, slot: int):
    """Rows v1^T B(p1, slot) and v2^T B(p2, slot)."""
    p1, p2 = mixed
    return row_vec(v1, blocks[p1][slot]), row_vec(v2, blocks[p2][slot])


def make_repair_plan(failed: int, inst: CodeInstance) -> RepairPlan:
    """Derive download vectors, cancellation coefficients and the reconstruct matrix."""
    vectors = repair_vectors(failed, inst)
    f = inst.field
    basis, mixed = helper_layout(failed)
    blocks = mixed_blocks(failed, inst)

    downloads = {mixed[0]: vectors.first, mixed[1]: vectors.second}
    cancel: dict[int, tuple[int, int]] = {}
    for slot, j in enumerate(basis):
        r1, r2 = _project(blocks, mixed, vectors.first, vectors.second, slot)
        if mat_rank(Mat.from_rows(f, [r1, r2])) != 1:
            raise RepairError(
                f"node {failed}: interference from node {j} does not align "
                f"(rank {mat_rank(Mat.from_rows(f, [r1, r2]))})"
            )
        direction = _normalized(r1 if not r1.is_zero() else r2, f)
        downloads[j] = direction
        cancel[j] = (_coefficient(r1, direction, f), _coefficient(r2, direction, f))

    s1, s2 = _project(blocks, mixed, vectors.first, vectors.second, 2)
    reconstruct = Mat.from_rows(f, [s1, s2])
    if mat_rank(reconstruct) != 2:
        raise RepairError(f"node {failed}: the two cleaned symbols do not determine the segment")

    plan = RepairPlan(
        failed=failed,
        family=vectors.family,
        downloads=dict(sorted(downloads.items())),
        cancel=cancel,
        mixed=mixed,
        reconstruct=reconstruct,
        bandwidth=len(downloads),
        vectors=vectors,
    )
    log.debug("repair plan for node %d: helpers %s", failed, plan.helpers)
    return plan


def make_all_plans(inst: CodeInstance) -> dict[int, RepairPlan]:
    return {node: make_repair_plan(node, inst) for node in range(1, N_NODES + 1)}


def helper_symbol(plan: RepairPlan, node: int, segment: Sequence):
    """The one symbol helper `node` sends: its segment combined with its download vector."""
    if node not in plan.downloads:
        raise RepairError(f"node {node} is not a helper for node {plan.failed}")
    return combine(plan.field, plan.downloads[node], segment)


def execute_repair(plan: RepairPlan, downloaded: Mapping[int, object]) -> tuple:
    """Rebuild the failed segment from the helpers' symbols (keyed by node)."""
    if set(downloaded) != set(plan.downloads):
        raise RepairError(
            f"repair of node {plan.failed} needs symbols from {sorted(plan.downloads)}, "
            f"got {sorted(downloaded)}"
        )
    f = plan.field
    basis, _ = helper_layout(plan.failed)
    if set(plan.cancel) != set(basis):
        raise RepairError(f"repair of node {plan.failed} needs cancel coefficients for nodes {list(basis)}")
    a, b = basis
    cleaned = []
    for which, p in enumerate(plan.mixed):
        coeffs = [1, f.neg(plan.cancel[a][which]), f.neg(plan.cancel[b][which])]
        cleaned.append(combine(f, coeffs, [downloaded[p], downloaded[a], downloaded[b]]))
    recover = mat_inv2(plan.reconstruct).tolist()
    return (combine(f, recover[0], cleaned), combine(f, recover[1], cleaned))


# Checks
@dataclass(frozen=True)
class AlignmentCheck:
    name: str
    expected: int
    actual: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class AlignmentReport:
    failed: int
    checks: tuple[AlignmentCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AlignmentCheck]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> AlignmentCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_alignment(plan: RepairPlan, inst: CodeInstance) -> AlignmentReport:
    """
    Recompute everything a working plan must satisfy from its download vectors:
    rank 1 interference per basis helper, the helper's own vector inside that
    direction, cancel coefficients that strip exactly that interference, rank 2
    signal, a reconstruct matrix equal to the signal rows, and the bandwidth bound.
    Matching checks report 1 for a match and 0 otherwise.
    """
    f = inst.field
    if plan.field != f:
        raise RepairError(f"plan is over {plan.field}, the code is over {f}")
    basis, mixed = helper_layout(plan.failed)
    blocks = mixed_blocks(plan.failed, inst)
    zero = Vec2(0, 0)
    v1, v2 = plan.downloads.get(mixed[0], zero), plan.downloads.get(mixed[1], zero)
    checks: list[AlignmentCheck] = []
    for slot, j in enumerate(basis):
        r1, r2 = _project(blocks, mixed, v1, v2, slot)
        checks.append(AlignmentCheck(f"interference:node{j}", 1, mat_rank(Mat.from_rows(f, [r1, r2]))))
        d = plan.downloads.get(j, zero)
        # a zero vector downloads nothing and cannot cancel anything
        spanned = mat_rank(Mat.from_rows(f, [r1, r2, d])) if not d.is_zero() else 0
        checks.append(AlignmentCheck(f"helper-download:node{j}", 1, spanned))
        if spanned == 1:
            expected = (_coefficient(r1, d, f), _coefficient(r2, d, f))
            matches = int(plan.cancel.get(j) == expected)
        else:
            matches = 0
        checks.append(AlignmentCheck(f"cancel:node{j}", 1, matches))
    s1, s2 = _project(blocks, mixed, v1, v2, 2)
    signal = Mat.from_rows(f, [s1, s2])
    checks.append(AlignmentCheck("signal", ALPHA, mat_rank(signal)))
    checks.append(AlignmentCheck("reconstruct", 1, int(plan.reconstruct == signal)))
    bound = min_repair_bandwidth()
    checks.append(AlignmentCheck("bandwidth", int(bound), plan.bandwidth))
    return AlignmentReport(plan.failed, tuple(checks))
