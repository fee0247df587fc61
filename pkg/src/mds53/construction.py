"""
The (5,3) MDS code with two symbols per node.

Goal:
- Turn the four design parameters (lambda, mu, theta, eta) into the three 2x2
  coefficient matrices A1, A2, A3 and the 10x6 generator P.
- Check the ten design conditions that make the code MDS and let every node
  be repaired from one symbol per surviving node.

Node layout (1-based):
- nodes 1..3 store the message segments m1, m2, m3 unchanged
- node 4 stores m1 + m2 + m3
- node 5 stores A1^T m1 + A2^T m2 + A3^T m3
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from mds53.errors import InvalidParamsError, LinalgError
from mds53.galois import GF4, FieldSpec
from mds53.linalg import Mat, block, mat_rank, mat_scale, transpose

log = logging.getLogger(__name__)

N_NODES = 5
K = 3
ALPHA = 2
MESSAGE_SYMBOLS = K * ALPHA
SYSTEMATIC_NODES = (1, 2, 3)
PARITY_NODES = (4, 5)
ALL_NODES = (1, 2, 3, 4, 5)
STORAGE_OVERHEAD = Fraction(N_NODES, K)

# Same order as check_conditions evaluates them
CONDITION_LABELS = ("6a", "6b", "6c", "6d", "6e", "6f", "6g", "6h", "6i", "6j")

# What each condition guards, for reports
CONDITION_NAMES = {
    "6a": "lambda not 0 or 1",
    "6b": "mu not lambda, 0 or 1",
    "6c": "theta not 0 or 1",
    "6d": "eta not 0 or -1",
    "6e": "theta + eta nonzero",
    "6f": "A1 - A2 invertible",
    "6g": "A1 - A3 invertible",
    "6h": "A2 - A3 invertible",
    "6i": "first parity repair aligns",
    "6j": "second parity repair aligns",
}


@dataclass(frozen=True)
class CodeParams:
    """Design parameters as encoded field elements."""

    lambda_: int
    mu: int
    theta: int
    eta: int
    field: FieldSpec = GF4

    def __post_init__(self) -> None:
        for name, value in self.items():
            if not 0 <= value < self.field.order:
                raise InvalidParamsError(f"{name}={value} is not an element of {self.field}")

    def items(self) -> tuple[tuple[str, int], ...]:
        return (
            ("lambda", self.lambda_),
            ("mu", self.mu),
            ("theta", self.theta),
            ("eta", self.eta),
        )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.lambda_, self.mu, self.theta, self.eta)

    def serialize(self) -> str:
        """'q=4;poly=0x7;lambda=2;mu=3;theta=3;eta=2'"""
        parts = [f"q={self.field.order}", f"poly={self.field.prim_poly:#x}"]
        parts += [f"{name}={value}" for name, value in self.items()]
        return ";".join(parts)

    @classmethod
    def parse(cls, text: str) -> CodeParams:
        try:
            pairs = dict(part.split("=", 1) for part in text.strip().split(";") if part)
            order = int(pairs["q"])
            poly = int(pairs["poly"], 0)
            values = [int(pairs[name], 0) for name in ("lambda", "mu", "theta", "eta")]
        except (KeyError, ValueError) as exc:
            raise InvalidParamsError(
                f"cannot parse params {text!r}; expected q=..;poly=..;lambda=..;mu=..;theta=..;eta=.."
            ) from exc
        return cls(*values, field=FieldSpec(order, poly))

    def __str__(self) -> str:
        r = self.field.render
        return f"(lambda={r(self.lambda_)}, mu={r(self.mu)}, theta={r(self.theta)}, eta={r(self.eta)})"


def canonical_params(field_spec: FieldSpec = GF4) -> CodeParams:
    """lambda = eta = w, mu = theta = w + 1 over GF(4)."""
    if field_spec != GF4:
        raise InvalidParamsError(f"canonical params are only defined over GF(4), not {field_spec}")
    w, w1 = 2, 3
    return CodeParams(lambda_=w, mu=w1, theta=w1, eta=w, field=GF4)


def check_conditions(params: CodeParams) -> list[str]:
    """
    Labels of the design conditions params violate, in CONDITION_LABELS order.
    Empty list means the params give an MDS code with optimal repair.
    """
    f = params.field
    lam, mu, th, eta = params.as_tuple()
    add, sub, mul = f.add, f.sub, f.mul
    one = 1
    violated: list[str] = []

    if lam in (0, one):
        violated.append("6a")
    if mu in (lam, 0, one):
        violated.append("6b")
    if th in (0, one):
        violated.append("6c")
    if eta in (0, f.neg(one)):
        violated.append("6d")
    if add(th, eta) == 0:
        violated.append("6e")
    if mul(th, sub(one, lam)) == one:
        violated.append("6f")
    if mul(th, sub(mu, one)) == eta:
        violated.append("6g")
    if mul(th, sub(mu, lam)) == add(mul(eta, lam), mu):
        violated.append("6h")
    if sub(mu, one) == mul(eta, sub(one, lam)):
        violated.append("6i")
    # only defined when the denominator is nonzero
    if th and lam and sub(mu, one):
        num = mul(mul(eta, sub(th, one)), sub(mu, lam))
        den = mul(mul(th, lam), sub(mu, one))
        if add(eta, one) == f.div(num, den):
            violated.append("6j")
    return violated


def build_code_matrices(params: CodeParams) -> tuple[Mat, Mat, Mat]:
    """
    A1 = [[theta, 0], [eta, 1]]
    A2 = (1/lambda) [[theta - 1, 0], [eta, 1]]
    A3 = (1/mu) [[theta, -1], [eta, 1]]
    """
    f = params.field
    lam, mu, th, eta = params.as_tuple()
    if lam == 0 or mu == 0:
        raise InvalidParamsError(f"lambda and mu must be nonzero, got {params}")
    a1 = Mat.from_rows(f, [[th, 0], [eta, 1]])
    a2 = mat_scale(f.inv(lam), Mat.from_rows(f, [[f.sub(th, 1), 0], [eta, 1]]))
    a3 = mat_scale(f.inv(mu), Mat.from_rows(f, [[th, f.neg(1)], [eta, 1]]))
    return a1, a2, a3


def build_generator(matrices: tuple[Mat, Mat, Mat]) -> Mat:
    """10x6 generator: identity rows for nodes 1-3, [I I I] and [A1^T A2^T A3^T]."""
    a1, a2, a3 = matrices
    f = a1.field
    for a in matrices:
        if a.shape != (2, 2) or a.field != f:
            raise LinalgError("coefficient matrices must be 2x2 over one field")
    eye = Mat.identity(f, 2)
    zero = Mat.zeros(f, 2, 2)
    return block(
        f,
        [
            [eye, zero, zero],
            [zero, eye, zero],
            [zero, zero, eye],
            [eye, eye, eye],
            [transpose(a1), transpose(a2), transpose(a3)],
        ],
    )


@dataclass(frozen=True, eq=False)
class CodeInstance:
    params: CodeParams
    a1: Mat
    a2: Mat
    a3: Mat
    generator: Mat
    # filled lazily by codec.decode_matrix
    decode_cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.params.field

    @property
    def matrices(self) -> tuple[Mat, Mat, Mat]:
        return (self.a1, self.a2, self.a3)

    @property
    def field_size(self) -> int:
        return self.field.order

    @property
    def stripe_size(self) -> int:
        return ALPHA

    def coeff(self, j: int) -> Mat:
        """A_j for j in 1..3."""
        return self.matrices[j - 1]

    def node_rows(self, node: int) -> Mat:
        """The 2x6 block of the generator belonging to node."""
        check_node(node)
        return self.generator[2 * (node - 1) : 2 * node, :]


def check_node(node: int) -> int:
    if node not in ALL_NODES:
        raise InvalidParamsError(f"node must be one of 1..5, got {node}")
    return node


def make_instance(params: CodeParams, *, validate: bool = True) -> CodeInstance:
    """Build matrices and generator; refuse params that break a condition unless validate=False."""
    if validate:
        violated = check_conditions(params)
        if violated:
            described = ", ".join(f"{c} ({CONDITION_NAMES[c]})" for c in violated)
            raise InvalidParamsError(f"params {params} violate: {described}", violations=violated)
    matrices = build_code_matrices(params)
    inst = CodeInstance(params, *matrices, generator=build_generator(matrices))
    log.debug("built code instance for %s", params.serialize())
    return inst


def with_matrices(inst: CodeInstance, a1: Mat, a2: Mat, a3: Mat) -> CodeInstance:
    """Same params, different coefficient matrices (used to probe broken codes)."""
    return CodeInstance(inst.params, a1, a2, a3, generator=build_generator((a1, a2, a3)))


def structural_identity(inst: CodeInstance) -> bool:
    """
    A1^T == lambda A2^T + [e1 0] == mu A3^T + [e2 0], entry-wise.
    Holds for every instance built from params; hand-made matrices may break it.
    """
    f = inst.field
    lam, mu = inst.params.lambda_, inst.params.mu
    a1t = transpose(inst.a1)
    via_a2 = mat_scale(lam, transpose(inst.a2)) + Mat.from_rows(f, [[1, 0], [0, 0]])
    via_a3 = mat_scale(mu, transpose(inst.a3)) + Mat.from_rows(f, [[0, 0], [1, 0]])
    return a1t == via_a2 and a1t == via_a3


def rank_profile(inst: CodeInstance) -> dict[str, int]:
    a1, a2, a3 = inst.matrices
    return {
        "A1": mat_rank(a1),
        "A2": mat_rank(a2),
        "A3": mat_rank(a3),
        "A1-A2": mat_rank(a1 - a2),
        "A1-A3": mat_rank(a1 - a3),
        "A2-A3": mat_rank(a2 - a3),
    }