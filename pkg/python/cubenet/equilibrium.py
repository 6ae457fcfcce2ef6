"""Player payoffs, best responses and the Kuhn-Tucker optimality check.

A player ships one unit of goods: ``x_self`` stays at the node (storage cost
``c_self`` per unit) and ``x_j`` goes to destination ``j`` (benefit ``b_j``,
delivery cost ``c_j``). The objective is linear over the simplex, so the best
responses are exactly the allocations supported on the destinations with the
largest net benefit ``b_j - c_j``.
"""
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
)

from .exceptions import (
    InvalidAllocation,
    InvalidProblem,
    PreconditionFailed,
    SchemaError,
)
from .interface import SCHEMA_VERSION, Verdict
from .lattice import Network
from .utils import parse_fraction

LOG = logging.getLogger(__name__)

SAMPLER_ALGORITHM = "mt19937-expovariate-normalized/1"

STORAGE = "x_self"

ZERO = Fraction(0)
ONE = Fraction(1)


def _exact(value: Any, name: str, error: Type[Exception]) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, Rational):
        raise error(name, f"{value!r} is not an exact rational")
    return Fraction(value)


def _variable(destination: int) -> str:
    return f"x_{destination}"


@dataclass(frozen=True)
class PlayerProblem:
    player: int
    destinations: Tuple[int, ...]
    benefits: Tuple[Fraction, ...]
    costs: Tuple[Fraction, ...]
    storage_cost: Fraction

    def __post_init__(self) -> None:
        destinations = tuple(self.destinations)
        benefits = tuple(_exact(b, "b_{ij}", InvalidProblem) for b in self.benefits)
        costs = tuple(_exact(c, "c_{ij}", InvalidProblem) for c in self.costs)
        storage = _exact(self.storage_cost, "c_{ii}", InvalidProblem)
        if not destinations:
            raise InvalidProblem("destinations", "a player needs a destination")
        if len(set(destinations)) != len(destinations):
            raise InvalidProblem("destinations", "destinations repeat")
        if self.player in destinations:
            raise InvalidProblem("destinations", "a player cannot ship to itself")
        if not len(benefits) == len(costs) == len(destinations):
            raise InvalidProblem(
                "destinations",
                f"{len(destinations)} destinations, {len(benefits)} benefits "
                f"and {len(costs)} costs",
            )
        if storage <= 0:
            raise InvalidProblem("c_{ii} > 0", f"c_self = {storage}")
        for j, b, c in zip(destinations, benefits, costs):
            if not b > c > 0:
                raise InvalidProblem(
                    "b_{ij} > c_{ij} > 0", f"destination {j} has b={b}, c={c}"
                )
        object.__setattr__(self, "destinations", destinations)
        object.__setattr__(self, "benefits", benefits)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "storage_cost", storage)

    @classmethod
    def uniform(
        cls,
        player: int,
        destinations: Iterable[int],
        net_benefit: Fraction,
        storage_cost: Fraction,
        delivery_cost: Fraction = ONE,
    ) -> "PlayerProblem":
        destinations = tuple(destinations)
        return cls(
            player=player,
            destinations=destinations,
            benefits=tuple(Fraction(delivery_cost) + net_benefit for _ in destinations),
            costs=tuple(Fraction(delivery_cost) for _ in destinations),
            storage_cost=Fraction(storage_cost),
        )

    @property
    def net_benefits(self) -> Tuple[Fraction, ...]:
        return tuple(b - c for b, c in zip(self.benefits, self.costs))

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "player": self.player,
            "destinations": list(self.destinations),
            "benefits": list(self.benefits),
            "costs": list(self.costs),
            "storage_cost": self.storage_cost,
        }

    @classmethod
    def _deserialize(
        cls: Type["PlayerProblem"], json_data: Mapping[str, Any]
    ) -> "PlayerProblem":
        try:
            return cls(
                player=int(json_data["player"]),
                destinations=tuple(int(j) for j in json_data["destinations"]),
                benefits=tuple(parse_fraction(b) for b in json_data["benefits"]),
                costs=tuple(parse_fraction(c) for c in json_data["costs"]),
                storage_cost=parse_fraction(json_data["storage_cost"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"Malformed player problem: {e!r}") from e


@dataclass(frozen=True)
class Allocation:
    x_self: Fraction
    shares: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_self", self._coerce(self.x_self))
        object.__setattr__(
            self, "shares", tuple(self._coerce(x) for x in self.shares)
        )

    @staticmethod
    def _coerce(value: Any) -> Fraction:
        if isinstance(value, bool) or not isinstance(value, Rational):
            raise InvalidAllocation(f"{value!r} is not an exact rational")
        return Fraction(value)

    @classmethod
    def of(cls, *values: Any) -> "Allocation":
        return cls(values[0], tuple(values[1:]))

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return (self.x_self,) + self.shares

    def check_simplex(self) -> None:
        for v in self.values:
            if not ZERO <= v <= ONE:
                raise InvalidAllocation(f"Component {v} lies outside [0, 1]")
        total = sum(self.values)
        if total != ONE:
            raise InvalidAllocation(f"Components sum to {total}, not 1")

    def support(self) -> Tuple[int, ...]:
        return tuple(j for j, x in enumerate(self.shares) if x > 0)

    def _serialize(self) -> Mapping[str, Any]:
        return {"x_self": self.x_self, "x": list(self.shares)}

    @classmethod
    def _deserialize(
        cls: Type["Allocation"], json_data: Mapping[str, Any]
    ) -> "Allocation":
        try:
            return cls(
                parse_fraction(json_data["x_self"]),
                tuple(parse_fraction(x) for x in json_data["x"]),
            )
        except (KeyError, TypeError) as e:
            raise SchemaError(f"Malformed allocation: {e!r}") from e


@dataclass(frozen=True)
class PathVector:
    v_self: int
    v: Tuple[int, ...]

    @property
    def values(self) -> Tuple[int, ...]:
        return (self.v_self,) + self.v


def path_vector_of(x: Allocation) -> PathVector:
    return PathVector(int(x.x_self > 0), tuple(int(share > 0) for share in x.shares))


def _check_arity(p: PlayerProblem, x: Allocation) -> None:
    if len(x.shares) != len(p.destinations):
        raise InvalidAllocation(
            f"Allocation has {len(x.shares)} destination shares, "
            f"player {p.player} has {len(p.destinations)} destinations"
        )


def payoff(p: PlayerProblem, x: Allocation) -> Fraction:
    _check_arity(p, x)
    x.check_simplex()
    v = path_vector_of(x)
    delivered = sum(
        (r * vj * xj for r, vj, xj in zip(p.net_benefits, v.v, x.shares)), ZERO
    )
    return delivered - p.storage_cost * v.v_self * x.x_self


@dataclass(frozen=True)
class KTCertificate:
    mu: Fraction
    lambdas: Tuple[Fraction, Fraction, Fraction] = (ZERO, ZERO, ZERO)

    def _serialize(self) -> Mapping[str, Any]:
        return {"mu": self.mu, "lambdas": list(self.lambdas)}


@dataclass(frozen=True)
class BestResponse:
    player: int
    argmax_set: Tuple[int, ...]
    value: Fraction
    representative: Allocation
    certificate: KTCertificate

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "player": self.player,
            "argmax_set": list(self.argmax_set),
            "value": self.value,
            "representative": self.representative,
            "certificate": self.certificate,
        }


def _argmax_positions(p: PlayerProblem) -> Tuple[int, ...]:
    best = max(p.net_benefits)
    return tuple(j for j, r in enumerate(p.net_benefits) if r == best)


def best_response(p: PlayerProblem) -> BestResponse:
    positions = _argmax_positions(p)
    value = p.net_benefits[positions[0]]
    share = Fraction(1, len(positions))
    shares = tuple(
        share if j in positions else ZERO for j in range(len(p.destinations))
    )
    return BestResponse(
        player=p.player,
        argmax_set=tuple(p.destinations[j] for j in positions),
        value=value,
        representative=Allocation(ZERO, shares),
        certificate=KTCertificate(mu=value),
    )


@dataclass(frozen=True)
class KTCondition:
    variable: str
    value: Fraction
    on_support: bool
    residual: Fraction

    @property
    def relation(self) -> str:
        return "= 0" if self.on_support else "<= 0"

    @property
    def holds(self) -> bool:
        if self.on_support:
            return self.residual == 0
        return self.residual <= 0

    @property
    def slack(self) -> bool:
        return self.value == 0 or self.residual == 0

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "variable": self.variable,
            "value": self.value,
            "relation": self.relation,
            "residual": self.residual,
            "holds": self.holds,
            "complementary_slackness": self.slack,
        }


@dataclass(frozen=True)
class KTReport:
    player: int
    mu: Optional[Fraction]
    conditions: Tuple[KTCondition, ...]
    feasibility: Mapping[str, bool]
    violation: Optional[str] = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.violated if self.violation else Verdict.satisfied

    @property
    def satisfied(self) -> bool:
        return self.violation is None

    @property
    def residuals(self) -> Dict[str, Fraction]:
        return {c.variable: c.residual for c in self.conditions}

    @property
    def slackness(self) -> Dict[str, bool]:
        return {c.variable: c.slack for c in self.conditions}

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "player": self.player,
            "mu": self.mu,
            "conditions": list(self.conditions),
            "feasibility": dict(self.feasibility),
            "verdict": self.verdict.value,
            "violation": self.violation,
        }


def kt_verify(p: PlayerProblem, x: Allocation) -> KTReport:
    """Check the Kuhn-Tucker conditions of ``x``; never raises on bad input."""
    names = [STORAGE] + [_variable(j) for j in p.destinations]
    reduced = [-p.storage_cost] + list(p.net_benefits)
    arity = len(x.shares) == len(p.destinations)
    feasibility = {
        "arity": arity,
        "bounds": all(ZERO <= v <= ONE for v in x.values),
        "sum": sum(x.values) == ONE,
    }
    if not arity:
        return KTReport(
            p.player, None, (), feasibility, violation="feasibility: arity"
        )

    values = list(x.values)
    support = [i for i, v in enumerate(values) if v > 0]
    violation = None
    if support:
        mu = reduced[support[0]]
        for i in support[1:]:
            if reduced[i] != mu:
                violation = (
                    f"support: reduced benefit of {names[support[0]]} is {mu} "
                    f"but {names[i]} has {reduced[i]}"
                )
                break
    else:
        mu = max(reduced)

    conditions = []
    for i, (name, value, r) in enumerate(zip(names, values, reduced)):
        if i == 0 and value == 0:
            # with no storage the multiplier alone is bounded
            residual = -mu
        else:
            residual = r - mu
        conditions.append(KTCondition(name, value, value > 0, residual))

    if violation is None:
        for condition in conditions:
            if not condition.holds:
                violation = (
                    f"stationarity at {condition.variable}: "
                    f"residual {condition.residual} not {condition.relation}"
                )
                break
    if violation is None:
        for name, ok in feasibility.items():
            if not ok:
                violation = f"feasibility: {name}"
                break
    if violation:
        LOG.debug("Player %d allocation violates KT: %s", p.player, violation)
    return KTReport(p.player, mu, tuple(conditions), feasibility, violation)


@dataclass(frozen=True)
class VCaseRow:
    v: PathVector
    feasible: bool
    payoff: Optional[Fraction]
    attained: bool
    note: str
    allocation: Optional[Allocation] = None

    @property
    def dominated(self) -> bool:
        return self.feasible and not self.attained

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "v": list(self.v.values),
            "feasible": self.feasible,
            "payoff": self.payoff,
            "attained": self.attained,
            "dominated": self.dominated,
            "note": self.note,
        }


def v_case_payoff(p: PlayerProblem, v: PathVector, x_self: Fraction) -> Fraction:
    """Payoff of a one-destination player under path vector ``v``."""
    r = p.net_benefits[0]
    return r * v.v[0] * (1 - x_self) - p.storage_cost * v.v_self * x_self


def enumerate_v_cases(p: PlayerProblem) -> List[VCaseRow]:
    if len(p.destinations) != 1:
        raise PreconditionFailed(
            f"The path vector table needs one destination, "
            f"player {p.player} has {len(p.destinations)}"
        )
    r = p.net_benefits[0]
    return [
        VCaseRow(
            PathVector(0, (0,)),
            feasible=False,
            payoff=None,
            attained=False,
            note="contradicts sum of x = 1",
        ),
        VCaseRow(
            PathVector(1, (0,)),
            feasible=True,
            payoff=-p.storage_cost,
            attained=True,
            note="storage only",
            allocation=Allocation(ONE, (ZERO,)),
        ),
        VCaseRow(
            PathVector(0, (1,)),
            feasible=True,
            payoff=r,
            attained=True,
            note="deliver everything",
            allocation=Allocation(ZERO, (ONE,)),
        ),
        VCaseRow(
            PathVector(1, (1,)),
            feasible=True,
            payoff=r,
            attained=False,
            note=(
                "supremum b-c approached as x_self -> 0; "
                "stationarity -mu = 0 and b-c-mu = 0 cannot both hold"
            ),
        ),
    ]


def best_v_case(rows: Sequence[VCaseRow]) -> VCaseRow:
    attained = [row for row in rows if row.attained]
    return max(attained, key=lambda row: row.payoff)  # type: ignore


def _check_seed(seed: int) -> None:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise PreconditionFailed(f"Seed must be an integer, got {seed!r}")
    if not -(2 ** 63) <= seed < 2 ** 64:
        raise PreconditionFailed(f"Seed {seed} does not fit in 64 bits")


def sample_best_response(p: PlayerProblem, seed: int) -> Allocation:
    """Draw a best response uniformly from the simplex over the argmax set.

    Independent unit-exponential draws are normalized; the floats are taken
    exactly as ``Fraction`` values so the shares sum to one exactly.
    """
    _check_seed(seed)
    positions = _argmax_positions(p)
    shares = [ZERO] * len(p.destinations)
    if len(positions) == 1:
        shares[positions[0]] = ONE
        return Allocation(ZERO, tuple(shares))
    rng = random.Random(seed % 2 ** 64)
    draws = [Fraction(rng.expovariate(1.0)) for _ in positions]
    total = sum(draws)
    if total == 0:
        draws, total = [ONE] * len(positions), Fraction(len(positions))
    for j, draw in zip(positions, draws):
        shares[j] = draw / total
    return Allocation(ZERO, tuple(shares))


def problems_for_network(
    net: Network,
    net_benefit: Fraction = Fraction(2),
    storage_cost: Fraction = ONE,
    delivery_cost: Fraction = ONE,
) -> List[PlayerProblem]:
    players = range(len(net.nodes))
    return [
        PlayerProblem.uniform(
            i,
            (j for j in players if j != i),
            net_benefit,
            storage_cost,
            delivery_cost,
        )
        for i in players
    ]


def _check_problem_set(net: Network, problems: Sequence[PlayerProblem]) -> None:
    n = len(net.nodes)
    if len(problems) != n:
        raise PreconditionFailed(
            f"Network '{net.label}' has {n} players, got {len(problems)} problems"
        )
    if sorted(p.player for p in problems) != list(range(n)):
        raise PreconditionFailed("Expected exactly one problem per node index")
    for p in problems:
        if set(p.destinations) != set(range(n)) - {p.player}:
            raise PreconditionFailed(
                f"Player {p.player} does not ship to every other node"
            )


def is_randomly_complete(net: Network, problems: Sequence[PlayerProblem]) -> bool:
    """True iff every player faces one common positive net benefit and storage cost.

    Then every player has the same KT system and every link carries goods in
    some best response.
    """
    _check_problem_set(net, problems)
    profile = {r for p in problems for r in p.net_benefits}
    storage = {p.storage_cost for p in problems}
    complete = len(profile) == 1 and min(profile) > 0 and len(storage) == 1
    LOG.debug(
        "'%s': %d net benefit levels, %d storage costs, randomly complete=%s",
        net.label,
        len(profile),
        len(storage),
        complete,
    )
    return complete


@dataclass
class ProblemSet:
    problems: List[PlayerProblem]
    network: Optional[str] = None
    allocations: Dict[int, Allocation] = field(default_factory=dict)

    def _serialize(self) -> Mapping[str, Any]:
        document: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "problems": [],
        }
        for p in self.problems:
            entry = dict(p._serialize())  # pylint: disable=protected-access
            if p.player in self.allocations:
                entry["allocation"] = self.allocations[p.player]
            document["problems"].append(entry)
        if self.network is not None:
            document["network"] = self.network
        return document

    @classmethod
    def _deserialize(
        cls: Type["ProblemSet"], json_data: Mapping[str, Any]
    ) -> "ProblemSet":
        """Read a problem file: one problem object or a versioned problem list."""
        if not isinstance(json_data, Mapping):
            raise SchemaError("A problem file holds a JSON object")
        version = json_data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaError(f"Unsupported schema_version {version!r}")
        entries = json_data["problems"] if "problems" in json_data else [json_data]
        problems, allocations = [], {}
        for entry in entries:
            p = PlayerProblem._deserialize(entry)  # pylint: disable=protected-access
            problems.append(p)
            if "allocation" in entry:
                allocation = entry["allocation"]
                # pylint: disable=protected-access
                allocations[p.player] = Allocation._deserialize(allocation)
        return cls(problems, json_data.get("network"), allocations)
