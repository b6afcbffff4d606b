"""Obstructions to a surface-by-surface group being a Kodaira fibration group.

Every check returns an :class:`ObstructionOutcome`. ``verdict`` aggregates them;
an ``unobstructed`` verdict only means no implemented check excludes the
bundle, never that a Kodaira fibration exists.

For declared blocks the coinvariant rank is only known to lie in a set of
candidates; a check excludes only if it excludes every candidate.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import ParityUndefined
from .meyer import bundle_signature
from .monodromy import (BundleSpec, CoinvariantsReport, DeclaredBlock, GeneratingSetRep,
                        SymplecticRep, bundle_coinvariants, candidate_ranks, coinvariants,
                        evaluate_word)
from .surface import (CyclicCoverSpec, SurfacePresentation, cover_genus, generator_name,
                      schreier_generators)


class Status(str, enum.Enum):
    EXCLUDED = "excluded"
    PASSED = "passed"
    INCONCLUSIVE = "inconclusive"
    CONDITIONAL = "conditional"


@dataclass(frozen=True)
class ObstructionOutcome:
    name: str
    status: Status
    detail: str
    rule: str = ""
    witness: dict | None = None
    conditional_check: bool = False

    def __post_init__(self):
        if self.status is Status.CONDITIONAL and not self.conditional_check:
            raise ValueError("only conditional checks may report a conditional status")


@dataclass(frozen=True)
class Verdict:
    outcomes: tuple[ObstructionOutcome, ...]

    @property
    def unconditional(self) -> tuple[ObstructionOutcome, ...]:
        return tuple(o for o in self.outcomes if not o.conditional_check)

    @property
    def conditional(self) -> tuple[ObstructionOutcome, ...]:
        return tuple(o for o in self.outcomes if o.conditional_check)

    @property
    def overall(self) -> str:
        if any(o.status is Status.EXCLUDED for o in self.unconditional):
            return "excluded"
        return "unobstructed"

    @property
    def has_inconclusive(self) -> bool:
        return any(o.status is Status.INCONCLUSIVE for o in self.unconditional)

    def outcome(self, name: str) -> ObstructionOutcome:
        for o in self.outcomes:
            if o.name == name:
                return o
        raise KeyError(name)


@dataclass(frozen=True)
class CheckConfig:
    enable_modified_xiao: bool = False
    cover_degrees: tuple[int, ...] = (2, 3, 4, 5, 6)
    cover_strategy: str = "single-generator"
    exhaustive_cap: int = 10000
    chi: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "cover_degrees", tuple(self.cover_degrees))
        if any(n < 2 for n in self.cover_degrees):
            raise ValueError("cover degrees must be >= 2")
        if self.cover_strategy not in ("single-generator", "exhaustive-capped"):
            raise ValueError(f"unknown cover strategy {self.cover_strategy!r}")
        if self.exhaustive_cap < 1:
            raise ValueError("exhaustive_cap must be positive")


@dataclass(frozen=True)
class ChernInvariants:
    chi: int
    e: int
    sigma: int
    K2: int

    @property
    def slope(self) -> Fraction | None:
        return Fraction(self.K2, self.e) if self.e else None


def _outcome(name, status, detail, rule, **kw) -> ObstructionOutcome:
    return ObstructionOutcome(name, Status(status), detail, rule, **kw)


def check_genus_bounds(g: int, b: int) -> ObstructionOutcome:
    problems = []
    if b < 2:
        problems.append(f"base genus b = {b} < 2")
    if g < 3:
        problems.append(f"fiber genus g = {g} < 3")
    if problems:
        return _outcome("genus-bounds", "excluded", "; ".join(problems), "kodaira-genus-bounds")
    return _outcome("genus-bounds", "passed", f"b = {b} >= 2 and g = {g} >= 3", "kodaira-genus-bounds")


def check_parity(report: CoinvariantsReport | Sequence[int], b: int | None = None) -> ObstructionOutcome:
    """First Betti number ``2b + rank`` must be even.

    Accepts an exact report, or a list of candidate ranks together with ``b``.
    """
    if isinstance(report, CoinvariantsReport):
        ranks, b = [report.rank], report.base_genus
    else:
        ranks = list(report)
    odd = [r for r in ranks if r % 2]
    if len(ranks) == 1:
        b1 = 2 * b + ranks[0]
        if odd:
            return _outcome("parity", "excluded", f"b1 = 2*{b} + {ranks[0]} = {b1} is odd", "kahler-parity")
        return _outcome("parity", "passed", f"b1 = 2*{b} + {ranks[0]} = {b1} is even", "kahler-parity")
    if len(odd) == len(ranks):
        return _outcome("parity", "excluded", f"every admissible rank {ranks} is odd", "kahler-parity")
    if not odd:
        return _outcome("parity", "passed", f"every admissible rank {ranks} is even", "kahler-parity")
    return _outcome("parity", "inconclusive",
                    f"admissible ranks {ranks} include odd values {odd}", "kahler-parity")


def check_torelli_trivial(content: SymplecticRep | GeneratingSetRep | DeclaredBlock) -> ObstructionOutcome:
    """Trivial homological monodromy forces ``q_f = g``, hence a product."""
    rule = "torelli-product"
    g = content.fiber_genus
    if isinstance(content, DeclaredBlock):
        if content.rank_lo == 2 * g:
            return _outcome("torelli", "excluded",
                            f"rank forced to 2g = {2 * g}: trivial action, q_f = g = {g}, product bundle", rule)
        if content.rank_hi < 2 * g:
            return _outcome("torelli", "passed",
                            f"rank <= {content.rank_hi} < 2g = {2 * g}: action is nontrivial", rule)
        return _outcome("torelli", "inconclusive",
                        f"rank interval [{content.rank_lo}, {content.rank_hi}] contains 2g = {2 * g}", rule)
    if all(M.is_identity() for M in content.images):
        return _outcome("torelli", "excluded",
                        f"all images are the identity: q_f = g = {g}, so the bundle is a product", rule)
    moved = next(i for i, M in enumerate(content.images) if not M.is_identity())
    name = generator_name(moved) if isinstance(content, SymplecticRep) else f"#{moved}"
    return _outcome("torelli", "passed", f"image of {name} acts nontrivially on homology", rule)


def s_from_rank(g: int, rank: int) -> int:
    """``s`` with coinvariant rank ``2g - 2s``."""
    if rank % 2:
        raise ParityUndefined(f"coinvariant rank {rank} is odd; s is undefined")
    return g - rank // 2


def _xiao_violated(g: int, s: int) -> bool:
    return g > 1 + 6 * s


def check_xiao(g: int, s: int | Iterable[int]) -> ObstructionOutcome:
    """``g <= 1 + 6s`` with ``s = g - q_f``; ``s`` may be a collection of candidates."""
    rule = "xiao-bound"
    if isinstance(s, int):
        if _xiao_violated(g, s):
            return _outcome("xiao", "excluded", f"g = {g} > 1 + 6*{s} = {1 + 6 * s}", rule)
        return _outcome("xiao", "passed", f"g = {g} <= 1 + 6*{s} = {1 + 6 * s}", rule)
    values = sorted(set(s))
    if not values:
        return _outcome("xiao", "inconclusive", "no even admissible rank; s undefined", rule)
    if len(values) == 1:
        return check_xiao(g, values[0])
    bad = [v for v in values if _xiao_violated(g, v)]
    if len(bad) == len(values):
        return _outcome("xiao", "excluded",
                        f"g = {g} > 1 + 6*s for every admissible s in {values} (max bound {1 + 6 * values[-1]})", rule)
    if not bad:
        return _outcome("xiao", "passed", f"g = {g} <= 1 + 6*s for every admissible s in {values}", rule)
    return _outcome("xiao", "inconclusive", f"g = {g} violates the bound only for s in {bad} of {values}", rule)


def xiao_s_values(g: int, ranks: Sequence[int]) -> list[int]:
    return sorted({g - r // 2 for r in ranks if r % 2 == 0})


def check_modified_xiao(g: int, q_f: int | Iterable[int], b: int) -> ObstructionOutcome:
    """Conditional on the modified Xiao conjecture ``q_f <= g/2 + 1``.

    For ``b = 2`` the conditional bound ``q_f <= g - 2`` is also applied.
    Never affects the overall verdict.
    """
    rule = "modified-xiao (conjectural)"
    values = [q_f] if isinstance(q_f, int) else sorted(set(q_f))

    def reasons(q):
        out = []
        if 2 * q > g + 2:
            out.append(f"q_f = {q} > g/2 + 1 = {Fraction(g, 2) + 1}")
        if b == 2 and q > g - 2:
            out.append(f"b = 2 and q_f = {q} > g - 2 = {g - 2}")
        return out

    hits = {q: reasons(q) for q in values}
    kw = dict(conditional_check=True)
    if not values:
        return _outcome("modified-xiao", "inconclusive", "q_f undefined", rule, **kw)
    if all(hits.values()):
        detail = "; ".join(r for q in values for r in hits[q])
        return _outcome("modified-xiao", "conditional", detail, rule, **kw)
    if not any(hits.values()):
        return _outcome("modified-xiao", "passed",
                        f"q_f in {values} satisfies q_f <= g/2 + 1 = {Fraction(g, 2) + 1}"
                        + (f" and q_f <= g - 2 = {g - 2}" if b == 2 else ""), rule, **kw)
    return _outcome("modified-xiao", "inconclusive",
                    f"only some admissible q_f in {values} violate the conjectural bounds", rule, **kw)


def check_chi_window(g: int, b: int, chi: int | None = None) -> ObstructionOutcome:
    """``3(b-1)(g-1) < 3 chi < 4(b-1)(g-1)``, strict on both sides."""
    rule = "chi-window"
    if g < 2 or b < 2:
        return _outcome("chi-window", "inconclusive", f"window needs g, b >= 2 (g = {g}, b = {b})", rule)
    lo, hi = 3 * (b - 1) * (g - 1), 4 * (b - 1) * (g - 1)
    if chi is not None:
        if lo < 3 * chi < hi:
            return _outcome("chi-window", "passed", f"{lo} < 3*chi = {3 * chi} < {hi}", rule)
        return _outcome("chi-window", "excluded",
                        f"3*chi = {3 * chi} outside the open window ({lo}, {hi})", rule)
    admissible = [c for c in range(lo // 3, hi // 3 + 2) if lo < 3 * c < hi]
    if admissible:
        return _outcome("chi-window", "passed",
                        f"integer chi in [{admissible[0]}, {admissible[-1]}] satisfies {lo} < 3*chi < {hi}", rule)
    return _outcome("chi-window", "excluded",
                    f"no integer chi with {lo} < 3*chi < {hi}", rule)


def chern_invariants(g: int, b: int, chi: int) -> ChernInvariants:
    e = 4 * (b - 1) * (g - 1)
    return ChernInvariants(chi=chi, e=e, sigma=4 * chi - e, K2=12 * chi - e)


def check_signature_positive(sig, known: bool = True) -> ObstructionOutcome:
    """Signature must be strictly positive; ``sig`` may be an int or ``(lo, hi)``."""
    rule = "positive-signature"
    if not known or sig is None:
        return _outcome("signature", "inconclusive", "signature unknown", rule)
    lo, hi = (sig, sig) if isinstance(sig, int) else sig
    text = f"sigma = {lo}" if lo == hi else f"sigma in [{lo}, {hi}]"
    if hi <= 0:
        return _outcome("signature", "excluded", f"{text} <= 0", rule)
    if lo > 0:
        return _outcome("signature", "passed", f"{text} > 0", rule)
    return _outcome("signature", "inconclusive", f"{text} straddles 0", rule)


# covers

def _cover_specs(b: int, config: CheckConfig):
    """Yield specs in deterministic order; a final ``None`` marks cap exhaustion."""
    count = 0
    for n in config.cover_degrees:
        if config.cover_strategy == "single-generator":
            for i in range(2 * b):
                yield CyclicCoverSpec.twisting(n, i, b)
        else:
            for images in itertools.product(range(n), repeat=2 * b):
                if gcd(n, *images) != 1:
                    continue
                if count >= config.exhaustive_cap:
                    yield None
                    return
                count += 1
                yield CyclicCoverSpec(n, images)


def check_cover(rep: SymplecticRep, spec: CyclicCoverSpec):
    """Parity and Xiao on one cyclic cover. Returns ``(report, excluded, reason)``."""
    words = schreier_generators(SurfacePresentation(rep.base_genus), spec)
    images = [evaluate_word(rep, w) for w in words]
    report = coinvariants(images, rep.fiber_genus, cover_genus(spec.n, rep.base_genus))
    if report.rank % 2:
        return report, True, f"b1 = {report.b1} is odd"
    s = s_from_rank(report.fiber_genus, report.rank)
    if _xiao_violated(report.fiber_genus, s):
        return report, True, f"g = {report.fiber_genus} > 1 + 6*{s} = {1 + 6 * s}"
    return report, False, ""


def cover_sweep(bundle: BundleSpec, config: CheckConfig = CheckConfig()) -> ObstructionOutcome:
    """Re-run parity and Xiao on cyclic covers of the base.

    The first excluding cover in enumeration order is reported as witness.
    """
    rule = "cover-reiteration"
    if not isinstance(bundle.content, SymplecticRep):
        return _outcome("cover-sweep", "inconclusive",
                        "cover sweep needs explicit standard-presentation monodromy", rule)
    rep = bundle.content
    tried = 0
    for spec in _cover_specs(rep.base_genus, config):
        if spec is None:
            return _outcome("cover-sweep", "inconclusive",
                            f"warning: exhaustive cap of {config.exhaustive_cap} covers reached "
                            f"without a witness; remaining covers unchecked", rule)
        tried += 1
        report, excluded, reason = check_cover(rep, spec)
        if excluded:
            witness = {"degree": spec.n, "images": list(spec.images),
                       "cover_base_genus": report.base_genus, "rank": report.rank}
            return _outcome("cover-sweep", "excluded",
                            f"{spec.describe()}, base genus {report.base_genus}: rank {report.rank}, {reason}",
                            rule, witness=witness)
    return _outcome("cover-sweep", "passed",
                    f"{tried} covers of degrees {list(config.cover_degrees)} ({config.cover_strategy}) "
                    f"pass parity and Xiao", rule)


def verdict(bundle: BundleSpec, config: CheckConfig = CheckConfig()) -> Verdict:
    g, b = bundle.fiber_genus, bundle.base_genus
    content = bundle.content
    outcomes = [check_genus_bounds(g, b)]

    ranks = candidate_ranks(bundle)
    exact = None if bundle.is_declared else bundle_coinvariants(bundle)
    outcomes.append(check_parity(exact) if exact else check_parity(ranks, b))
    outcomes.append(check_torelli_trivial(content))

    if exact is not None:
        try:
            outcomes.append(check_xiao(g, s_from_rank(g, exact.rank)))
        except ParityUndefined as exc:
            outcomes.append(_outcome("xiao", "inconclusive", f"{exc} (see parity)", "xiao-bound"))
    else:
        outcomes.append(check_xiao(g, xiao_s_values(g, ranks)))

    outcomes.append(check_chi_window(g, b, config.chi))

    sig = bundle.signature
    if sig is None and isinstance(content, SymplecticRep):
        sig = bundle_signature(content)
    outcomes.append(check_signature_positive(sig, sig is not None))

    if isinstance(content, SymplecticRep):
        outcomes.append(cover_sweep(bundle, config))

    if config.enable_modified_xiao:
        q_values = sorted({r // 2 for r in ranks if r % 2 == 0})
        outcomes.append(check_modified_xiao(g, q_values[0] if len(q_values) == 1 else q_values, b))
    return Verdict(tuple(outcomes))
