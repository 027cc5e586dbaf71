"""String rewriting for word problems of the built-in group families.

Two kinds of system are supported:

- **confluent** systems, where :meth:`RewritingSystem.reduce` returns a
  normal form and equal elements have equal normal forms;
- **Dehn** systems (small-cancellation presentations such as surface
  groups), where every rule shortens the word and a word is trivial exactly
  when it reduces to the empty word.

Free cancellation rules ``xX -> ""`` are always part of a system.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product

from relhyp.core.errors import RelHypError

logger = logging.getLogger(__name__)

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class RewritingSystemError(RelHypError):
    error_category = "input"


def invert(word: str) -> str:
    """Formal inverse: reverse the word and swap each letter with its inverse."""
    return word[::-1].swapcase()


def free_reduce(word: str) -> str:
    stack: list[str] = []
    for ch in word:
        if stack and stack[-1] == ch.swapcase():
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def cancellation_rules(generators: tuple[str, ...]) -> list[tuple[str, str]]:
    rules = []
    for g in generators:
        rules.append((g + g.upper(), ""))
        rules.append((g.upper() + g, ""))
    return rules


@dataclass(frozen=True)
class RewritingSystem:
    """Generators (lowercase) with their rules; letter order is ``a < A < b < B ...``."""

    generators: tuple[str, ...]
    rules: tuple[tuple[str, str], ...]
    confluent: bool = True
    _cache: dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(ch for g in self.generators for ch in (g, g.upper()))

    def shortlex_key(self, word: str) -> tuple[int, tuple[int, ...]]:
        order = {ch: i for i, ch in enumerate(self.alphabet)}
        return len(word), tuple(order[ch] for ch in word)

    def reduce(self, word: str) -> str:
        """Apply rules at the leftmost match until none applies."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        current = free_reduce(word)
        while True:
            best: tuple[int, int, str] | None = None
            for lhs, rhs in self.rules:
                i = current.find(lhs)
                if i >= 0 and (best is None or i < best[0]):
                    best = (i, len(lhs), rhs)
            if best is None:
                break
            i, n, rhs = best
            current = current[:i] + rhs + current[i + n :]
        self._cache[word] = current
        return current

    def is_trivial(self, word: str) -> bool:
        return self.reduce(word) == ""

    def equal(self, u: str, v: str) -> bool:
        if self.confluent:
            return self.reduce(u) == self.reduce(v)
        return self.is_trivial(u + invert(v))

    def renamed(self, mapping: dict[str, str]) -> RewritingSystem:
        """Rename generators (lowercase keys); inverses follow automatically."""
        full = {**mapping, **{k.upper(): v.upper() for k, v in mapping.items()}}

        def tr(word: str) -> str:
            return "".join(full.get(ch, ch) for ch in word)

        return RewritingSystem(
            generators=tuple(mapping.get(g, g) for g in self.generators),
            rules=tuple((tr(lhs), tr(rhs)) for lhs, rhs in self.rules),
            confluent=self.confluent,
        )


# ---------------------------------------------------------------------------
# Built-in systems
# ---------------------------------------------------------------------------


def free_system(rank: int) -> RewritingSystem:
    gens = tuple(_LETTERS[:rank])
    return RewritingSystem(gens, tuple(cancellation_rules(gens)))


def commutation_rules(
    first: tuple[str, ...], second: tuple[str, ...]
) -> list[tuple[str, str]]:
    """Rules moving letters of ``first`` to the left of letters of ``second``."""
    rules = []
    for x in first:
        for y in second:
            for p, q in product((y, y.upper()), (x, x.upper())):
                rules.append((p + q, q + p))
    return rules


def free_abelian_system(rank: int) -> RewritingSystem:
    gens = tuple(_LETTERS[:rank])
    rules = cancellation_rules(gens)
    for i, x in enumerate(gens):
        rules.extend(commutation_rules((x,), gens[i + 1 :]))
    return RewritingSystem(gens, tuple(rules))


def surface_relator(genus: int) -> str:
    letters = _LETTERS[: 2 * genus]
    return "".join(
        x + y + x.upper() + y.upper() for x, y in zip(letters[::2], letters[1::2], strict=True)
    )


def dehn_rules(relators: list[str]) -> list[tuple[str, str]]:
    """Replace any piece longer than half of a cyclic relator by the inverse complement."""
    table: dict[str, str] = {}
    for relator in relators:
        n = len(relator)
        for r in (relator, invert(relator)):
            for shift in range(n):
                cyclic = r[shift:] + r[:shift]
                for k in range(n // 2 + 1, n + 1):
                    lhs, rhs = cyclic[:k], invert(cyclic[k:])
                    if lhs not in table or len(rhs) < len(table[lhs]):
                        table[lhs] = rhs
    return sorted(table.items())


def surface_system(genus: int) -> RewritingSystem:
    gens = tuple(_LETTERS[: 2 * genus])
    rules = cancellation_rules(gens) + dehn_rules([surface_relator(genus)])
    return RewritingSystem(gens, tuple(rules), confluent=False)


def user_system(
    generators: tuple[str, ...], rules: tuple[tuple[str, str], ...]
) -> RewritingSystem:
    alphabet = {ch for g in generators for ch in (g, g.upper())}
    for lhs, rhs in rules:
        unknown = set(lhs + rhs) - alphabet
        if unknown:
            raise RewritingSystemError(
                f"rule {lhs}->{rhs} uses letters outside the alphabet: {''.join(sorted(unknown))}"
            )
        if not lhs:
            raise RewritingSystemError("rule with empty left-hand side")
    return RewritingSystem(generators, tuple(cancellation_rules(generators)) + tuple(rules))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def check_termination(system: RewritingSystem) -> None:
    """Rules must shorten words or keep length and decrease in shortlex order."""
    for lhs, rhs in system.rules:
        if len(rhs) > len(lhs):
            raise RewritingSystemError(f"rule {lhs}->{rhs} increases length")
        if len(rhs) == len(lhs) and system.shortlex_key(rhs) >= system.shortlex_key(lhs):
            raise RewritingSystemError(
                f"length-preserving rule {lhs}->{rhs} does not decrease in shortlex order"
            )


def critical_words(
    system: RewritingSystem, max_length: int | None = None
) -> list[tuple[str, str, str]]:
    """Overlap and inclusion ambiguities as ``(word, one_step_a, one_step_b)``."""
    found = []
    rules = system.rules
    for (l1, r1), (l2, r2) in product(rules, rules):
        # inclusion: l2 occurs inside l1
        if (l1, r1) != (l2, r2):
            start = l1.find(l2)
            while start >= 0:
                a = r1
                b = l1[:start] + r2 + l1[start + len(l2) :]
                found.append((l1, a, b))
                start = l1.find(l2, start + 1)
        # proper overlap: suffix of l1 equals prefix of l2
        for k in range(1, min(len(l1), len(l2))):
            if l1[-k:] == l2[:k]:
                word = l1 + l2[k:]
                if max_length is not None and len(word) > max_length:
                    continue
                found.append((word, r1 + l2[k:], l1[:-k] + r2))
    return found


def check_confluence(system: RewritingSystem, max_length: int | None = None) -> None:
    """Every critical pair must resolve to the same irreducible word."""
    check_termination(system)
    for word, a, b in critical_words(system, max_length):
        ra, rb = system.reduce(a), system.reduce(b)
        if ra != rb:
            raise RewritingSystemError(
                f"system is not confluent: {word} rewrites to both {ra} and {rb}"
            )
    logger.debug("confluence_checked: rules=%d max_length=%s", len(system.rules), max_length)
