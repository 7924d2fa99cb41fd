"""Word-problem oracles for finitely generated groups and their Cayley balls.

A group is presented here only through a symmetric generating set and a total
decision procedure for the word problem.  Everything downstream (balls, grids,
codecs) is built on top of that interface, so adding a group means adding one
oracle class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ResourceLimit, SchemaError, UnknownSymbol

Word = tuple[str, ...]

EPSILON: Word = ()

IDENTITY = "1"


def parse_word(text: str) -> Word:
    """Split a whitespace-separated word into a symbol tuple."""
    return tuple(text.split())


def format_word(word: Word) -> str:
    return " ".join(word)


@dataclass(frozen=True)
class GeneratorSet:
    """A finite symmetric generating set with a designated identity symbol."""

    symbols: tuple[str, ...]
    inverse: dict[str, str]
    identity: str = IDENTITY

    def __post_init__(self):
        if self.identity not in self.symbols:
            raise ValueError("identity symbol missing from generator set")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate generator symbols")
        for sym in self.symbols:
            inv = self.inverse.get(sym)
            if inv is None or inv not in self.symbols:
                raise ValueError(f"no inverse declared for {sym!r}")
            if self.inverse.get(inv) != sym:
                raise ValueError(f"inverse map is not an involution at {sym!r}")
        if self.inverse[self.identity] != self.identity:
            raise ValueError("identity symbol must be self-inverse")

    def inverse_of(self, sym: str) -> str:
        if sym not in self.inverse:
            raise UnknownSymbol(sym)
        return self.inverse[sym]

    def check_word(self, word: Word) -> None:
        for sym in word:
            if sym not in self.inverse:
                raise UnknownSymbol(sym)

    def word_inverse(self, word: Word) -> Word:
        return tuple(self.inverse_of(sym) for sym in reversed(word))


class GroupOracle:
    """Decides whether words over the generating set represent the identity."""

    def __init__(self, gens: GeneratorSet, descriptor: Optional[dict] = None):
        self.gens = gens
        self.descriptor = descriptor if descriptor is not None else {}

    def is_identity(self, word: Word) -> bool:
        raise NotImplementedError

    def equals(self, u: Word, v: Word) -> bool:
        return self.is_identity(self.gens.word_inverse(u) + v)

    def canonical_key(self, word: Word):
        """An exact hashable invariant of the group element, or None.

        When available it lets ball construction deduplicate in O(1) instead
        of scanning with pairwise word-problem calls.
        """
        return None


def _axis_names(rank: int) -> tuple[str, ...]:
    if rank <= 3:
        return ("x", "y", "z")[:rank]
    return tuple(f"x{i + 1}" for i in range(rank))


def _paired_generators(names: tuple[str, ...]) -> GeneratorSet:
    symbols = [IDENTITY]
    inverse = {IDENTITY: IDENTITY}
    for name in names:
        co = name + "-"
        symbols.extend([name, co])
        inverse[name] = co
        inverse[co] = name
    return GeneratorSet(tuple(symbols), inverse)


class FreeAbelianOracle(GroupOracle):
    """Free abelian group of a given rank; words are exponent-summed."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be positive")
        names = _axis_names(rank)
        super().__init__(
            _paired_generators(names),
            {"kind": "free_abelian", "rank": rank},
        )
        self.rank = rank
        self._axis: dict[str, tuple[int, int]] = {}
        for i, name in enumerate(names):
            self._axis[name] = (i, 1)
            self._axis[name + "-"] = (i, -1)

    def _vector(self, word: Word) -> tuple[int, ...]:
        totals = [0] * self.rank
        for sym in word:
            if sym == IDENTITY:
                continue
            if sym not in self._axis:
                raise UnknownSymbol(sym)
            i, step = self._axis[sym]
            totals[i] += step
        return tuple(totals)

    def is_identity(self, word: Word) -> bool:
        return not any(self._vector(word))

    def canonical_key(self, word: Word):
        return self._vector(word)


class FreeGroupOracle(GroupOracle):
    """Free group of a given rank; words are freely reduced."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be positive")
        names = _axis_names(rank)
        super().__init__(_paired_generators(names), {"kind": "free", "rank": rank})
        self.rank = rank

    def _reduce(self, word: Word) -> Word:
        stack: list[str] = []
        for sym in word:
            if sym == IDENTITY:
                continue
            if sym not in self.gens.inverse:
                raise UnknownSymbol(sym)
            if stack and stack[-1] == self.gens.inverse[sym]:
                stack.pop()
            else:
                stack.append(sym)
        return tuple(stack)

    def is_identity(self, word: Word) -> bool:
        return not self._reduce(word)

    def canonical_key(self, word: Word):
        return self._reduce(word)


@dataclass(frozen=True)
class MealyAutomaton:
    """An invertible letter-to-letter transducer over the binary alphabet."""

    states: tuple[str, ...]
    transition: dict[str, dict[str, str]]
    output: dict[str, dict[str, str]]

    def __post_init__(self):
        for q in self.states:
            tq = self.transition.get(q)
            oq = self.output.get(q)
            if tq is None or set(tq) != {"0", "1"}:
                raise ValueError(f"transition row missing for state {q!r}")
            if oq is None or set(oq) != {"0", "1"}:
                raise ValueError(f"output row missing for state {q!r}")
            if set(oq.values()) != {"0", "1"}:
                raise ValueError(f"state {q!r} does not permute the alphabet")
            for b in "01":
                if tq[b] not in self.states:
                    raise ValueError(f"transition of {q!r} leaves the state set")

    def swaps(self, q: str) -> bool:
        return self.output[q]["0"] == "1"

    def is_trivial_state(self, q: str) -> bool:
        """True when the state is syntactically the identity transducer."""
        return (
            not self.swaps(q)
            and self.transition[q]["0"] == q
            and self.transition[q]["1"] == q
        )

    def run_state(self, q: str, bits: str) -> str:
        out = []
        cur = q
        for b in bits:
            out.append(self.output[cur][b])
            cur = self.transition[cur][b]
        return "".join(out)


def mealy_apply(automaton: MealyAutomaton, state_word: tuple[str, ...], bits: str) -> str:
    """Apply a composition of states to a binary string, rightmost state first."""
    for b in bits:
        if b not in "01":
            raise ValueError("input must be a binary string")
    out = bits
    for q in reversed(state_word):
        if q not in automaton.states:
            raise UnknownSymbol(q)
        out = automaton.run_state(q, out)
    return out


class MealyGroupOracle(GroupOracle):
    """Group generated by the states of an invertible Mealy automaton.

    The word problem is decided exactly: the set of iterated sections of a
    state word is finite (sections never get longer once trivial states are
    stripped), so a word is the identity iff no word in its section closure
    acts at the root.
    """

    def __init__(
        self,
        automaton: MealyAutomaton,
        generators: dict[str, tuple[str, ...]],
        inverses: Optional[dict[str, str]] = None,
        descriptor: Optional[dict] = None,
    ):
        inverses = dict(inverses or {})
        symbols = [IDENTITY]
        inverse = {IDENTITY: IDENTITY}
        for name in generators:
            if name == IDENTITY:
                raise ValueError("generator may not reuse the identity symbol")
            symbols.append(name)
            inverse[name] = inverses.get(name, name)
        for name, inv in inverse.items():
            if inv not in inverse:
                raise ValueError(f"inverse {inv!r} of {name!r} is not a generator")
        super().__init__(GeneratorSet(tuple(symbols), inverse), descriptor)
        self.automaton = automaton
        self.generators = {name: tuple(word) for name, word in generators.items()}
        for name, word in self.generators.items():
            for q in word:
                if q not in automaton.states:
                    raise ValueError(f"generator {name!r} uses unknown state {q!r}")
        self._memo: dict[tuple[str, ...], bool] = {}
        for name, inv in inverse.items():
            if name == IDENTITY or name < inv:
                continue
            # Validate declared (and default self-) inverses once, up front.
            word = self.generators[name] + self.generators[inv]
            if not self._decide(self._strip(word)):
                raise ValueError(f"{name!r} and {inv!r} are not mutually inverse")

    def _strip(self, state_word: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(q for q in state_word if not self.automaton.is_trivial_state(q))

    def _sections(self, state_word: tuple[str, ...]):
        swapped = False
        sec = ([], [])
        for q in state_word:
            q_swap = self.automaton.swaps(q)
            lo = sec[1] if q_swap else sec[0]
            hi = sec[0] if q_swap else sec[1]
            t0 = self.automaton.transition[q]["0"]
            t1 = self.automaton.transition[q]["1"]
            new0 = list(lo)
            new1 = list(hi)
            if not self.automaton.is_trivial_state(t0):
                new0.append(t0)
            if not self.automaton.is_trivial_state(t1):
                new1.append(t1)
            sec = (new0, new1)
            swapped ^= q_swap
        return swapped, tuple(sec[0]), tuple(sec[1])

    def _decide(self, state_word: tuple[str, ...]) -> bool:
        start = self._strip(state_word)
        if start in self._memo:
            return self._memo[start]
        seen: set[tuple[str, ...]] = set()
        stack = [start]
        while stack:
            v = stack.pop()
            if v in seen or self._memo.get(v) is True:
                continue
            seen.add(v)
            swapped, s0, s1 = self._sections(v)
            if swapped:
                # v itself acts at the root, so neither v nor the original
                # word is trivial.
                self._memo[v] = False
                self._memo[start] = False
                return False
            stack.append(s0)
            stack.append(s1)
        for v in seen:
            self._memo[v] = True
        return True

    def _state_word(self, word: Word) -> tuple[str, ...]:
        states: list[str] = []
        for sym in word:
            if sym == IDENTITY:
                continue
            if sym not in self.generators:
                raise UnknownSymbol(sym)
            states.extend(self.generators[sym])
        return tuple(states)

    def is_identity(self, word: Word) -> bool:
        return self._decide(self._state_word(word))

    def apply(self, word: Word, bits: str) -> str:
        return mealy_apply(self.automaton, self._state_word(word), bits)


def grigorchuk_automaton() -> MealyAutomaton:
    """The five-state binary machine generating the first Grigorchuk group."""
    states = ("a", "b", "c", "d", "id")
    transition = {
        "a": {"0": "id", "1": "id"},
        "b": {"0": "a", "1": "c"},
        "c": {"0": "a", "1": "d"},
        "d": {"0": "id", "1": "b"},
        "id": {"0": "id", "1": "id"},
    }
    output = {
        "a": {"0": "1", "1": "0"},
        "b": {"0": "0", "1": "1"},
        "c": {"0": "0", "1": "1"},
        "d": {"0": "0", "1": "1"},
        "id": {"0": "0", "1": "1"},
    }
    return MealyAutomaton(states, transition, output)


# b, c, d generate a Klein four-group: the product of two of them is the third.
_KLEIN = {
    ("b", "c"): "d",
    ("c", "b"): "d",
    ("b", "d"): "c",
    ("d", "b"): "c",
    ("c", "d"): "b",
    ("d", "c"): "b",
}

# First-level decomposition: letter -> (section word at 0, section word at 1).
_GRIG_SECTIONS = {
    "b": ("a", "c"),
    "c": ("a", "d"),
    "d": ("", "b"),
}


class GrigorchukOracle(GroupOracle):
    """Word problem for the first Grigorchuk group via its wreath recursion.

    Words are first reduced with the relations aa = bb = cc = dd = 1 and the
    Klein table for {b, c, d}.  A reduced word of length n >= 2 splits into a
    root permutation and two sections of length at most (n + 1) // 2, so the
    recursion terminates; results are memoized on reduced words.
    """

    def __init__(self):
        symbols = (IDENTITY, "a", "b", "c", "d")
        inverse = {s: s for s in symbols}
        super().__init__(GeneratorSet(symbols, inverse), {"kind": "grigorchuk"})
        self._memo: dict[str, bool] = {}
        self.automaton = grigorchuk_automaton()

    @staticmethod
    def _reduce(letters: str) -> str:
        stack: list[str] = []
        for ch in letters:
            while True:
                if not stack:
                    stack.append(ch)
                    break
                top = stack[-1]
                if top == ch:
                    stack.pop()
                    break
                merged = _KLEIN.get((top, ch))
                if merged is None:
                    stack.append(ch)
                    break
                stack.pop()
                ch = merged
        return "".join(stack)

    def _decide(self, reduced: str) -> bool:
        known = self._memo.get(reduced)
        if known is not None:
            return known
        if not reduced:
            return True
        if len(reduced) == 1:
            self._memo[reduced] = False
            return False
        if reduced.count("a") % 2 == 1:
            self._memo[reduced] = False
            return False
        sec0: list[str] = []
        sec1: list[str] = []
        for ch in reduced:
            if ch == "a":
                sec0, sec1 = sec1, sec0
            else:
                lo, hi = _GRIG_SECTIONS[ch]
                sec0.append(lo)
                sec1.append(hi)
        result = self._decide(self._reduce("".join(sec0))) and self._decide(
            self._reduce("".join(sec1))
        )
        self._memo[reduced] = result
        return result

    def is_identity(self, word: Word) -> bool:
        letters = []
        for sym in word:
            if sym == IDENTITY:
                continue
            if sym not in ("a", "b", "c", "d"):
                raise UnknownSymbol(sym)
            letters.append(sym)
        return self._decide(self._reduce("".join(letters)))

    def apply(self, word: Word, bits: str) -> str:
        states = tuple(sym for sym in word if sym != IDENTITY)
        return mealy_apply(self.automaton, states, bits)


class ProductOracle(GroupOracle):
    """Direct product of oracles; factor symbols get a 1-based index suffix."""

    def __init__(self, factors: list[GroupOracle]):
        if not factors:
            raise ValueError("product needs at least one factor")
        symbols = [IDENTITY]
        inverse = {IDENTITY: IDENTITY}
        self._slot: dict[str, tuple[int, str]] = {}
        for i, factor in enumerate(factors):
            for sym in factor.gens.symbols:
                if sym == factor.gens.identity:
                    continue
                name = f"{sym}{i + 1}"
                symbols.append(name)
                inverse[name] = f"{factor.gens.inverse[sym]}{i + 1}"
                self._slot[name] = (i, sym)
        descriptor = {
            "kind": "product",
            "factors": [f.descriptor for f in factors],
        }
        super().__init__(GeneratorSet(tuple(symbols), inverse), descriptor)
        self.factors = list(factors)

    def project(self, word: Word, i: int) -> Word:
        out = []
        for sym in word:
            if sym == IDENTITY:
                continue
            if sym not in self._slot:
                raise UnknownSymbol(sym)
            j, original = self._slot[sym]
            if j == i:
                out.append(original)
        return tuple(out)

    def is_identity(self, word: Word) -> bool:
        self.gens.check_word(word)
        return all(
            factor.is_identity(self.project(word, i))
            for i, factor in enumerate(self.factors)
        )

    def canonical_key(self, word: Word):
        keys = []
        for i, factor in enumerate(self.factors):
            key = factor.canonical_key(self.project(word, i))
            if key is None:
                return None
            keys.append(key)
        return tuple(keys)


class CayleyBall:
    """All group elements within a word-metric radius, as canonical words.

    Elements are listed in shortlex order of their canonical representatives
    (index 0 is the identity), and `edges` maps (element index, generator) to
    the index of the product whenever it stays inside the ball.  Edges through
    the identity generator are self-loops; path machinery skips them.
    """

    def __init__(self, oracle: GroupOracle, radius: int, elements, distance, edges):
        self.oracle = oracle
        self.radius = radius
        self.elements: list[Word] = elements
        self.distance: list[int] = distance
        self.index: dict[Word, int] = {w: i for i, w in enumerate(elements)}
        self.edges: dict[tuple[int, str], int] = edges
        self._resolve_memo: dict[Word, Optional[int]] = dict(self.index)
        self._keyed: Optional[dict] = None
        if oracle.canonical_key(EPSILON) is not None:
            self._keyed = {oracle.canonical_key(w): i for i, w in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def resolve(self, word: Word) -> Optional[int]:
        """Index of the element a word represents, or None if outside the ball."""
        if word in self._resolve_memo:
            return self._resolve_memo[word]
        self.oracle.gens.check_word(word)
        found: Optional[int] = None
        if self._keyed is not None:
            found = self._keyed.get(self.oracle.canonical_key(word))
        else:
            for i, elem in enumerate(self.elements):
                if self.oracle.equals(elem, word):
                    found = i
                    break
        self._resolve_memo[word] = found
        return found

    def neighbors(self, idx: int):
        """Distinct non-identity neighbour indices, excluding self-loops."""
        seen = []
        for sym in self.oracle.gens.symbols:
            if sym == self.oracle.gens.identity:
                continue
            target = self.edges.get((idx, sym))
            if target is not None and target != idx and target not in seen:
                seen.append(target)
        return seen

    def restrict(self, radius: int) -> "CayleyBall":
        """The sub-ball of a smaller radius; element indices are preserved."""
        if radius > self.radius:
            raise ValueError("can only restrict to a smaller radius")
        count = sum(1 for d in self.distance if d <= radius)
        elements = self.elements[:count]
        distance = self.distance[:count]
        edges = {
            (i, sym): j
            for (i, sym), j in self.edges.items()
            if i < count and j < count
        }
        return CayleyBall(self.oracle, radius, elements, distance, edges)


def cayley_ball(oracle: GroupOracle, radius: int, max_elements: int = 1_000_000) -> CayleyBall:
    """Enumerate the ball of a given radius by shortlex breadth-first search."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    gens = oracle.gens
    extend = [s for s in gens.symbols if s != gens.identity]
    elements: list[Word] = [EPSILON]
    distance: list[int] = [0]
    keyed = oracle.canonical_key(EPSILON) is not None
    key_index = {oracle.canonical_key(EPSILON): 0} if keyed else None

    def find(word: Word) -> Optional[int]:
        if keyed:
            return key_index.get(oracle.canonical_key(word))
        for i, elem in enumerate(elements):
            if oracle.equals(elem, word):
                return i
        return None

    level = [EPSILON]
    for dist in range(1, radius + 1):
        next_level = []
        for parent in level:
            for sym in extend:
                candidate = parent + (sym,)
                if find(candidate) is not None:
                    continue
                if len(elements) >= max_elements:
                    raise ResourceLimit(
                        f"ball exceeded {max_elements} elements at radius {dist}"
                    )
                elements.append(candidate)
                distance.append(dist)
                if keyed:
                    key_index[oracle.canonical_key(candidate)] = len(elements) - 1
                next_level.append(candidate)
        level = next_level

    edges: dict[tuple[int, str], int] = {}
    for i, word in enumerate(elements):
        for sym in gens.symbols:
            if sym == gens.identity:
                edges[(i, sym)] = i
                continue
            target = find(word + (sym,))
            if target is not None:
                edges[(i, sym)] = target
    return CayleyBall(oracle, radius, elements, distance, edges)


def group_from_descriptor(obj, path: str = "group") -> GroupOracle:
    """Build an oracle from a JSON-style descriptor dictionary."""
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    kind = obj.get("kind")
    if kind == "free_abelian" or kind == "free":
        rank = obj.get("rank")
        if not isinstance(rank, int) or rank < 1:
            raise SchemaError(f"{path}.rank", "expected a positive integer")
        return FreeAbelianOracle(rank) if kind == "free_abelian" else FreeGroupOracle(rank)
    if kind == "grigorchuk":
        return GrigorchukOracle()
    if kind == "mealy":
        for key in ("states", "transition", "output", "generators"):
            if key not in obj:
                raise SchemaError(f"{path}.{key}", "missing field")
        if not isinstance(obj["states"], list) or not all(
            isinstance(q, str) for q in obj["states"]
        ):
            raise SchemaError(f"{path}.states", "expected a list of state names")
        try:
            automaton = MealyAutomaton(
                tuple(obj["states"]), obj["transition"], obj["output"]
            )
        except (ValueError, TypeError, KeyError) as exc:
            raise SchemaError(f"{path}.transition", str(exc)) from exc
        generators = obj["generators"]
        gen_words: dict[str, tuple[str, ...]] = {}
        if isinstance(generators, dict) and generators:
            items = generators.items()
        elif isinstance(generators, list) and generators:
            # List form: each entry is a state word (or a single state name);
            # the generator is named by joining its states.
            items = []
            for entry in generators:
                word = [entry] if isinstance(entry, str) else entry
                items.append(("".join(map(str, word)), word))
        else:
            raise SchemaError(f"{path}.generators", "expected a non-empty list or object")
        for name, word in items:
            if not isinstance(word, list) or not all(isinstance(q, str) for q in word):
                raise SchemaError(
                    f"{path}.generators.{name}", "expected a list of states"
                )
            if name in gen_words:
                raise SchemaError(f"{path}.generators.{name}", "duplicate generator name")
            gen_words[name] = tuple(word)
        inverses = obj.get("inverses")
        if inverses is not None and not isinstance(inverses, dict):
            raise SchemaError(f"{path}.inverses", "expected an object")
        try:
            return MealyGroupOracle(automaton, gen_words, inverses, dict(obj))
        except ValueError as exc:
            raise SchemaError(path, str(exc)) from exc
    if kind == "product":
        factors = obj.get("factors")
        if not isinstance(factors, list) or not factors:
            raise SchemaError(f"{path}.factors", "expected a non-empty list")
        return ProductOracle(
            [
                group_from_descriptor(f, f"{path}.factors[{i}]")
                for i, f in enumerate(factors)
            ]
        )
    raise SchemaError(f"{path}.kind", f"unknown group kind {kind!r}")
