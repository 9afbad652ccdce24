"""Collation rules: the `<` `;` `,` mini-language and the three-component view.

A rule string such as ``"<г,Г<д,Д<е,Е;ё,Ё<ж,Ж"`` describes a sort alphabet in
three levels: ``<`` starts a new primary character group, ``;`` a new written
variant inside the group, ``,`` a new case form inside the variant.  Every
character the dataset may contain must appear in exactly one slot; sorting and
ordinal encoding both run off the resulting (primary, variant, case) triples.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DuplicateChar, MalformedRule, NoSuchSlot, UnknownChar

SEPARATORS = "<;,"

#: Case-study rules for Russian data: е/ё share a primary slot, all other
#: letters are single-variant, every variant has lower/upper case forms.
DEFAULT_CYRILLIC_RULES = "".join(
    "<%s,%s" % (lo, lo.upper()) if lo != "ё" else ";%s,%s" % (lo, lo.upper())
    for lo in "абвгдеёжзийклмнопрстуфхцчшщъыьэюя"
)


@dataclass(frozen=True)
class CharComponents:
    """Slot of one character: 0-based primary, variant and case indices."""

    primary_index: int
    variant_index: int
    case_index: int

    def __iter__(self):
        return iter((self.primary_index, self.variant_index, self.case_index))


class CollationRules:
    """Parsed rule text; immutable, safe for unrestricted concurrent reads.

    ``groups[p][v][c]`` is the character at primary group ``p``, variant ``v``,
    case form ``c``.  ``alphabet_size``, ``max_variants`` and ``max_case_forms``
    are the structure-wide bounds the string codec weights its digits with;
    individual groups may be smaller, which is why some component triples
    address no character (see :meth:`char_of`).
    """

    def __init__(self, groups: tuple[tuple[tuple[str, ...], ...], ...]):
        self.groups = groups
        reverse: dict[str, CharComponents] = {}
        for p, variants in enumerate(groups):
            for v, cases in enumerate(variants):
                for c, ch in enumerate(cases):
                    if ch in reverse:
                        raise DuplicateChar(f"character {ch!r} declared twice")
                    reverse[ch] = CharComponents(p, v, c)
        self._reverse = reverse
        self.alphabet_size = len(groups)
        self.max_variants = max(len(variants) for variants in groups)
        self.max_case_forms = max(
            len(cases) for variants in groups for cases in variants
        )

    # -- construction --------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "CollationRules":
        """Parse rule text.  A leading ``<`` is accepted and ignored."""
        if not text:
            raise MalformedRule("empty rule text")
        if text[0] == "<":
            text = text[1:]
            if not text:
                raise MalformedRule("rule text contains no characters")

        groups: list[list[list[str]]] = [[[]]]
        pending: str | None = None

        def commit(where: str) -> None:
            nonlocal pending
            if pending is None:
                raise MalformedRule(f"empty {where} token")
            groups[-1][-1].append(pending)
            pending = None

        for ch in text:
            if ch == "<":
                commit("group")
                groups.append([[]])
            elif ch == ";":
                commit("variant")
                groups[-1].append([])
            elif ch == ",":
                commit("case")
            else:
                if pending is not None:
                    raise MalformedRule(
                        f"multi-character element {pending + ch!r}; "
                        "only single characters may be declared"
                    )
                pending = ch
        commit("group")

        return cls(
            tuple(
                tuple(tuple(cases) for cases in variants) for variants in groups
            )
        )

    @classmethod
    def from_file(cls, path) -> "CollationRules":
        """Parse a UTF-8 rule file; newlines are stripped before parsing."""
        with open(path, encoding="utf-8") as fh:
            text = fh.read().replace("\n", "").replace("\r", "")
        return cls.parse(text)

    # -- lookups ---------------------------------------------------------------

    def __contains__(self, ch: str) -> bool:
        return ch in self._reverse

    def components_of(self, ch: str) -> CharComponents:
        """Slot of ``ch``; raises UnknownChar for characters never declared."""
        try:
            return self._reverse[ch]
        except KeyError:
            raise UnknownChar(
                f"character {ch!r} is not covered by these collation rules"
            ) from None

    def char_of(self, primary: int, variant: int, case: int) -> str:
        """Character at a component triple.

        Raises NoSuchSlot when the triple lies inside the structure-wide
        bounds but the specific group/variant has fewer entries.
        """
        if not 0 <= primary < len(self.groups):
            raise NoSuchSlot(f"no primary group {primary}")
        variants = self.groups[primary]
        if not 0 <= variant < len(variants):
            raise NoSuchSlot(f"group {primary} has no variant {variant}")
        cases = variants[variant]
        if not 0 <= case < len(cases):
            raise NoSuchSlot(
                f"group {primary} variant {variant} has no case form {case}"
            )
        return cases[case]

    # -- comparison ------------------------------------------------------------

    def sort_components(self, s: str) -> tuple[tuple[int, ...], ...]:
        """Per-level index vectors (primaries, variants, cases) of ``s``."""
        comps = [self.components_of(ch) for ch in s]
        return (
            tuple(c.primary_index for c in comps),
            tuple(c.variant_index for c in comps),
            tuple(c.case_index for c in comps),
        )

    def compare(
        self,
        s1: str,
        s2: str,
        accent_sensitive: bool = True,
        case_sensitive: bool = True,
    ) -> int:
        """Three-pass comparison; returns -1, 0 or 1.

        Primaries are compared first; only if they are entirely equal (which
        implies equal length) do the variant and case passes run, each gated
        by its sensitivity flag.  A string whose active-level vector is a
        strict prefix of the other's compares less.
        """
        p1, v1, c1 = self.sort_components(s1)
        p2, v2, c2 = self.sort_components(s2)
        if p1 != p2:
            return -1 if p1 < p2 else 1
        if accent_sensitive and v1 != v2:
            return -1 if v1 < v2 else 1
        if case_sensitive and c1 != c2:
            return -1 if c1 < c2 else 1
        return 0


@lru_cache(maxsize=8)
def _cached_parse(text: str) -> CollationRules:
    return CollationRules.parse(text)


def parse_rules(text: str) -> CollationRules:
    """Module-level convenience wrapper around :meth:`CollationRules.parse`."""
    return CollationRules.parse(text)


def default_cyrillic_rules() -> CollationRules:
    """Rules for the bundled Cyrillic generator and examples (cached)."""
    return _cached_parse(DEFAULT_CYRILLIC_RULES)
