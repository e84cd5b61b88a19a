"""Words in creation and annihilation letters."""
from dataclasses import dataclass
from typing import NamedTuple

from app.errors import WindowOverflowError

CREATOR = "c"
ANNIHILATOR = "a"


class Letter(NamedTuple):
    kind: str
    mode: int

    @property
    def is_creator(self) -> bool:
        return self.kind == CREATOR

    def adjoint(self) -> "Letter":
        return Letter(ANNIHILATOR if self.is_creator else CREATOR, self.mode)

    def shift(self, k: int) -> "Letter":
        return Letter(self.kind, self.mode + k)

    def __str__(self) -> str:
        return f"{self.kind}({self.mode})"


def c(mode: int) -> Letter:
    return Letter(CREATOR, mode)


def a(mode: int) -> Letter:
    return Letter(ANNIHILATOR, mode)


@dataclass(frozen=True)
class ObservableWord:
    """A product of letters read left to right; the empty word is the identity."""
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for letter in self.letters:
            if letter.kind not in (CREATOR, ANNIHILATOR):
                raise ValueError(f"unknown letter kind {letter.kind!r}")

    @classmethod
    def of(cls, *letters: Letter) -> "ObservableWord":
        return cls(tuple(letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "ObservableWord") -> "ObservableWord":
        return ObservableWord(self.letters + other.letters)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.letters:
            return None
        modes = [x.mode for x in self.letters]
        return min(modes), max(modes)

    @property
    def width(self) -> int:
        s = self.support
        return 0 if s is None else s[1] - s[0]

    def shift(self, k: int) -> "ObservableWord":
        return ObservableWord(tuple(x.shift(k) for x in self.letters))

    def adjoint(self) -> "ObservableWord":
        return ObservableWord(tuple(x.adjoint() for x in reversed(self.letters)))

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.letters) if self.letters else "1"


IDENTITY_WORD = ObservableWord()


def shift_word(word: ObservableWord, k: int, window=None) -> ObservableWord:
    """Move every mode of ``word`` up by ``k``.

    When a window is given the shifted support must stay inside it.
    """
    shifted = word.shift(k)
    if window is not None and shifted.support is not None:
        lo, hi = shifted.support
        if not window.covers(lo, hi):
            raise WindowOverflowError(
                f"shift of {word} by {k} leaves window {window}",
                (min(lo, window.lo), max(hi, window.hi)),
            )
    return shifted
