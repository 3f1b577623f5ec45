"""Term lists backing title analysis: bait phrase categories, valence map,
negators, intensifiers, stopwords.

All files are UTF-8 with one entry per line and '#' comments. The valence and
intensifier files carry a tab-separated value after the term (the intensifier
list needs per-term deltas, so it shares the valence file layout). Fixture
lists ship with the package and are user-replaceable via config paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


@dataclass
class BaitLexicons:
    celebrities: list[str]
    slang: list[str]
    porn: list[str]
    bollywood: list[str]
    generic: list[str]
    valence: dict[str, float]
    negators: set[str]
    intensifiers: dict[str, float]
    stopwords: set[str]

    def category_terms(self) -> dict[str, list[str]]:
        return {
            "celebrity": self.celebrities,
            "slang": self.slang,
            "porn": self.porn,
            "bollywood": self.bollywood,
            "generic": self.generic,
        }


_TERM_FILES = {
    "celebrities": "celebrities.txt",
    "slang": "slang.txt",
    "porn": "porn_words.txt",
    "bollywood": "bollywood_phrases.txt",
    "generic": "generic_lures.txt",
}


def _lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.lower())
    return out


def load_term_list(path: Path | str) -> list[str]:
    return _lines(Path(path).read_text(encoding="utf-8"))


def load_valence_map(path: Path | str) -> dict[str, float]:
    out = {}
    for line in _lines(Path(path).read_text(encoding="utf-8")):
        term, _, value = line.partition("\t")
        if not value:
            raise ValueError(f"{path}: expected 'term<TAB>value', got {line!r}")
        out[term.strip()] = float(value)
    return out


def load_lexicons(directory: Path | str) -> BaitLexicons:
    d = Path(directory)
    terms = {key: load_term_list(d / name) for key, name in _TERM_FILES.items()}
    return BaitLexicons(
        celebrities=terms["celebrities"],
        slang=terms["slang"],
        porn=terms["porn"],
        bollywood=terms["bollywood"],
        generic=terms["generic"],
        valence=load_valence_map(d / "valence.tsv"),
        negators=set(load_term_list(d / "negators.txt")),
        intensifiers=load_valence_map(d / "intensifiers.tsv"),
        stopwords=set(load_term_list(d / "stopwords.txt")),
    )


def packaged_data_dir() -> Path:
    return Path(resources.files("baitscreen").joinpath("data"))


def default_lexicons() -> BaitLexicons:
    return load_lexicons(packaged_data_dir())


def load_stopwords(path: Path | str) -> set[str]:
    return set(load_term_list(path))
