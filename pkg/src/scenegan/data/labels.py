"""Label taxonomy: 18 canonical outdoor scene classes plus an unlabeled slot.

The canonical order below is frozen: layout channel k always corresponds to
``CANONICAL_LABELS[k]`` and checkpoints depend on it. The synonym map is
config-driven so that new raw-label merges never require a code change.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

CANONICAL_LABELS = (
    "sky",
    "building",
    "grass",
    "tree",
    "mountain",
    "rock",
    "road",
    "field",
    "ground",
    "earth",
    "sea",
    "water",
    "plant",
    "roof",
    "city",
    "village",
    "cityscape",
    "hill",
)

UNLABELED_INDEX = len(CANONICAL_LABELS)  # 18
NUM_CLASSES = len(CANONICAL_LABELS) + 1  # 19 layout channels


class TaxonomyError(ValueError):
    pass


def _load_resource(name: str):
    with resources.files("scenegan.resources").joinpath(name).open("r") as f:
        return json.load(f)


@dataclass(frozen=True)
class LabelTaxonomy:
    """Canonical class list plus a raw-label -> canonical-index synonym map."""

    canonical_labels: tuple = CANONICAL_LABELS
    synonym_map: dict = field(default_factory=dict)
    unlabeled_index: int = UNLABELED_INDEX

    def __post_init__(self):
        if tuple(self.canonical_labels) != CANONICAL_LABELS:
            raise TaxonomyError("canonical label list or order was altered; it is frozen")
        for raw, idx in self.synonym_map.items():
            if not 0 <= idx <= self.unlabeled_index:
                raise TaxonomyError(f"synonym {raw!r} maps to out-of-range index {idx}")

    @classmethod
    def default(cls) -> "LabelTaxonomy":
        """Taxonomy with the shipped synonym config (skyscraper/tower/house -> building)."""
        return cls.from_synonym_names(_load_resource("synonyms.json"))

    @classmethod
    def from_synonym_names(cls, name_map: dict) -> "LabelTaxonomy":
        """Build from a {raw label: canonical name} mapping, e.g. a user config file."""
        index = {name: i for i, name in enumerate(CANONICAL_LABELS)}
        synonyms = {}
        for raw, canonical in name_map.items():
            if canonical not in index:
                raise TaxonomyError(f"synonym {raw!r} targets unknown canonical label {canonical!r}")
            synonyms[raw] = index[canonical]
        return cls(synonym_map=synonyms)

    def index_of(self, name: str) -> int:
        return self.canonical_labels.index(name)


def canonicalize_label(raw: str, taxonomy: LabelTaxonomy) -> int:
    """Map a raw label string to its canonical channel index.

    Canonical names map to themselves, configured synonyms to their target,
    and anything else to the unlabeled index.
    """
    if raw in taxonomy.canonical_labels:
        return taxonomy.canonical_labels.index(raw)
    return taxonomy.synonym_map.get(raw, taxonomy.unlabeled_index)


def attribute_names() -> list:
    """The 40 transient attribute names, in frozen channel order."""
    names = _load_resource("attributes.json")
    assert len(names) == 40
    return names


NUM_ATTRIBUTES = 40


def label_palette() -> list:
    """RGB display colors for the 19 layout classes, in channel order."""
    palette = _load_resource("palette.json")
    names = list(CANONICAL_LABELS) + ["unlabeled"]
    return [tuple(palette[name]) for name in names]
