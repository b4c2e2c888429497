import pytest

from scenegan.data.labels import (
    CANONICAL_LABELS,
    NUM_ATTRIBUTES,
    NUM_CLASSES,
    UNLABELED_INDEX,
    LabelTaxonomy,
    TaxonomyError,
    attribute_names,
    canonicalize_label,
    label_palette,
)

EXPECTED_ORDER = (
    "sky", "building", "grass", "tree", "mountain", "rock", "road", "field", "ground",
    "earth", "sea", "water", "plant", "roof", "city", "village", "cityscape", "hill",
)


def test_canonical_label_order_is_frozen():
    assert CANONICAL_LABELS == EXPECTED_ORDER
    assert len(CANONICAL_LABELS) == 18
    assert UNLABELED_INDEX == 18
    assert NUM_CLASSES == 19


def test_synonyms_map_to_building():
    tax = LabelTaxonomy.default()
    building = CANONICAL_LABELS.index("building")
    for raw in ("skyscraper", "tower", "house"):
        assert canonicalize_label(raw, tax) == building


def test_canonical_names_map_to_their_own_index():
    tax = LabelTaxonomy.default()
    for i, name in enumerate(CANONICAL_LABELS):
        assert canonicalize_label(name, tax) == i


def test_unknown_labels_fall_back_to_unlabeled():
    tax = LabelTaxonomy.default()
    for raw in ("person", "car", "airplane", "no-such-label"):
        assert canonicalize_label(raw, tax) == UNLABELED_INDEX


def test_canonicalization_is_deterministic():
    tax = LabelTaxonomy.default()
    results = {canonicalize_label("skyscraper", tax) for _ in range(10)}
    assert len(results) == 1


def test_custom_synonym_table():
    tax = LabelTaxonomy.from_synonym_names({"pond": "water", "lane": "road"})
    assert canonicalize_label("pond", tax) == CANONICAL_LABELS.index("water")
    assert canonicalize_label("lane", tax) == CANONICAL_LABELS.index("road")
    # names absent from the custom table are background
    assert canonicalize_label("skyscraper", tax) == UNLABELED_INDEX


def test_synonym_targeting_unknown_canonical_rejected():
    with pytest.raises(TaxonomyError):
        LabelTaxonomy.from_synonym_names({"pond": "lake"})


def test_attribute_names_shape_and_uniqueness():
    names = attribute_names()
    assert len(names) == NUM_ATTRIBUTES == 40
    assert len(set(names)) == 40
    assert all(isinstance(n, str) and n for n in names)


def test_palette_covers_every_class():
    palette = label_palette()
    assert len(palette) == NUM_CLASSES
    for rgb in palette:
        assert len(rgb) == 3
        assert all(0 <= v <= 255 for v in rgb)
