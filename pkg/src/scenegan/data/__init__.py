from .labels import (
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
from .layout import (
    LayoutError,
    SemanticLayout,
    decode_layout,
    encode_layout,
    layout_from_png_bytes,
    layout_to_png_bytes,
    load_layout_png,
    save_layout_png,
)
from .manifest import (
    DatasetManifest,
    ManifestError,
    SampleRecord,
    SceneSample,
    load_manifest,
    materialize_samples,
    propagate_webcam_layout,
    write_manifest,
)
from .preprocess import PreprocessError, preprocess_image, preprocess_layout, to_uint8
from .toy import (
    ToySceneSpec,
    ToySpecError,
    default_toy_spec,
    generate_toy_dataset,
    render_toy,
    sample_toy_attributes,
    sample_toy_layout,
    segment_color_error,
)

__all__ = [name for name in dir() if not name.startswith("_")]
