from .config import (
    BOTTLENECK,
    ConfigError,
    DiscriminatorConfig,
    GeneratorConfig,
    VariantKind,
    config_to_json,
    discriminator_config_from_json,
    discriminator_shape_plan,
    generator_config_from_json,
    generator_shape_plan,
    make_variant,
    variant_of,
)
from .conditioning import (
    ConditioningError,
    assemble_condition_maps,
    assemble_generator_input,
    sample_noise,
    sample_noise_batch,
    tile_vector,
)
from .discriminator import SiameseDiscriminator
from .generator import Generator, NonFiniteError
from .inference import InferenceError, ensure_finite_weights, generate_image, generator_from_checkpoint

__all__ = [name for name in dir() if not name.startswith("_")]
