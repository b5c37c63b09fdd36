from enhancer.networks.config import DiscriminatorConfig, GeneratorConfig
from enhancer.networks.discriminator import Discriminator, build_discriminator
from enhancer.networks.generator import Generator, build_generator
from enhancer.networks.introspection import (
    ParameterCount,
    ReceptiveField,
    count_parameters,
    linearize,
    measure_receptive_field,
    receptive_field,
    stage_shapes,
)
