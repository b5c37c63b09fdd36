from pathlib import Path

from django.conf import settings

from enhancer.management.base import EnhancerCommand
from enhancer.networks import build_discriminator, build_generator, count_parameters, receptive_field, stage_shapes
from enhancer.networks.introspection import REFERENCE_PARAMETER_COUNT, ParameterCount
from enhancer.serializer.config_serializer import load_config
from enhancer.training.checkpoint import load_checkpoint


class Command(EnhancerCommand):
    help = 'Print the shape ledger, receptive field and parameter counts of a configuration'

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--config', help='YAML run configuration (default: TDCGAN_DEFAULT_CONFIG)')
        source.add_argument('--model', help='Checkpoint whose embedded configuration to inspect')

    def run(self, **options):
        if options['model']:
            cfg = load_checkpoint(options['model']).config
            self.record(config_path=options['model'], config=cfg)
        else:
            config_path = Path(options['config'] or settings.TDCGAN['DEFAULT_CONFIG'])
            cfg = load_config(config_path)
            self.record(config_path=config_path, config=cfg)

        self.stdout.write(f"config digest {cfg.digest()}")
        self.stdout.write('generator stages:')
        for stage, shape in stage_shapes(cfg.model):
            self.stdout.write(f"  {stage:<16} {' x '.join(str(d) for d in shape[1:])}")

        field = receptive_field(cfg.model)
        self.stdout.write(f"receptive field: {field.frames} frames / {field.samples} samples")

        generator = count_parameters(build_generator(cfg.model, cfg.seed))
        discriminator = count_parameters(build_discriminator(cfg.discriminator, cfg.model.frame_len, cfg.seed + 1))
        for title, counts in (('generator', generator), ('discriminator', discriminator)):
            self.stdout.write(f"{title} parameters: {counts.total}")
            for name, size in counts.per_module.items():
                self.stdout.write(f"  {name:<16} {size}")
        total = generator.total + discriminator.total
        within = ParameterCount(total=total, per_module={}).within()
        self.stdout.write(f"total parameters: {total} "
                          f"({'within' if within else 'outside'} 10% of {REFERENCE_PARAMETER_COUNT:.3g})")
        self.stdout.write(self.style.SUCCESS('inspection complete'))
