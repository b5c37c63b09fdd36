"""Shared plumbing of the enhancer management commands: run ledger and exit codes."""
import argparse
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import connection

from enhancer.autodiff import set_check_nonfinite
from enhancer.exceptions import EnhancerError
from enhancer.models import EvaluationRecord, RunManifest
from enhancer.serializer.manifest_serializer import write_manifest

logger = logging.getLogger(__name__)


def parse_float_list(value):
    try:
        return [float(item) for item in value.split(',') if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {value!r}") from exc


def parse_int_list(value):
    try:
        return [int(item) for item in value.split(',') if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {value!r}") from exc


class EnhancerCommand(BaseCommand):
    """Records a RunManifest around `run()` and maps engine errors to exit codes.

    `run()` fills `self.manifest` (config, digest, seed, artifacts) as it learns
    them and may set `self.manifest_dir` to get a run_manifest.json there.
    """

    def handle(self, *args, **options):
        set_check_nonfinite(settings.TDCGAN['CHECK_NONFINITE'])
        self._require_ledger()
        self.manifest = RunManifest.objects.create(command=self.command_name(),
                                                   tool_version=settings.TDCGAN['TOOL_VERSION'])
        self.manifest_dir = None
        try:
            self.run(**options)
        except EnhancerError as exc:
            logger.error('%s failed: %s', self.command_name(), exc)
            self._close(exc.exit_code, str(exc))
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except CommandError as exc:
            self._close(exc.returncode, str(exc))
            raise
        self._close(0, '')

    def _require_ledger(self):
        tables = set(connection.introspection.table_names())
        missing = sorted({model._meta.db_table for model in (RunManifest, EvaluationRecord)} - tables)
        if missing:
            logger.error('run ledger tables missing: %s', ', '.join(missing))
            raise CommandError('the run ledger is not set up; run `python manage.py migrate` first', returncode=2)

    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, **options):
        raise NotImplementedError

    def _close(self, exit_code, message):
        self.manifest.finish(exit_code=exit_code, message=message)
        if self.manifest_dir is not None:
            try:
                path = write_manifest(self.manifest, self.manifest_dir)
            except EnhancerError as exc:
                logger.error('cannot write run manifest: %s', exc)
            else:
                logger.info('run manifest written to %s', path)

    def record(self, config_path=None, config=None, seed=None, **artifacts):
        if config_path is not None:
            self.manifest.config_path = str(config_path)
        if config is not None:
            self.manifest.config_digest = config.digest()
        if seed is not None:
            self.manifest.seed = seed
        if artifacts:
            self.manifest.artifacts = {**self.manifest.artifacts,
                                       **{key: str(value) for key, value in artifacts.items()}}
        self.manifest.save()
