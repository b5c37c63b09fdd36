from django.db import models
from django.utils import timezone


class RunManifest(models.Model):
    """Запись о запуске команды: конфиг, сид, время, артефакты"""

    class Status(models.TextChoices):
        RUNNING = 'running', 'Running'
        SUCCEEDED = 'succeeded', 'Succeeded'
        FAILED = 'failed', 'Failed'

    command = models.CharField(max_length=50, verbose_name='Command')
    config_path = models.CharField(max_length=500, blank=True, default='', verbose_name='Config path')
    config_digest = models.CharField(
        max_length=64,
        blank=True,
        default='',
        verbose_name='Config digest',
        help_text='SHA-256 of the canonical JSON of the config actually used'
    )
    seed = models.BigIntegerField(null=True, blank=True)
    started_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(null=True, blank=True)
    artifacts = models.JSONField(default=dict, blank=True, help_text='Artifact name -> path')
    tool_version = models.CharField(max_length=20)
    status = models.CharField(max_length=10, choices=Status.choices, default=Status.RUNNING)
    exit_code = models.PositiveSmallIntegerField(null=True, blank=True)
    message = models.TextField(blank=True, default='')

    class Meta:
        verbose_name = 'Run manifest'
        verbose_name_plural = 'Run manifests'
        ordering = ['-started_at']

    def __str__(self):
        return f"{self.command} ({self.status}, {self.started_at:%Y-%m-%d %H:%M})"

    def finish(self, exit_code=0, message='', artifacts=None):
        """Закрывает запись с кодом возврата"""
        if artifacts:
            self.artifacts = {**self.artifacts, **artifacts}
        self.exit_code = exit_code
        self.status = self.Status.SUCCEEDED if exit_code == 0 else self.Status.FAILED
        self.message = message
        self.finished_at = timezone.now()
        self.save()


class EvaluationRecord(models.Model):
    """Средние метрики одной оценки корпуса"""
    run = models.ForeignKey(RunManifest, on_delete=models.CASCADE, related_name='evaluations')
    penalty_mode = models.CharField(max_length=10, blank=True, default='')
    config_digest = models.CharField(max_length=64, blank=True, default='')
    seed = models.BigIntegerField(null=True, blank=True)
    clips = models.PositiveIntegerField(verbose_name='Clips scored')
    snr_in = models.FloatField(verbose_name='SNR in (dB)')
    snr_out = models.FloatField(verbose_name='SNR out (dB)')
    segsnr_in = models.FloatField(verbose_name='segSNR in (dB)')
    segsnr_out = models.FloatField(verbose_name='segSNR out (dB)')
    report_path = models.CharField(max_length=500, blank=True, default='')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Evaluation'
        verbose_name_plural = 'Evaluations'
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.penalty_mode or 'model'}: segSNR {self.segsnr_in:.2f} -> {self.segsnr_out:.2f} dB"

    @property
    def segsnr_gain(self):
        return self.segsnr_out - self.segsnr_in

    @classmethod
    def from_report(cls, run, report, report_path='', seed=None):
        means = report.means
        return cls.objects.create(
            run=run,
            penalty_mode=report.penalty_mode,
            config_digest=report.config_digest,
            seed=seed,
            clips=len(report.clips),
            report_path=str(report_path),
            **means,
        )
