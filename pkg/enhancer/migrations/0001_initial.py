# Generated by Django 5.2.8 on 2026-10-17 09:12

import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=50, verbose_name='Command')),
                ('config_path', models.CharField(blank=True, default='', max_length=500, verbose_name='Config path')),
                ('config_digest', models.CharField(blank=True, default='', help_text='SHA-256 of the canonical JSON of the config actually used', max_length=64, verbose_name='Config digest')),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('started_at', models.DateTimeField(default=django.utils.timezone.now)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
                ('artifacts', models.JSONField(blank=True, default=dict, help_text='Artifact name -> path')),
                ('tool_version', models.CharField(max_length=20)),
                ('status', models.CharField(choices=[('running', 'Running'), ('succeeded', 'Succeeded'), ('failed', 'Failed')], default='running', max_length=10)),
                ('exit_code', models.PositiveSmallIntegerField(blank=True, null=True)),
                ('message', models.TextField(blank=True, default='')),
            ],
            options={
                'verbose_name': 'Run manifest',
                'verbose_name_plural': 'Run manifests',
                'ordering': ['-started_at'],
            },
        ),
        migrations.CreateModel(
            name='EvaluationRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('penalty_mode', models.CharField(blank=True, default='', max_length=10)),
                ('config_digest', models.CharField(blank=True, default='', max_length=64)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('clips', models.PositiveIntegerField(verbose_name='Clips scored')),
                ('snr_in', models.FloatField(verbose_name='SNR in (dB)')),
                ('snr_out', models.FloatField(verbose_name='SNR out (dB)')),
                ('segsnr_in', models.FloatField(verbose_name='segSNR in (dB)')),
                ('segsnr_out', models.FloatField(verbose_name='segSNR out (dB)')),
                ('report_path', models.CharField(blank=True, default='', max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='evaluations', to='enhancer.runmanifest')),
            ],
            options={
                'verbose_name': 'Evaluation',
                'verbose_name_plural': 'Evaluations',
                'ordering': ['-created_at'],
            },
        ),
    ]
