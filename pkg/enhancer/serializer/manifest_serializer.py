import json
from pathlib import Path

from rest_framework import serializers

from enhancer.exceptions import DataError
from enhancer.models import EvaluationRecord, RunManifest


class EvaluationRecordSerializer(serializers.ModelSerializer):
    """Сериализатор для модели EvaluationRecord"""
    segsnr_gain = serializers.FloatField(read_only=True)

    class Meta:
        model = EvaluationRecord
        fields = ['id', 'penalty_mode', 'config_digest', 'seed', 'clips', 'snr_in', 'snr_out',
                  'segsnr_in', 'segsnr_out', 'segsnr_gain', 'report_path', 'created_at']
        read_only_fields = fields


class RunManifestSerializer(serializers.ModelSerializer):
    """Сериализатор для модели RunManifest"""
    evaluations = EvaluationRecordSerializer(many=True, read_only=True)

    class Meta:
        model = RunManifest
        fields = ['id', 'command', 'config_path', 'config_digest', 'seed', 'started_at', 'finished_at',
                  'artifacts', 'tool_version', 'status', 'exit_code', 'message', 'evaluations']
        read_only_fields = fields


def write_manifest(run: RunManifest, directory, name='run_manifest.json'):
    path = Path(directory) / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(RunManifestSerializer(run).data, indent=2, default=str))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    return path
