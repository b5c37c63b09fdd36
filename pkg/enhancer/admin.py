from django.contrib import admin

from .models import EvaluationRecord, RunManifest


class EvaluationInline(admin.TabularInline):
    model = EvaluationRecord
    extra = 0
    readonly_fields = ('penalty_mode', 'seed', 'clips', 'snr_in', 'snr_out', 'segsnr_in', 'segsnr_out',
                       'report_path')


@admin.register(RunManifest)
class RunManifestAdmin(admin.ModelAdmin):
    list_display = ('command', 'status', 'exit_code', 'seed', 'config_digest', 'started_at', 'finished_at')
    list_filter = ('command', 'status')
    search_fields = ('command', 'config_digest', 'config_path')
    readonly_fields = ('started_at', 'finished_at', 'artifacts', 'tool_version')
    search_help_text = 'Command, config path or digest'
    ordering = ('-started_at',)
    list_per_page = 20
    inlines = [EvaluationInline]


@admin.register(EvaluationRecord)
class EvaluationRecordAdmin(admin.ModelAdmin):
    list_display = ('run', 'penalty_mode', 'seed', 'clips', 'segsnr_in', 'segsnr_out', 'snr_in', 'snr_out')
    list_filter = ('penalty_mode',)
    search_fields = ('config_digest', 'run__command')
    readonly_fields = ('created_at',)
    ordering = ('-created_at',)
    list_per_page = 30
