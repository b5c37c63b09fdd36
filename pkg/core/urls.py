"""
URL configuration for the TDCGAN project.

Only the admin site is routed; it is used to browse the run ledger
(RunManifest and EvaluationRecord rows written by the management commands).
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
