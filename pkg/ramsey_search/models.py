from django.core.exceptions import ValidationError
from django.db import models


class SearchRun(models.Model):
    """One search restart or resumed run; created when it starts, updated when it ends"""

    STATUS_RUNNING = 'running'
    STATUS_CERTIFIED = 'certified'
    STATUS_EXHAUSTED = 'exhausted'
    STATUS_FAILED = 'failed'

    out_prefix = models.CharField(max_length=500, help_text="Prefix of the .cert, .stats.csv and .ckpt.json files")
    config_json = models.JSONField(help_text="Trainer configuration the run used")
    seed = models.BigIntegerField(default=0)
    restart = models.IntegerField(default=0)
    resumed = models.BooleanField(default=False)

    status = models.CharField(
        max_length=20,
        choices=[
            (STATUS_RUNNING, 'Running - search in progress'),
            (STATUS_CERTIFIED, 'Certified - critical coloring found'),
            (STATUS_EXHAUSTED, 'Exhausted - batch budget spent'),
            (STATUS_FAILED, 'Failed - run aborted with an error'),
        ],
        default=STATUS_RUNNING,
    )
    batches_run = models.IntegerField(default=0)
    best_reward = models.BigIntegerField(null=True, blank=True)
    best_coloring = models.TextField(blank=True, default='', help_text="Best coloring in compact 'n m digits' form")
    certificate_text = models.TextField(blank=True, default='')
    error_message = models.TextField(blank=True, null=True)

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['created_at'], name='searchrun_created_idx'),
            models.Index(fields=['status'], name='searchrun_status_idx'),
            models.Index(fields=['out_prefix', 'restart'], name='searchrun_prefix_idx'),
        ]

    def __str__(self):
        return f"Run {self.id}: {self.out_prefix} restart {self.restart} ({self.status})"

    def clean(self):
        """A certified run carries its certificate and a zero best reward"""
        if self.status == self.STATUS_CERTIFIED:
            if not self.certificate_text:
                raise ValidationError('Certified run is missing its certificate')
            if self.best_reward != 0:
                raise ValidationError(f'Certified run must have best reward 0, got {self.best_reward}')
        for key in ('n', 'm', 'patterns'):
            if key not in (self.config_json or {}):
                raise ValidationError(f'Run config missing required key: {key}')

    @property
    def pattern_specs(self):
        return (self.config_json or {}).get('patterns', [])


class CertifiedRunManager(models.Manager):
    def get_queryset(self):
        return super().get_queryset().filter(status=SearchRun.STATUS_CERTIFIED)


SearchRun.add_to_class('certified', CertifiedRunManager())
