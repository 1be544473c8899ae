from django.db import models


class RunRecord(models.Model):
    """One executed command, pointing at the manifest that can re-run it."""

    command = models.CharField(max_length=64)
    seed = models.BigIntegerField(null=True, blank=True)
    config = models.JSONField(default=dict)
    output_dir = models.CharField(max_length=1024)
    manifest_path = models.CharField(max_length=1024)
    created = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created', '-id']

    def __str__(self):
        return f'{self.command} -> {self.output_dir}'
