from django.apps import AppConfig
from django.conf import settings
from django.core import checks


def check_fitting_settings(app_configs, **kwargs):
    """Reject fitting defaults the commands could not run with."""
    errors = []
    if settings.RIGFIT_THREADS < 1:
        errors.append(checks.Error('RIGFIT_THREADS must be at least 1.', id='fitting.E001'))
    defaults = settings.RIGFIT
    for name in ('ALPHA_GRID', 'SIGMA2_GRID'):
        if any(value < 0 for value in defaults[name]):
            errors.append(checks.Error(f'RIGFIT[{name!r}] must not contain negative values.', id='fitting.E002'))
    if any(passes < 1 for passes in defaults['PASSES_GRID']):
        errors.append(checks.Error("RIGFIT['PASSES_GRID'] values must be at least 1.", id='fitting.E003'))
    if not defaults['DEGENERATE_NORM'] > 0 or not defaults['PINV_CUTOFF'] > 0:
        errors.append(checks.Error('DEGENERATE_NORM and PINV_CUTOFF must be positive.', id='fitting.E004'))
    return errors


class FittingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fitting'
    verbose_name = 'Inverse rig fitting'

    def ready(self):
        checks.register(check_fitting_settings)
