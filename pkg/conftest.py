"""Run the Django test suite under plain pytest.

Configures rigfit.settings and creates the test database once per session,
the same way ``manage.py test`` does.
"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rigfit.settings')
django.setup()

import pytest  # noqa: E402
from django.test.runner import DiscoverRunner  # noqa: E402
from django.test.utils import setup_test_environment, teardown_test_environment  # noqa: E402


@pytest.fixture(scope='session', autouse=True)
def django_test_environment():
    setup_test_environment()
    runner = DiscoverRunner(verbosity=0, interactive=False)
    old_config = runner.setup_databases()
    yield
    runner.teardown_databases(old_config)
    teardown_test_environment()
