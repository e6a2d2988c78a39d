"""
Standalone Django settings for running xy_gibbs outside a host project.

There is no database: the app only contributes management commands and
REST framework serializers.
"""
import os

SECRET_KEY = os.environ.get('XY_GIBBS_SECRET_KEY', 'xy-gibbs-local-only')

DEBUG = False

INSTALLED_APPS = [
    'rest_framework',
    'xy_gibbs',
]

DATABASES = {}

USE_TZ = True

REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
}

XY_GIBBS = {
    'analytic_site_cap': 16,
    'dense_site_cap': 12,
    'qubit_cap': 24,
    'degeneracy_tolerance': 1e-8,
    'eigenvalue_clamp': 1e-10,
    'gradient_step': 1e-6,
    'max_iterations': 2000,
    'energy_tolerance': 1e-10,
    'gradient_tolerance': 1e-8,
    'restarts': 20,
    'system_layers': 3,
    'ancilla_layers': 1,
    'fidelity_threshold': 0.98,
    'sweep_beta_min': 0.1,
    'sweep_beta_max': 10.0,
    'sweep_beta_points': 8,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'xy_gibbs': {
            'handlers': ['console'],
            'level': os.environ.get('XY_GIBBS_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
