import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


def _xy_gibbs_settings():
    """
    Return the ``XY_GIBBS`` settings dictionary.

    The numerical modules are also used as a plain library, outside any
    configured Django project; in that case the defaults below apply.
    """
    try:
        return getattr(settings, 'XY_GIBBS', {}) or {}
    except ImproperlyConfigured:
        return {}


def _setting(key, default, env_var=None, cast=None):
    if env_var:
        raw = os.environ.get(env_var)
        if raw not in (None, ''):
            return (cast or type(default))(raw)
    value = _xy_gibbs_settings().get(key, default)
    return (cast or type(default))(value)


class SolverConfig:
    """
    Size caps and numerical tolerances for the exact solver and the simulator.
    These can be overridden in Django settings via XY_GIBBS, and the caps
    additionally through environment variables.

    Example configuration:

    XY_GIBBS = {
        'analytic_site_cap': 16,   # largest N for the 2^(N-1) sector enumeration
        'dense_site_cap': 12,      # largest N for the dense 2^N x 2^N Hamiltonian
        'qubit_cap': 24,           # largest register the statevector engine allocates
        'degeneracy_tolerance': 1e-8,
        'eigenvalue_clamp': 1e-10,
    }
    """

    @property
    def ANALYTIC_SITE_CAP(self):
        """Largest chain length accepted by the analytic sector enumeration."""
        return _setting('analytic_site_cap', 16, 'XY_GIBBS_ANALYTIC_SITE_CAP', int)

    @property
    def DENSE_SITE_CAP(self):
        """Largest chain length for which the dense Hamiltonian is built."""
        return _setting('dense_site_cap', 12, 'XY_GIBBS_DENSE_SITE_CAP', int)

    @property
    def QUBIT_CAP(self):
        """Largest number of qubits a statevector may hold."""
        return _setting('qubit_cap', 24, 'XY_GIBBS_QUBIT_CAP', int)

    @property
    def DEGENERACY_TOLERANCE(self):
        """Absolute tolerance used when grouping degenerate eigenvalues."""
        return _setting('degeneracy_tolerance', 1e-8, cast=float)

    @property
    def EIGENVALUE_CLAMP(self):
        """Negative eigenvalues down to minus this value are treated as zero."""
        return _setting('eigenvalue_clamp', 1e-10, cast=float)


# Singleton instance
solver_config = SolverConfig()


class VqaDefaults:
    """
    Defaults for the variational loop. Every value can be overridden per run
    through VqaConfig; the settings only move the defaults.
    """

    @property
    def GRADIENT_STEP(self):
        """Central finite-difference step for the quasi-Newton gradient."""
        return _setting('gradient_step', 1e-6, cast=float)

    @property
    def MAX_ITERATIONS(self):
        return _setting('max_iterations', 2000, cast=int)

    @property
    def ENERGY_TOLERANCE(self):
        """Stop once the free energy changes by less than this between iterations."""
        return _setting('energy_tolerance', 1e-10, cast=float)

    @property
    def GRADIENT_TOLERANCE(self):
        """Stop once the gradient infinity-norm falls below this."""
        return _setting('gradient_tolerance', 1e-8, cast=float)

    @property
    def RESTARTS(self):
        return _setting('restarts', 20, cast=int)

    @property
    def SYSTEM_LAYERS(self):
        """Brick-wall layers in the system circuit."""
        return _setting('system_layers', 3, cast=int)

    @property
    def ANCILLA_LAYERS(self):
        """Repetitions of the Grover-Rudolph block on the ancilla register."""
        return _setting('ancilla_layers', 1, cast=int)

    @property
    def FIDELITY_THRESHOLD(self):
        return _setting('fidelity_threshold', 0.98, cast=float)


# Singleton instance
vqa_defaults = VqaDefaults()


class SweepDefaults:
    """Default inverse-temperature grid for parameter sweeps."""

    @property
    def BETA_MIN(self):
        return _setting('sweep_beta_min', 0.1, cast=float)

    @property
    def BETA_MAX(self):
        return _setting('sweep_beta_max', 10.0, cast=float)

    @property
    def BETA_POINTS(self):
        return _setting('sweep_beta_points', 8, cast=int)


# Singleton instance
sweep_defaults = SweepDefaults()
