# xy_gibbs/utils/sweep.py
import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Tuple

import numpy as np

from xy_gibbs.config import sweep_defaults
from xy_gibbs.exceptions import XYGibbsError
from xy_gibbs.models import ModelParams, SweepSpec, VqaConfig
from xy_gibbs.utils.vqa import GibbsVqa

logger = logging.getLogger('xy_gibbs.sweep')

SWEEP_COLUMNS = (
    'beta', 'gamma', 'h', 'fidelity_best', 'free_energy_best', 'exact_free_energy',
    'restarts', 'wall_time', 'status', 'error',
)


def default_beta_grid() -> Tuple[float, ...]:
    """Log-spaced stand-in grid of inverse temperatures."""
    return tuple(np.geomspace(sweep_defaults.BETA_MIN, sweep_defaults.BETA_MAX, sweep_defaults.BETA_POINTS))


def point_config(template: VqaConfig, gamma: float, field_h: float, beta: float) -> VqaConfig:
    model = ModelParams(n_sites=template.n_sites, gamma=gamma, field_h=field_h)
    return dataclasses.replace(template, model=model, beta=beta)


def run_point(config: VqaConfig) -> Dict[str, Any]:
    """
    One grid point. Failures are reported in the row instead of raised so
    the rest of the sweep carries on.
    """
    started = time.perf_counter()
    row = {
        'beta': config.beta,
        'gamma': config.model.gamma,
        'h': config.model.field_h,
        'fidelity_best': None,
        'free_energy_best': None,
        'exact_free_energy': None,
        'restarts': config.restarts,
        'wall_time': None,
        'status': 'ok',
        'error': '',
    }
    try:
        result = GibbsVqa(config).optimize()
        row.update(
            fidelity_best=result.max_fidelity,
            free_energy_best=result.best_free_energy,
            exact_free_energy=result.exact_free_energy,
        )
    except XYGibbsError as e:
        logger.exception(
            f"sweep point gamma={config.model.gamma}, h={config.model.field_h}, beta={config.beta} failed"
        )
        row.update(status='failed', error=str(e))
    row['wall_time'] = time.perf_counter() - started
    return row


def run_sweep(spec: SweepSpec) -> List[Dict[str, Any]]:
    """Rows in grid order (gamma, then h, then beta) whatever the completion order."""
    configs = [point_config(spec.template, g, h, b) for g, h, b in spec.points()]
    logger.info(f"sweeping {len(configs)} points with {spec.jobs} worker(s)")
    if spec.jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(run_point, configs))
    return [run_point(config) for config in configs]
