"""
SweepSystem - Manages a collection of independent sweep points
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from src.errors import ConfigError
from src.link.channel import InterferenceKind
from src.link.link_engine import LinkEngine

logger = logging.getLogger(__name__)

SWEEP_AXES = ("sir_db", "f_i", "snr_db")


def derive_seed(base_seed, index):
    """Independent but reproducible per-point seed from (base seed, point index)."""
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def apply_axis(scenario, axis, value, index):
    """
    Scenario for one sweep point

    Args:
        scenario (Scenario): Base scenario
        axis (str): One of SWEEP_AXES
        value (float): Axis value for this point
        index (int): Point index, used to derive the noise seed

    Returns:
        Scenario: The point's scenario
    """
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", f"must be one of {SWEEP_AXES}, got {axis!r}")
    if not np.isfinite(value):
        raise ConfigError("values", f"axis values must be finite, got {value!r}")

    noise = replace(scenario.noise, seed=derive_seed(scenario.noise.seed, index))
    point = scenario.clone(name=f"{scenario.name}[{axis}={value:g}]", noise=noise)

    if axis == "sir_db":
        point = point.clone(calibration=replace(point.calibration, sir_db=float(value), a_sig_v=None))
    elif axis == "snr_db":
        point = point.clone(noise=replace(point.noise, snr_db=float(value)))
    else:
        if not point.interferers:
            raise ConfigError("interferers", "an f_i sweep needs at least one interferer")
        first = point.interferers[0]
        if first.kind is InterferenceKind.CW:
            first = replace(first, freq_hz=float(value))
        elif first.kind is InterferenceKind.AM:
            first = replace(first, carrier_hz=float(value))
        else:
            raise ConfigError("interferers[0].kind", "an f_i sweep needs a cw or am first interferer")
        point = point.clone(interferers=(first,) + point.interferers[1:])
    point.validate()
    return point


class SweepSystem:
    """
    Manages a collection of sweep points.
    Points are independent jobs; results always come back in point order.
    """

    def __init__(self):
        """Initialize an empty sweep"""
        self.points = []
        self.next_id = 0
        self.max_workers = 1

    def createPoint(self, scenario, axis_value):
        """
        Add a point to the sweep

        Args:
            scenario (Scenario): Fully resolved scenario for this point
            axis_value (float): Value of the swept axis

        Returns:
            int: The ID of the new point
        """
        point_id = self.next_id
        self.next_id += 1
        self.points.append((point_id, axis_value, scenario))
        return point_id

    def buildFromAxis(self, base, axis, values):
        """
        Create one point per axis value

        Args:
            base (Scenario): Base scenario
            axis (str): Swept axis
            values (list): Axis values
        """
        values = list(values)
        if not values:
            raise ConfigError("values", "sweep needs at least one axis value")
        for index, value in enumerate(values):
            self.createPoint(apply_axis(base, axis, value, index), float(value))
        self.max_workers = base.max_workers

    def _runPoint(self, point):
        point_id, axis_value, scenario = point
        logger.debug("sweep point %d: %s", point_id, scenario.name)
        return axis_value, LinkEngine().runScenario(scenario)

    def runAll(self):
        """
        Run every point

        Returns:
            list: (axis_value, LinkRun) pairs in point order
        """
        if self.max_workers == 1:
            return [self._runPoint(point) for point in self.points]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(self._runPoint, self.points))
