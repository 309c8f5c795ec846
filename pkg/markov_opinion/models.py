from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from markov_opinion import network, marginal
from markov_opinion.entities import Scenario, TrajectoryTable


class ModelVariant:
    """ Which social forces act: isolated drops both, attract drops repulsion only. """

    def __init__(self, name: str, attraction: bool, repulsion: bool):
        self._name = name
        self._attraction = attraction
        self._repulsion = repulsion

    @property
    def name(self):
        return self._name

    @property
    def attraction(self):
        return self._attraction

    @property
    def repulsion(self):
        return self._repulsion

    def __repr__(self):
        return 'ModelVariant(%s)' % self._name


class BaseMethod(ABC):
    """ Solution method producing per-agent marginals (agents x states). """

    def __init__(self, scenario: Scenario, model: ModelVariant):
        self._scenario = scenario
        self._model = model

    @property
    def scenario(self):
        return self._scenario

    @property
    def model(self):
        return self._model

    @abstractmethod
    def stationary(self) -> np.ndarray:
        pass

    @abstractmethod
    def transient(self, t_grid: Sequence[float]) -> TrajectoryTable:
        pass

    def _as_marginals(self, stacked: np.ndarray) -> np.ndarray:
        return stacked.reshape(self._scenario.agent_count, self._scenario.state_count)


class NetworkMethod(BaseMethod):
    def __init__(self, scenario: Scenario, model: ModelVariant, cap: int = None):
        super().__init__(scenario, model)
        self._cap = cap
        self._generator = None
        self._operator = None

    @property
    def generator(self) -> network.NetworkGenerator:
        if self._generator is None:
            self._generator = network.build_network_generator(self._scenario, self._cap,
                                                              attraction=self._model.attraction,
                                                              repulsion=self._model.repulsion)
        return self._generator

    @property
    def operator(self) -> network.MarginalizationOperator:
        if self._operator is None:
            self._operator = network.build_marginalization(self.generator.codec)
        return self._operator

    def joint_stationary(self) -> np.ndarray:
        return network.network_stationary(self.generator)

    def stationary(self) -> np.ndarray:
        return self._as_marginals(network.project_marginal(self.operator, self.joint_stationary()))

    def joint_transient(self, t_grid: Sequence[float]) -> TrajectoryTable:
        return network.network_transient(self.generator, network.product_distribution(self._scenario), t_grid,
                                         states=self._scenario.states.labels)

    def transient(self, t_grid: Sequence[float]) -> TrajectoryTable:
        return network.project_trajectory(self.operator, self.joint_transient(t_grid),
                                          self._scenario.agent_ids, self._scenario.states.labels)


class MarginalMethod(BaseMethod):
    def __init__(self, scenario: Scenario, model: ModelVariant, cap: int = None):
        # the marginal system grows linearly, the cap does not apply
        super().__init__(scenario, model)
        self._system = None

    @property
    def system(self) -> marginal.MarginalSystem:
        if self._system is None:
            self._system = marginal.assemble_marginal_system(self._scenario, attraction=self._model.attraction,
                                                             repulsion=self._model.repulsion)
        return self._system

    def stationary(self) -> np.ndarray:
        return self._as_marginals(marginal.marginal_stationary(self.system))

    def transient(self, t_grid: Sequence[float]) -> TrajectoryTable:
        return marginal.marginal_transient(self.system, marginal.stacked_initials(self._scenario), t_grid)


# Model access

_MODELS = {
    'isolated': ModelVariant('isolated', attraction=False, repulsion=False),
    'attract': ModelVariant('attract', attraction=True, repulsion=False),
    'full': ModelVariant('full', attraction=True, repulsion=True),
}

_METHODS = {
    'network': NetworkMethod,
    'marginal': MarginalMethod,
}


def get_model(name) -> ModelVariant:
    return _MODELS[name]


def get_method(name):
    return _METHODS[name]


def model_names():
    return list(_MODELS.keys())


def method_names():
    return list(_METHODS.keys())
