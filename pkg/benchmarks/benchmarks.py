import numpy as np

from sictomo.circuit import canonical_sic_povm, povm_from_params, OPTIMAL_PARAMS
from sictomo.experiment import ExperimentConfig, run_experiment
from sictomo.fisher import QuadratureSpec, qttf
from sictomo.optim import optimize_circuit, NmOptions
from sictomo.tomo import measurement_matrix, rpr_estimate


class Qttf:
    params = [16, 32, 64]
    param_names = ['nodes']

    def setup(self, nodes):
        self.t = measurement_matrix(povm_from_params(OPTIMAL_PARAMS))
        self.quadrature = QuadratureSpec(nodes, nodes)
        # compile the kernels outside of the timing
        qttf(self.t, QuadratureSpec(4, 4))

    def time_qttf(self, nodes):
        qttf(self.t, self.quadrature)


class Rpr:

    def setup(self):
        self.t = measurement_matrix(canonical_sic_povm())
        rng = np.random.default_rng(0)
        self.frequencies = [rng.multinomial(1024, [0.6, 0.2, 0.1, 0.1])/1024 for _ in range(50)]
        rpr_estimate(self.t, self.frequencies[0])

    def time_rpr(self):
        for p_hat in self.frequencies:
            rpr_estimate(self.t, p_hat)


class Experiment:
    timeout = 300

    def setup(self):
        self.config = ExperimentConfig(shots=1024, repetitions=5, seed=0)

    def time_serial(self):
        run_experiment(self.config, parallel=False)

    def time_parallel(self):
        run_experiment(self.config, parallel=True)


class Optimize:
    timeout = 600

    def time_single_restart(self):
        optimize_circuit(restarts=1, seed=0, opts=NmOptions(max_evals=500))
