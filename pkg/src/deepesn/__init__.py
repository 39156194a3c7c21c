"""Deep echo state networks and layer-wise richness of their dynamics."""
from .data import (NarmaParams, TimeSeriesTask, generate_narma10, load_laser,
                   next_step_task, split)
from .experiment import (ExperimentConfig, ResultTable, aggregate, emit_csv,
                         run_prediction_sweep, run_richness_sweep)
from .measures import (EntropyParams, RichnessReport, average_state_entropy,
                       condition_number, instantaneous_entropy, richness,
                       uncoupled_dynamics)
from .readout import (LmsParams, LossTrace, Readout, mse, predict, train_direct,
                      train_lms)
from .reservoir import (DeepReservoir, LayerStates, ReservoirConfig,
                        init_reservoir, run, step)

__version__ = "0.1.0"
