"""Local-Hamiltonian data classifiers trained by simulated quantum annealing."""

__version__ = "0.1.0"

from .anneal import DEFAULT_SCHEDULE, AnnealConfig, AnnealSchedule, run_anneal, trotter_evolve
from .evaluation import BenchmarkMetrics, EvaluationRecord, benchmark_metrics, evaluate_datum, evaluate_many
from .model import (
    InteractionGraph,
    LabeledDataset,
    TrainedClassifier,
    TrainingLayout,
    assemble_hamiltonian,
    build_training_layout,
    builtin_interaction_set,
    data_projector,
    preset_graph,
    simple_graph,
    training_hamiltonian,
)
from .oracle import exact_spectrum, overlap_scores
from .tensor import (
    BasisProjector,
    ControlledOperator,
    InvalidOperatorError,
    LocalOperator,
    QubitCapError,
    StateVector,
    WeightedTermList,
)
from .train import TrainingReport, train_exact_lp, train_one_shot, train_projected_oracle, train_serial

__all__ = [name for name in dir() if not name.startswith("_")]
