"""Stigmergic ant-colony clustering of streaming feature-vector data on a
toroidal pheromone lattice, with a built-in k-NN evaluation harness."""

__version__ = "0.1.0"

from .behavior import (
    NeighborhoodAssessment,
    ThresholdParams,
    assess_neighborhood,
    count_factor,
    drop_factor,
    drop_probability,
    pick_factor,
    pick_probability,
    response_threshold,
)
from .colony import (
    Ant,
    Colony,
    MovementParams,
    colony_step,
    move_ant,
    pheromone_weight,
    transition_distribution,
    turn_weight,
)
from .config import ConfigError, RunConfig, load_config
from .datastream import (
    FeatureSpace,
    Item,
    StreamSchedule,
    SyntheticSpec,
    build_schedule,
    generate_synthetic,
    ingest_csv,
    normalized_distance,
    release_due,
)
from .engine import World
from .evaluation import (
    ClassificationReport,
    EntropyTrace,
    Snapshot,
    default_checkpoints,
    knn_rate,
    spatial_entropy,
    toroidal_grid_distance,
)
from .habitat import CellOccupied, Grid, PheromoneField, Position, wrap
from .rng import Rng
from .runner import CompareResult, RunResult, compare_runs, run_experiment
