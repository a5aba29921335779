"""Discrete-time leaky integrate-and-fire networks and three learning rules."""

from lifnet.core import (
    ForwardRecord,
    LayerState,
    LifParams,
    NetworkConfig,
    SpikeTrain,
    Weights,
    decay_factor,
    forward,
    init_weights,
    lif_step,
    predict,
)
from lifnet.data import Dataset, SyntheticSpec, generate_synthetic, load_csv, stratified_split, write_csv
from lifnet.encoding import EncoderConfig, FeatureStats, normalize_features, poisson_encode, rate_encode
from lifnet.errors import ConfigError, CsvParseError, DomainError, InputError, LifnetError, StudyError

__version__ = "0.1.0"
