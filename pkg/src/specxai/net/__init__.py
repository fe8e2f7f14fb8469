from .adam import AdamConfig, adam_step, init_adam_state
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .model import Network, NetworkConfig
from .train import TrainConfig, train, train_arrays

__all__ = [
    "AdamConfig",
    "adam_step",
    "init_adam_state",
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "Network",
    "NetworkConfig",
    "TrainConfig",
    "train",
    "train_arrays",
]
