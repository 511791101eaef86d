from __future__ import annotations

# toy-scale defaults of `train-toy`; the full recipe stays in TrainConfig
TOY_IMAGES = 32
TOY_SIZE = 64
TOY_LR = 1e-3
TOY_BATCH_SIZE = 8
TOY_MAX_STEPS = 300

WEIGHTS_FILE = "weights.codw"
LOSS_FILE = "loss.csv"
SUMMARY_FILE = "summary.json"
DATA_DIR = "data"
