"""Skin segmentation by color-histogram retrieval over image windows."""

from .detection import DetectionMask, WindowDecision, classify_window, classify_window_multi, detect
from .evaluation import ConfusionCounts, EvaluationReport, GroundTruth, evaluate
from .features import FeatureVector, extract_features
from .imaging import Image, decode_ppm, encode_pgm, encode_ppm, tile
from .metrics import Metric, distance
from .model import SkinClassModel, SkinModelSet, TrainConfig, load_model, save_model, train_class, train_multi
from .synth import Patch, SynthSpec, generate

__version__ = "0.1.0"
