"""Keyword spotting pipeline: MFCC features, 1D CNN, int8 inference, command FSM."""

from .audio import AudioClip, DatasetManifest, StreamWindow, ingest_dataset, load_wav, normalize_length, save_wav, stream_windows
from .features import FeatureStats, MfccConfig, MfccMatrix, extract_mfcc, feature_scale, mel_filterbank
from .interpreter import CommandEvent, InterpreterState, LedState, StepConfig, run_sequence, step
from .model import FloatModel, LayerSpec, Prediction, TrainConfig, default_architecture, forward, gradient_check, load_model, save_model, train
from .quant import QuantizedModel, QuantParams, QuantRuntime, calibrate, export_quantized, load_quantized, plan_arena, quantize_model, quantized_forward

__version__ = "0.1.0"
