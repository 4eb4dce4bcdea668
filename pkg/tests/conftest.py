"""Shared fixtures: synthetic datasets and session-scoped trained artifacts."""

from __future__ import annotations

import struct
import time
from pathlib import Path

import numpy as np
import pytest

from kwspot.audio import ingest_dataset, load_wav, normalize_length
from kwspot.evaluation import TEST, TRAIN, split_dataset
from kwspot.features import MfccConfig, extract_mfcc, mel_filterbank
from kwspot.keywords import KEYWORDS
from kwspot.model import TrainConfig, default_architecture, save_model, train
from kwspot.quant import QuantRuntime, calibrate, export_quantized, quantize_model

from synth import write_keyword_dataset, write_synth10_dataset

# Table row data the splitter must reproduce: label -> (clip count, test ratio,
# expected integer train/test percentages).
REFERENCE_SPLIT_TABLE = {
    "blue": (116, 0.22, 78, 22),
    "cyan": (104, 0.21, 79, 21),
    "green": (104, 0.25, 75, 25),
    "led": (112, 0.23, 77, 23),
    "magenta": (104, 0.20, 80, 20),
    "off": (120, 0.23, 77, 23),
    "on": (129, 0.19, 81, 19),
    "red": (109, 0.22, 78, 22),
    "wake_up": (112, 0.20, 80, 20),
    "white": (120, 0.18, 82, 18),
    "yellow": (116, 0.19, 81, 19),
    "and": (142, 0.19, 81, 19),
    "blink": (141, 0.15, 85, 15),
    "cancel": (134, 0.20, 80, 20),
    "fast": (138, 0.19, 81, 19),
    "flash": (147, 0.19, 81, 19),
    "noise": (400, 0.20, 80, 20),
    "noise2": (504, 0.21, 79, 21),
    "plus": (149, 0.21, 79, 21),
    "quick": (146, 0.21, 79, 21),
    "slow": (122, 0.21, 79, 21),
    "toggle": (142, 0.20, 80, 20),
    "unknown": (377, 0.19, 81, 19),
}


def minimal_wav_bytes(n_samples: int = 4, rate: int = 16000) -> bytes:
    """Tiny valid mono PCM-16 RIFF file, built by hand (independent writer)."""
    data = b"\x00\x00" * n_samples
    fmt = struct.pack("<HHIIHH", 1, 1, rate, rate * 2, 2, 16)
    body = (b"WAVEfmt " + struct.pack("<I", len(fmt)) + fmt
            + b"data" + struct.pack("<I", len(data)) + data)
    return b"RIFF" + struct.pack("<I", len(body)) + body


@pytest.fixture(scope="session")
def reference_counts_root(tmp_path_factory) -> Path:
    """Directory-per-label tree whose per-label file counts match the
    reference split table (3,788 stub clips)."""
    root = tmp_path_factory.mktemp("refcounts")
    blob = minimal_wav_bytes()
    for label, (count, _, _, _) in REFERENCE_SPLIT_TABLE.items():
        sub = root / label
        sub.mkdir()
        for i in range(count):
            (sub / f"{label}_{i:04d}.wav").write_bytes(blob)
    return root


@pytest.fixture(scope="session")
def keyword_dataset_root(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("kwdata")
    write_keyword_dataset(root, KEYWORDS, clips_per_label=16, seed=0)
    return root


@pytest.fixture(scope="session")
def keyword_split(keyword_dataset_root):
    return split_dataset(ingest_dataset(keyword_dataset_root), ratio=0.20, seed=1)


def _features_for(split, split_name, config, bank):
    out = []
    for rel, label in split.clips(split_name):
        clip = normalize_length(load_wav(Path(split.root) / rel))
        out.append((extract_mfcc(clip, config, bank=bank), label))
    return out


@pytest.fixture(scope="session")
def keyword_features(keyword_split):
    config = MfccConfig()
    bank = mel_filterbank(config)
    return {
        TRAIN: _features_for(keyword_split, TRAIN, config, bank),
        TEST: _features_for(keyword_split, TEST, config, bank),
    }


@pytest.fixture(scope="session")
def keyword_model(keyword_split, keyword_features):
    labels = tuple(sorted(keyword_split.labels))
    model = default_architecture(n_classes=len(labels), class_labels=labels, seed=0)
    trained, _log = train(model, keyword_features[TRAIN],
                          TrainConfig(epochs=40, batch=32, lr=2e-3, seed=0))
    return trained


@pytest.fixture(scope="session")
def keyword_qmodel(keyword_model, keyword_features):
    ranges = calibrate(keyword_model, [m for m, _ in keyword_features[TRAIN]])
    return quantize_model(keyword_model, ranges)


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory, keyword_model, keyword_qmodel, keyword_split):
    """Float/quantized artifacts plus the split manifest, for CLI-level tests."""
    out = tmp_path_factory.mktemp("artifacts")
    save_model(keyword_model, out / "model.kws")
    export_quantized(keyword_qmodel, out / "model.kwsq")
    (out / "split.json").write_text(keyword_split.to_json())
    return out


@pytest.fixture(scope="session")
def synth10_trained(tmp_path_factory):
    """10-class tone/chirp corpus trained end to end, with wall time recorded."""
    root = tmp_path_factory.mktemp("synth10")
    start = time.monotonic()
    write_synth10_dataset(root, clips_per_label=40, seed=7)
    split = split_dataset(ingest_dataset(root), ratio=0.20, seed=2)
    config = MfccConfig()
    bank = mel_filterbank(config)
    train_ex = _features_for(split, TRAIN, config, bank)
    test_ex = _features_for(split, TEST, config, bank)
    labels = tuple(sorted(split.labels))
    model = default_architecture(n_classes=len(labels), class_labels=labels, seed=3)
    trained, log = train(model, train_ex,
                         TrainConfig(epochs=40, batch=32, lr=2e-3, seed=3))
    elapsed = time.monotonic() - start
    return {
        "root": root,
        "split": split,
        "model": trained,
        "log": log,
        "train_examples": train_ex,
        "test_examples": test_ex,
        "train_seconds": elapsed,
    }


@pytest.fixture(scope="session")
def synth10_quantized(synth10_trained):
    model = synth10_trained["model"]
    ranges = calibrate(model, [m for m, _ in synth10_trained["train_examples"]])
    qmodel = quantize_model(model, ranges)
    return {"qmodel": qmodel, "runtime": QuantRuntime(qmodel)}
