"""Command-line entry points: prepare, train, quantize, eval, run, serve."""

from __future__ import annotations

import functools
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import audio as audio_mod
from . import evaluation as eval_mod
from .errors import BadAudioFormat, KwspotError
from .features import extract_mfcc, mel_filterbank
from .model import TrainConfig, default_architecture, forward, load_model, save_model, train
from .pipeline import PipelineConfig, StreamPipeline
from .quant import (
    DEFAULT_ARENA_BUDGET,
    QuantRuntime,
    calibrate,
    export_quantized,
    load_quantized,
    quantize_model,
    size_report,
)


@dataclass
class RunConfig:
    model_path: str = ""
    dataset_root: str = ""
    hop_ms: int = 250
    threshold: float = 0.60
    timeout_ms: int = 10000
    budget_bytes: int = DEFAULT_ARENA_BUDGET
    seed: int = 0
    port: int = 7878

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        if not 50 <= self.hop_ms <= 1000:
            raise ValueError("hop_ms must be in [50, 1000]")


def resolve_seed(cli_seed: int) -> int:
    """KWSPOT_SEED overrides whatever the flag said."""
    env = os.environ.get("KWSPOT_SEED")
    return int(env) if env is not None else cli_seed


def friendly_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except KwspotError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
def main():
    """Keyword spotting pipeline: dataset prep, training, quantization, streaming."""


@main.command()
@click.option("--dataset-root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--ratio", default=0.20, show_default=True, type=float,
              help="Test fraction per label.")
@click.option("--out", default="split.json", show_default=True, type=click.Path())
@friendly_errors
def prepare(dataset_root, seed, ratio, out):
    """Scan a directory-per-label dataset and write a train/test split manifest."""
    seed = resolve_seed(seed)
    manifest = audio_mod.ingest_dataset(dataset_root)
    split = eval_mod.split_dataset(manifest, ratio=ratio, seed=seed)
    Path(out).write_text(split.to_json())
    for label in sorted(split.labels):
        parts = split.labels[label]
        click.echo(f"{label}: {len(parts['train'])} train / {len(parts['test'])} test")
    if manifest.unreadable:
        click.echo(f"skipped {len(manifest.unreadable)} unreadable file(s)", err=True)
    click.echo(f"wrote {out}")


def _load_split(manifest_path: str, dataset_root: str | None):
    return eval_mod.SplitManifest.from_json(Path(manifest_path).read_text(),
                                            root=dataset_root)


def _clip_features(split, split_name, mfcc_config, limit=None):
    bank = mel_filterbank(mfcc_config)
    out = []
    for rel_path, label in split.clips(split_name):
        clip = audio_mod.load_wav(Path(split.root) / rel_path)
        clip = audio_mod.normalize_length(clip)
        out.append((extract_mfcc(clip, mfcc_config, bank=bank), label))
        if limit is not None and len(out) >= limit:
            break
    return out


@main.command(name="train")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--dataset-root", default=None, type=click.Path(file_okay=False))
@click.option("--out", default="model.kws", show_default=True, type=click.Path())
@click.option("--epochs", default=100, show_default=True, type=int)
@click.option("--batch", default=32, show_default=True, type=int)
@click.option("--lr", default=1e-3, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@friendly_errors
def train_cmd(manifest_path, dataset_root, out, epochs, batch, lr, seed):
    """Train the float model on the manifest's training split."""
    seed = resolve_seed(seed)
    split = _load_split(manifest_path, dataset_root)
    labels = tuple(sorted(split.labels))
    examples = _clip_features(split, eval_mod.TRAIN, _default_mfcc())
    model = default_architecture(n_classes=len(labels), class_labels=labels, seed=seed)
    trained, log = train(model, examples, TrainConfig(epochs=epochs, batch=batch,
                                                      lr=lr, seed=seed))
    for entry in log:
        click.echo(f"epoch={entry['epoch']} loss={entry['loss']:.6f} "
                   f"accuracy={entry['accuracy']:.4f}")
    save_model(trained, out)
    click.echo(f"wrote {out}")


def _default_mfcc():
    from .features import MfccConfig
    return MfccConfig()


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True),
              help="Calibration inputs come from this manifest's training split.")
@click.option("--dataset-root", default=None, type=click.Path(file_okay=False))
@click.option("--out", default="model.kwsq", show_default=True, type=click.Path())
@click.option("--budget-bytes", default=DEFAULT_ARENA_BUDGET, show_default=True, type=int)
@click.option("--max-calibration", default=256, show_default=True, type=int)
@friendly_errors
def quantize(model_path, manifest_path, dataset_root, out, budget_bytes, max_calibration):
    """Post-training int8 quantization with an arena/size report."""
    model = load_model(model_path)
    split = _load_split(manifest_path, dataset_root)
    rep = [m for m, _ in _clip_features(split, eval_mod.TRAIN, model.mfcc_config,
                                        limit=max_calibration)]
    ranges = calibrate(model, rep)
    qmodel = quantize_model(model, ranges)
    report = size_report(qmodel, budget_bytes)
    file_bytes = export_quantized(qmodel, out)
    for entry in report["per_layer"]:
        click.echo(f"{entry['op']} {entry['kind']}: {entry['weight_bytes']} weight bytes")
    click.echo(f"weights: {report['weight_bytes']} bytes")
    click.echo(f"arena: {report['arena_bytes']} bytes")
    click.echo(f"total (weights + arena): {report['total_bytes']} bytes "
               f"(budget {report['budget_bytes']})")
    click.echo(f"wrote {out} ({file_bytes} bytes)")


@main.command(name="eval")
@click.option("--model", "model_path", default=None, type=click.Path(exists=True))
@click.option("--qmodel", "qmodel_path", default=None, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--dataset-root", default=None, type=click.Path(file_okay=False))
@click.option("--out-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@friendly_errors
def eval_cmd(model_path, qmodel_path, manifest_path, dataset_root, out_dir):
    """Evaluate float and/or quantized artifacts on the test split."""
    if model_path is None and qmodel_path is None:
        raise click.UsageError("need --model and/or --qmodel")
    split = _load_split(manifest_path, dataset_root)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    argmax = {}
    for tag, path in (("float", model_path), ("quant", qmodel_path)):
        if path is None:
            continue
        if tag == "float":
            model = load_model(path)
            mfcc_config = model.mfcc_config
            predict = lambda feats: forward(model, feats).top_label  # noqa: E731
            labels = model.class_labels
        else:
            qmodel = load_quantized(path)
            mfcc_config = qmodel.mfcc_config
            runtime = QuantRuntime(qmodel)
            predict = lambda feats: runtime.run(feats).top_label  # noqa: E731
            labels = qmodel.class_labels
        clips = _clip_features(split, eval_mod.TEST, mfcc_config)
        cm = eval_mod.confusion(predict, clips, labels)
        report = eval_mod.metrics(cm)
        (out_dir / f"report_{tag}.txt").write_text(eval_mod.table_report(report))
        (out_dir / f"report_{tag}.csv").write_text(eval_mod.csv_report(report))
        (out_dir / f"confusion_{tag}.csv").write_text(cm.to_csv())
        argmax[tag] = [predict(feats) for feats, _ in clips]
        click.echo(f"{tag}: accuracy={report.accuracy:.4f} "
                   f"macro_f1={report.macro_f1:.4f}")
    if len(argmax) == 2:
        agree = np.mean([a == b for a, b in zip(argmax["float"], argmax["quant"])])
        click.echo(f"float/quant argmax agreement: {100.0 * agree:.2f}%")
    click.echo(f"reports written to {out_dir}")


def _pcm_chunks_from_stdin(chunk_bytes: int = 4096):
    carry = b""
    stream = sys.stdin.buffer
    while True:
        data = stream.read(chunk_bytes)
        if not data:
            break
        data = carry + data
        usable = len(data) - (len(data) % 2)
        carry = data[usable:]
        if usable:
            yield np.frombuffer(data[:usable], dtype="<i2")
    if carry:
        raise BadAudioFormat("stdin PCM stream ended on a half sample")


def _pcm_chunks_from_wav(path, chunk_samples: int = 1024):
    clip = audio_mod.load_wav(path)
    if clip.sample_rate_hz != audio_mod.CANONICAL_RATE:
        raise BadAudioFormat(
            f"expected {audio_mod.CANONICAL_RATE} Hz, got {clip.sample_rate_hz}"
        )
    for start in range(0, len(clip.samples), chunk_samples):
        yield clip.samples[start:start + chunk_samples]


@main.command(name="run")
@click.option("--qmodel", "qmodel_path", required=True, type=click.Path(exists=True))
@click.option("--wav", "wav_path", default=None, type=click.Path(exists=True))
@click.option("--stdin", "use_stdin", is_flag=True, help="Read raw PCM-16 from stdin.")
@click.option("--hop-ms", default=250, show_default=True, type=int)
@click.option("--threshold", default=0.60, show_default=True, type=float)
@click.option("--timeout-ms", default=10000, show_default=True, type=int)
@friendly_errors
def run_cmd(qmodel_path, wav_path, use_stdin, hop_ms, threshold, timeout_ms):
    """Stream a WAV file (or stdin PCM) through the detector; JSON-lines out."""
    if (wav_path is None) == (not use_stdin):
        raise click.UsageError("choose exactly one of --wav or --stdin")
    try:
        config = RunConfig(model_path=qmodel_path, hop_ms=hop_ms,
                           threshold=threshold, timeout_ms=timeout_ms)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    qmodel = load_quantized(qmodel_path)
    pipeline = StreamPipeline(qmodel, PipelineConfig(hop_ms=config.hop_ms,
                                                     threshold=config.threshold,
                                                     timeout_ms=config.timeout_ms))
    out = click.get_text_stream("stdout")
    out.write(json.dumps(pipeline.initial_event(), sort_keys=True) + "\n")
    chunks = _pcm_chunks_from_stdin() if use_stdin else _pcm_chunks_from_wav(wav_path)
    for chunk in chunks:
        for event in pipeline.feed(chunk):
            out.write(json.dumps(event, sort_keys=True) + "\n")
    out.flush()


@main.command()
@click.option("--qmodel", "qmodel_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=7878, show_default=True, type=int)
@click.option("--hop-ms", default=250, show_default=True, type=int)
@click.option("--threshold", default=0.60, show_default=True, type=float)
@click.option("--timeout-ms", default=10000, show_default=True, type=int)
@friendly_errors
def serve(qmodel_path, port, hop_ms, threshold, timeout_ms):
    """Host the local demo service (WebSocket, one client at a time)."""
    from .service import serve_demo

    try:
        run_config = RunConfig(model_path=qmodel_path, hop_ms=hop_ms,
                               threshold=threshold, timeout_ms=timeout_ms, port=port)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    qmodel = load_quantized(qmodel_path)
    config = PipelineConfig(hop_ms=run_config.hop_ms, threshold=run_config.threshold,
                            timeout_ms=run_config.timeout_ms)
    click.echo(f"listening on ws://127.0.0.1:{run_config.port}", err=True)
    serve_demo(qmodel, config, port=run_config.port)


if __name__ == "__main__":
    main()
