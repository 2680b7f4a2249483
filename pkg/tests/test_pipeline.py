#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Pipeline, ablation and sweep testing module """

import os

import pytest

from errors import ConfigError
from experiments.config import ExperimentConfig
from experiments.pipeline import (ABLATION_VARIANTS, FULL, INTERPRETER_CHECKPOINT, RATIONALES_FILE, STUDENT_CHECKPOINT,
                                  WEIGHTS_FILE, applyVariant, buildClient, evaluateCheckpoints, loadDataset,
                                  nestedSubsets, prepare, runAblation, runDataEfficiency, runPipeline,
                                  runPretrainFinetune, runSensitivity)
from experiments.report import REPORT_JSON, comparable, loadReport
from rationale.clients import CacheOnlyClient
from readers.SyntheticGraphReader import generateSynthetic
from structures.NodeRationale import FAILED, loadRationales, saveRationales

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


def _config(tmp_path, name="run", cache="cache"):
    return ExperimentConfig().withOverrides([
        "synthetic.classCount=2", "synthetic.nodesPerClass=10", "synthetic.intraClassEdgeProb=0.3",
        "synthetic.interClassEdgeProb=0.02", "synthetic.seed=3",
        "backbone.hiddenDim=8", "encoder.dim=64",
        "llm.model=oracle-test", f"llm.cacheDir={tmp_path / cache}",
        "annotation.workers=1",
        "interpreter.epochs=5", "interpreter.learningRate=0.05", "interpreter.encoderEpochs=0",
        "student.epochs=5", "student.learningRate=0.05", "student.encoderEpochs=0",
        "experiment.seeds=[0, 1]", f"experiment.outputDir={tmp_path / name}", "experiment.name=tiny",
        "experiment.plots=false", "misc.precision=float64",
    ])

def test_applyVariant():
    config = ExperimentConfig()

    assert applyVariant(config, FULL) == config
    assert applyVariant(config, "no-soft-labels").interpreter.lambda1 == 0.0
    assert applyVariant(config, "no-keywords").interpreter.useKeywords is False
    assert applyVariant(config, "no-key-edges").interpreter.useKeyEdges is False
    assert applyVariant(config, "no-messages").interpreter.useMessages is False
    vanilla = applyVariant(config, "vanilla-align")
    assert (vanilla.alignment.lambda3, vanilla.alignment.lambda4) == (0.0, 0.0)
    assert applyVariant(config, "no-semantic").alignment == config.alignment.__class__(lambda3=0.0, lambda4=1.0)
    assert applyVariant(config, "no-structural").alignment.lambda4 == 0.0
    labelsOnly = applyVariant(config, "labels-only")
    assert (labelsOnly.student.lambda2, labelsOnly.alignment.lambda3, labelsOnly.alignment.lambda4) == (0.0, 0.0, 0.0)
    # each variant changes exactly one mechanism of the full config
    for variant in ABLATION_VARIANTS:
        assert applyVariant(config, variant) != config
    with pytest.raises(ConfigError):
        applyVariant(config, "no-everything")

def test_nestedSubsets():
    nodes = list(range(100, 200))
    subsets, skipped = nestedSubsets(nodes, [1.0, 0.1, 0.5, 0.01], seed=4, minimum=3)

    assert skipped == [0.01]
    assert [f for f, _ in subsets] == [0.1, 0.5, 1.0]
    assert [len(s) for _, s in subsets] == [10, 50, 100]
    for (_, small), (_, large) in zip(subsets, subsets[1:]):
        assert set(small) <= set(large)
    assert nestedSubsets(nodes, [0.1], seed=4, minimum=3)[0] == subsets[:1]

def test_loadDataset(tmp_path):
    graph, spec = loadDataset(_config(tmp_path))

    assert spec is not None
    assert graph.nodeCount == 20
    assert graph.texts == generateSynthetic(spec).texts

def test_buildClient(tmp_path):
    config = _config(tmp_path)
    graph, spec = loadDataset(config)

    assert buildClient(config, graph, spec).kind == "oracle"
    assert buildClient(config.withValue("llm", "client", "cache-only"), graph, spec).modelName == "oracle-test"
    with pytest.raises(ConfigError):
        buildClient(config, graph, None)
    with pytest.raises(ConfigError):
        buildClient(config.withValue("llm", "client", "psychic"), graph, spec)

def test_prepare(tmp_path):
    data = prepare(_config(tmp_path))

    assert sorted(data.rationales) == list(data.split.trainIds)
    assert data.annotation["exposureViolations"] == []
    assert data.annotation["exposedNodes"] <= data.annotation["trainNodes"] == 12
    assert data.annotation["statusCounts"][FAILED] == 0
    assert sum(data.annotation["statusCounts"].values()) == 12
    assert data.annotation["tokens"]["promptCount"] > 0
    path = str(tmp_path / RATIONALES_FILE)
    saveRationales(data.rationales, path)
    assert loadRationales(path) == data.rationales

    # a warm cache answers every prompt again without the oracle
    replay = prepare(_config(tmp_path, "replay"), CacheOnlyClient("oracle-test"))
    assert replay.rationales == data.rationales
    assert replay.client.callCount == 0

def test_sweepValidation(tmp_path):
    config = _config(tmp_path)

    with pytest.raises(ConfigError):
        runDataEfficiency(config, [0.5, 1.5])
    with pytest.raises(ConfigError):
        runDataEfficiency(config, [0.0])
    with pytest.raises(ConfigError):
        runSensitivity(config, "lambda7", [1.0])
    with pytest.raises(ConfigError):
        runSensitivity(config, "lambda3", [-1.0])
    with pytest.raises(ConfigError):
        runAblation(config, ["no-brakes"])

@pytest.mark.slow
def test_runPipeline(tmp_path):
    config = _config(tmp_path)
    report = runPipeline(config)

    assert report.complete
    assert report.seeds == [0, 1]
    for result in report.results:
        assert 0.0 <= result.testAccuracy <= 1.0
        assert result.inferenceCalls == 0
        assert len(result.curves["interpreter"]) == 5
        assert len(result.curves["student"]) == 5
        assert len(result.weightsFingerprint) == 64
    for seed in (0, 1):
        directory = tmp_path / "run" / f"seed-{seed}"
        for name in (INTERPRETER_CHECKPOINT, STUDENT_CHECKPOINT, WEIGHTS_FILE):
            assert os.path.exists(directory / name)
    assert os.path.exists(tmp_path / "run" / REPORT_JSON)
    assert comparable(loadReport(str(tmp_path / "run")).toRecord()) == comparable(report.toRecord())

    # stored checkpoints evaluate to the same accuracies
    evaluated = evaluateCheckpoints(config, prepare(config, CacheOnlyClient("oracle-test")))
    assert [r.testAccuracy for r in evaluated.results] == [r.testAccuracy for r in report.results]
    assert [r.weightsFingerprint for r in evaluated.results] == [r.weightsFingerprint for r in report.results]

@pytest.mark.slow
def test_replayIsDeterministic(tmp_path):
    first = runPipeline(_config(tmp_path, "first"))
    second = runPipeline(_config(tmp_path, "second"), CacheOnlyClient("oracle-test"))

    assert second.complete
    assert second.annotation["client"] == "cache-only"
    a, b = comparable(first.toRecord()), comparable(second.toRecord())
    assert a["results"] == b["results"]
    assert a["summary"] == b["summary"]
    assert a["annotation"]["tokens"] == b["annotation"]["tokens"]

@pytest.mark.slow
def test_coldCacheFailsAtAnnotation(tmp_path):
    report = runPipeline(_config(tmp_path, cache="empty"), CacheOnlyClient("oracle-test"))

    assert not report.complete
    assert report.failure["stage"] == "annotate"
    assert report.results == []
    assert loadReport(str(tmp_path / "run")).failure["stage"] == "annotate"

@pytest.mark.slow
def test_ablationAndSweeps(tmp_path):
    config = _config(tmp_path).withValue("experiment", "seeds", (0,))

    ablation = runAblation(config, ["no-keywords", "vanilla-align"])
    assert [v for v, _ in ablation.rows] == [FULL, "no-keywords", "vanilla-align"]
    assert all(r.complete for _, r in ablation.rows)
    assert os.path.exists(tmp_path / "run" / "no-keywords" / REPORT_JSON)

    efficiency = runDataEfficiency(config, [0.05, 0.5, 1.0])
    assert efficiency.skipped == [0.05]
    assert [v for v, _ in efficiency.rows] == [0.5, 1.0]
    assert efficiency.rows[0][1].annotation["supervisedNodes"] < efficiency.rows[1][1].annotation["supervisedNodes"]

    sensitivity = runSensitivity(config, "lambda4", [0.1, 10.0])
    assert [v for v, _ in sensitivity.rows] == [0.1, 10.0]
    assert sensitivity.rows[1][1].config["alignment"]["lambda4"] == 10.0
    assert sensitivity.baseline.variant == "vanilla-align"
    assert loadReport(str(tmp_path / "run")).name == "sensitivity"

@pytest.mark.slow
def test_pretrainFinetune(tmp_path):
    config = _config(tmp_path).withOverrides(["experiment.seeds=[0]", "experiment.finetuneLabelFraction=0.5"])
    sweep = runPretrainFinetune(config)

    assert [v for v, _ in sweep.rows] == ["distilled", "supervised", "pretrained+supervised"]
    for _, report in sweep.rows:
        assert report.complete
        assert report.seeds == [0]
        assert report.annotation["goldLabelledNodes"] == 6
        assert 0.0 <= report.results[0].testAccuracy <= 1.0
    assert loadReport(str(tmp_path / "run")).name == "pretrain-finetune"

@pytest.mark.slow
def test_oracleAblationOrdering(tmp_path):
    """
    On the synthetic graph with oracle rationales, alignment helps and so does matching the interpreter.
    """
    config = ExperimentConfig.fromFile(os.path.join(CONFIGS, "synthetic.ini")).withOverrides([
        f"experiment.outputDir={tmp_path / 'ablation'}", f"llm.cacheDir={tmp_path / 'cache'}"])
    sweep = runAblation(config, ["vanilla-align", "labels-only"])
    accuracy = {variant: report.summary()["testAccuracy"][0] for variant, report in sweep.rows}

    assert all(report.complete and len(report.seeds) == 5 for _, report in sweep.rows)
    assert accuracy[FULL] >= accuracy["vanilla-align"] >= accuracy["labels-only"]
