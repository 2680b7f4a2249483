#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Experiment configuration testing module """

import os
from configparser import ConfigParser, ExtendedInterpolation

import pytest

from errors import ConfigError
from experiments.config import SENSITIVITY_GRID, ExperimentConfig

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


def _parse(text):
    parser = ConfigParser(interpolation=ExtendedInterpolation())
    parser.read_string(text)
    return ExperimentConfig.fromConfigParser(parser)

def test_defaults():
    config = ExperimentConfig()

    assert config.split.ratios == (0.6, 0.2, 0.2)
    assert config.backbone.family == "gcn-style"
    assert config.experiment.seeds == (0, 1, 2, 3, 4)
    assert config.experiment.sensitivityGrid == SENSITIVITY_GRID
    assert config.llm.client == "oracle"
    assert _parse("") == config

def test_parse():
    config = _parse("""
[backbone]
hiddenDim = 32
[interpreter]
useKeywords = false
encoderLearningRate = 1e-5
[experiment]
seeds = [3, 4]
outputDir = out
[llm]
cacheDir = ${experiment:outputDir}/cache
""")

    assert config.backbone.hiddenDim == 32
    assert config.interpreter.useKeywords is False
    assert config.interpreter.encoderLearningRate == 1e-5
    assert config.experiment.seeds == (3, 4)
    assert config.llm.cacheDir == "out/cache"
    assert config.backbone.layers == 2

def test_unknownEntries():
    with pytest.raises(ConfigError):
        _parse("[backbone]\nwidth = 3\n")
    with pytest.raises(ConfigError):
        _parse("[optimizer]\nlr = 3\n")

def test_invalidValues():
    with pytest.raises(ConfigError):
        _parse("[backbone]\nlayers = two\n")
    with pytest.raises(ConfigError):
        _parse("[interpreter]\nuseKeywords = maybe\n")
    with pytest.raises(ConfigError):
        _parse("[experiment]\nseeds = 3\n")
    with pytest.raises(ConfigError):
        _parse("[experiment]\nseeds = [1, \n")

def test_writeAndRead(tmp_path):
    path = str(tmp_path / "run.ini")
    config = ExperimentConfig().withOverrides(["dataset.subject=price $ product", "alignment.lambda3=0.1",
                                               "experiment.fractions=[0.5, 1.0]", "misc.precision=float64"])
    config.writeFile(path)

    assert ExperimentConfig.fromFile(path) == config

def test_overrides():
    config = ExperimentConfig().withOverrides(["alignment.lambda4 = 0.5", "experiment.variants=[\"no-keywords\"]"])

    assert config.alignment.lambda4 == 0.5
    assert config.experiment.variants == ("no-keywords",)
    with pytest.raises(ConfigError):
        ExperimentConfig().withOverrides(["alignment.lambda5=1"])
    with pytest.raises(ConfigError):
        ExperimentConfig().withOverrides(["lambda3=1"])
    with pytest.raises(ConfigError):
        ExperimentConfig().withOverrides(["nowhere.key=1"])
    with pytest.raises(ConfigError):
        ExperimentConfig().withValue("alignment", "lambda9", 1.0)

def test_toDict():
    record = ExperimentConfig().toDict()

    assert record["split"]["ratios"] == [0.6, 0.2, 0.2]
    assert record["alignment"] == {"lambda3": 1.0, "lambda4": 1.0}

def test_shippedConfigs():
    synthetic = ExperimentConfig.fromFile(os.path.join(CONFIGS, "synthetic.ini"))
    assert synthetic.llm.cacheDir == "output/synthetic/cache"
    assert synthetic.encoder.dim == 256

    cora = ExperimentConfig.fromFile(os.path.join(CONFIGS, "cora.ini"))
    assert cora.dataset.path == "datasets/cora"
    assert cora.llm.client == "live"
    assert cora.experiment.outputDir == "output/cora"

    with pytest.raises(ConfigError):
        ExperimentConfig.fromFile(os.path.join(CONFIGS, "missing.ini"))
