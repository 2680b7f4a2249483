#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Command line testing module """

import pytest

from experiments.config import ExperimentConfig
from experiments.report import RunReport, SeedResult
from main import VERBS, main, parseArguments


def test_parseArguments():
    args = parseArguments(["sweep", "--config", "configs/synthetic.ini", "--set", "alignment.lambda3=0.5",
                           "--set", "experiment.seeds=[0]", "--kind", "fractions", "--values", "0.1", "1"])

    assert args.verb == "sweep"
    assert args.config == "configs/synthetic.ini"
    assert args.overrides == ["alignment.lambda3=0.5", "experiment.seeds=[0]"]
    assert args.kind == "fractions"
    assert args.values == [0.1, 1.0]

    args = parseArguments(["ablate", "--variants", "no-keywords", "no-messages"])
    assert args.variant_list == ["no-keywords", "no-messages"]
    assert args.kind == "sensitivity"
    assert "pretrain-finetune" in VERBS

    with pytest.raises(SystemExit):
        parseArguments(["train-everything"])

def test_reportVerb(tmp_path, capsys):
    report = RunReport("demo", "full", {}, [SeedResult(seed=0, testAccuracy=0.75)])
    report.writeFiles(str(tmp_path))
    config = ExperimentConfig().withValue("experiment", "outputDir", str(tmp_path))

    assert main(config, parseArguments(["report"])) == 0
    assert "0.7500" in capsys.readouterr().out

    with pytest.raises(ValueError):
        main(config, parseArguments(["report", "--path", str(tmp_path / "missing")]))
