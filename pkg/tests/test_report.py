#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Run and sweep reports testing module """

import math
import os

import pytest

from experiments.report import (REPORT_JSON, REPORT_TXT, RunReport, SeedResult, SweepReport, comparable,
                                formatMeanStd, loadReport, meanStd)


def _run(accuracies, variant="full"):
    results = [SeedResult(seed=i, testAccuracy=a, valAccuracy=a, timings={"train": 1.5 + i})
               for i, a in enumerate(accuracies)]
    return RunReport("demo", variant, {"alignment": {"lambda3": 1.0}}, results,
                     {"tokens": {"promptCount": 3, "promptTokens": 40, "responseTokens": 9, "estimated": True},
                      "exposedNodes": 6, "trainNodes": 6})

def test_meanStd():
    mean, std = meanStd([0.8, 0.9])
    assert mean == pytest.approx(0.85)
    assert std == pytest.approx(0.05)

    assert meanStd([0.5, float("nan")]) == (0.5, 0.0)
    assert all(math.isnan(v) for v in meanStd([]))

def test_formatMeanStd():
    assert formatMeanStd(0.8237, 0.0187) == "0.8237±0.0187"
    assert formatMeanStd(float("nan"), float("nan")) == "n/a"

def test_runTable():
    table = _run([0.8, 0.9]).renderTable()

    assert "[demo] variant=full" in table
    assert "0.8500±0.0500" in table
    assert "prompts=3, promptTokens=40, responseTokens=9 (estimated)" in table
    assert "exposedNodes=6 of 6 train nodes" in table

def test_failedRun():
    report = _run([0.7])
    report.failure = {"stage": "train-student", "message": "diverged"}

    assert not report.complete
    assert "FAILED at stage train-student: diverged" in report.renderTable()

def test_runFiles(tmp_path):
    report = _run([0.8, float("nan")])
    report.writeFiles(str(tmp_path))

    assert os.path.exists(tmp_path / REPORT_JSON)
    assert os.path.exists(tmp_path / REPORT_TXT)
    loaded = loadReport(str(tmp_path))
    assert isinstance(loaded, RunReport)
    assert loaded.seeds == [0, 1]
    assert loaded.results[0].testAccuracy == 0.8
    assert math.isnan(loaded.results[1].testAccuracy)
    assert loaded.results[1].timings == {"train": 2.5}
    assert loaded.renderTable() == report.renderTable()

def test_comparableIgnoresTimings():
    a, b = _run([0.8, 0.9]), _run([0.8, 0.9])
    b.results[0].timings = {"train": 99.0}

    assert a.toRecord() != b.toRecord()
    assert comparable(a.toRecord()) == comparable(b.toRecord())
    assert "timings" not in a.results[0].toRecord()

def test_sweep(tmp_path):
    sweep = SweepReport("sensitivity", "lambda3", [(0.1, _run([0.7, 0.8])), (1.0, _run([0.8, 0.9]))],
                        baseline=_run([0.6], "vanilla-align"), logScale=True, skipped=[0.001])
    table = sweep.renderTable()

    assert "0.1\t0.7500±0.0500" in table
    assert "baseline (vanilla-align)\t0.6000±0.0000" in table
    assert "0.001\tskipped" in table

    sweep.writeFiles(str(tmp_path), plot=True)
    assert os.path.exists(tmp_path / "sensitivity.png")
    loaded = loadReport(str(tmp_path / REPORT_JSON))
    assert isinstance(loaded, SweepReport)
    assert [value for value, _ in loaded.rows] == [0.1, 1.0]
    assert loaded.baseline.variant == "vanilla-align"
    assert loaded.renderTable() == table

def test_missingReport(tmp_path):
    with pytest.raises(ValueError):
        loadReport(str(tmp_path))
