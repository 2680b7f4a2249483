#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Run and sweep reports: structured records, text tables and plots """

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"

# metrics shown in tables, in order
METRICS = ("testAccuracy", "valAccuracy", "interpreterGoldAccuracy", "interpreterPseudoAccuracy")


def meanStd(values: Sequence[float]) -> Tuple[float, float]:
    """
    Mean and population standard deviation (ddof=0) of the finite values.

    Parameters:
        values: Sequence[float]

    Returns:
        Tuple (mean, std), both nan when no value is finite.
    """
    finite = np.array([v for v in values if v is not None and math.isfinite(v)], dtype=np.float64)
    if finite.size == 0:
        return float("nan"), float("nan")
    return float(finite.mean()), float(finite.std(ddof=0))


def formatMeanStd(mean: float, std: float, digits: int=4) -> str:
    if math.isnan(mean):
        return "n/a"
    return f"{mean:.{digits}f}±{std:.{digits}f}"


@dataclass
class SeedResult:
    """
    Outcome of one seed of a pipeline run.

    Attributes:
        seed: int
        testAccuracy: float
            Student accuracy on test nodes of the full graph.
        valAccuracy: float
            Student accuracy on validation nodes of the full graph.
        interpreterGoldAccuracy: float
            Interpreter accuracy on rationale nodes against gold labels.
        interpreterPseudoAccuracy: float
            Interpreter accuracy on rationale nodes against pseudo-labels.
        weightsFingerprint: str
            Digest of the alignment weight table, empty when no table was built.
        curves: Dict[str, List[float]]
            Per-epoch total loss of each training stage.
        inferenceCalls: int
            Client calls issued while evaluating the student, always 0.
        timings: Dict[str, float]
            Wall-clock seconds per phase, excluded from comparisons.
    """
    seed: int
    testAccuracy: float = float("nan")
    valAccuracy: float = float("nan")
    interpreterGoldAccuracy: float = float("nan")
    interpreterPseudoAccuracy: float = float("nan")
    weightsFingerprint: str = ""
    curves: Dict[str, List[float]] = field(default_factory=dict)
    inferenceCalls: int = 0
    timings: Dict[str, float] = field(default_factory=dict)

    def toRecord(self) -> Dict[str, Any]:
        record = asdict(self)
        record.pop("timings")
        return record

    @staticmethod
    def fromRecord(record: Dict[str, Any], timings: Optional[Dict[str, float]]=None) -> 'SeedResult':
        return SeedResult(**{k: v for k, v in record.items() if k != "timings"}, timings=dict(timings or {}))


@dataclass
class RunReport:
    """
    Self-contained report of a pipeline run over a list of seeds.

    Attributes:
        name: str
        variant: str
            'full' or the ablation variant.
        config: Dict[str, Dict[str, Any]]
            Snapshot of the configuration.
        results: List[SeedResult]
        annotation: Dict[str, Any]
            Token accounting, rationale status counts and the exposure audit.
        failure: Optional[Dict[str, str]]
            Stage and message when the run stopped early.
    """
    name: str
    variant: str
    config: Dict[str, Dict[str, Any]]
    results: List[SeedResult] = field(default_factory=list)
    annotation: Dict[str, Any] = field(default_factory=dict)
    failure: Optional[Dict[str, str]] = None

    @property
    def complete(self) -> bool:
        return self.failure is None

    @property
    def seeds(self) -> List[int]:
        return [r.seed for r in self.results]

    def summary(self) -> Dict[str, Tuple[float, float]]:
        return {metric: meanStd([getattr(r, metric) for r in self.results]) for metric in METRICS}

    def toRecord(self) -> Dict[str, Any]:
        """
        Machine-readable form; wall-clock timings live under their own key.
        """
        return {
            "type": "run",
            "name": self.name,
            "variant": self.variant,
            "config": self.config,
            "results": [r.toRecord() for r in self.results],
            "summary": {k: list(v) for k, v in self.summary().items()},
            "annotation": self.annotation,
            "failure": self.failure,
            "timings": {str(r.seed): r.timings for r in self.results},
        }

    @staticmethod
    def fromRecord(record: Dict[str, Any]) -> 'RunReport':
        timings = record.get("timings", {})
        results = [SeedResult.fromRecord(r, timings.get(str(r["seed"]))) for r in record.get("results", [])]
        return RunReport(record["name"], record["variant"], record.get("config", {}), results,
                         record.get("annotation", {}), record.get("failure"))

    def renderTable(self) -> str:
        lines = [f"[{self.name}] variant={self.variant}"]
        if self.failure is not None:
            lines.append(f"FAILED at stage {self.failure['stage']}: {self.failure['message']}")
        header = "seed\t" + "\t".join(METRICS)
        lines.append(header)
        for r in self.results:
            lines.append(f"{r.seed}\t" + "\t".join(_cell(getattr(r, m)) for m in METRICS))
        summary = self.summary()
        lines.append("mean±std\t" + "\t".join(formatMeanStd(*summary[m]) for m in METRICS))
        tokens = self.annotation.get("tokens")
        if tokens:
            flag = " (estimated)" if tokens.get("estimated") else ""
            lines.append(f"prompts={tokens.get('promptCount', 0)}, promptTokens={tokens.get('promptTokens', 0)}, "
                         f"responseTokens={tokens.get('responseTokens', 0)}{flag}")
        if "exposedNodes" in self.annotation:
            lines.append(f"exposedNodes={self.annotation['exposedNodes']} of {self.annotation.get('trainNodes', '?')} train nodes")
        return "\n".join(lines) + "\n"

    def writeFiles(self, directory: str) -> None:
        _writeFiles(directory, self.toRecord(), self.renderTable())


@dataclass
class SweepReport:
    """
    Accuracy against one swept value, each row a full run.

    Attributes:
        name: str
            'ablation', 'data-efficiency', 'sensitivity' or 'pretrain-finetune'.
        parameter: str
            Swept quantity ('variant', 'fraction', 'lambda3', 'setting', ...).
        rows: List[Tuple[Any, RunReport]]
        baseline: Optional[RunReport]
            Reference run drawn as a horizontal line.
        logScale: bool
            Whether plots use a logarithmic x axis.
    """
    name: str
    parameter: str
    rows: List[Tuple[Any, RunReport]] = field(default_factory=list)
    baseline: Optional[RunReport] = None
    logScale: bool = False
    skipped: List[Any] = field(default_factory=list)

    def toRecord(self) -> Dict[str, Any]:
        return {
            "type": "sweep",
            "name": self.name,
            "parameter": self.parameter,
            "logScale": self.logScale,
            "skipped": list(self.skipped),
            "rows": [{"value": value, "report": report.toRecord()} for value, report in self.rows],
            "baseline": self.baseline.toRecord() if self.baseline is not None else None,
        }

    @staticmethod
    def fromRecord(record: Dict[str, Any]) -> 'SweepReport':
        baseline = RunReport.fromRecord(record["baseline"]) if record.get("baseline") else None
        rows = [(row["value"], RunReport.fromRecord(row["report"])) for row in record.get("rows", [])]
        return SweepReport(record["name"], record["parameter"], rows, baseline, bool(record.get("logScale", False)),
                           list(record.get("skipped", [])))

    def renderTable(self) -> str:
        lines = [f"[{self.name}]", f"{self.parameter}\ttestAccuracy\tinterpreterGoldAccuracy\tstatus"]
        for value, report in self.rows:
            summary = report.summary()
            status = "ok" if report.complete else f"failed ({report.failure['stage']})"  # type: ignore[index]
            lines.append(f"{value}\t{formatMeanStd(*summary['testAccuracy'])}\t"
                         f"{formatMeanStd(*summary['interpreterGoldAccuracy'])}\t{status}")
        if self.baseline is not None:
            lines.append(f"baseline ({self.baseline.variant})\t{formatMeanStd(*self.baseline.summary()['testAccuracy'])}")
        for value in self.skipped:
            lines.append(f"{value}\tskipped")
        return "\n".join(lines) + "\n"

    def plot(self, filepath: str) -> None:
        """
        Mean test accuracy with a std band against the swept value.
        """
        numeric = [(v, r) for v, r in self.rows if isinstance(v, (int, float)) and not isinstance(v, bool)]
        if not numeric:
            logging.debug(f"Sweep {self.name} has no numeric values, no plot written.")
            return
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xs = np.array([v for v, _ in numeric], dtype=np.float64)
        stats = np.array([r.summary()["testAccuracy"] for _, r in numeric], dtype=np.float64)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(xs, stats[:, 0], marker="o", label="student")
        ax.fill_between(xs, stats[:, 0] - stats[:, 1], stats[:, 0] + stats[:, 1], alpha=0.2)
        if self.baseline is not None:
            ax.axhline(self.baseline.summary()["testAccuracy"][0], linestyle="--", color="gray",
                       label=self.baseline.variant)
        if self.logScale and (xs > 0).all():
            ax.set_xscale("log")
        ax.set_xlabel(self.parameter)
        ax.set_ylabel("test accuracy")
        ax.legend()
        fig.tight_layout()
        fig.savefig(filepath)
        plt.close(fig)

    def writeFiles(self, directory: str, plot: bool=True) -> None:
        _writeFiles(directory, self.toRecord(), self.renderTable())
        if plot:
            self.plot(os.path.join(directory, f"{self.name}.png"))


def _cell(value: float) -> str:
    return "n/a" if value is None or math.isnan(value) else f"{value:.4f}"


def _jsonSafe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonSafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonSafe(v) for v in value]
    return value


def _restoreNan(value: Any, key: str="") -> Any:
    if value is None and (key.endswith("Accuracy") or key == "summary"):
        return float("nan")
    if isinstance(value, dict):
        return {k: _restoreNan(v, k) for k, v in value.items()}
    if isinstance(value, list):
        return [_restoreNan(v, key) for v in value]
    return value


def _writeFiles(directory: str, record: Dict[str, Any], table: str) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, REPORT_JSON), "w", encoding="utf-8") as fh:
        json.dump(_jsonSafe(record), fh, indent=2, sort_keys=True)
    with open(os.path.join(directory, REPORT_TXT), "w", encoding="utf-8") as fh:
        fh.write(table)
    logging.info(f"Report written to {directory}.")


def loadReport(filepath: str) -> Union[RunReport, SweepReport]:
    """
    Reads a report.json file (or the report.json of a directory).
    """
    if os.path.isdir(filepath):
        filepath = os.path.join(filepath, REPORT_JSON)
    if not os.path.exists(filepath):
        raise ValueError(f"Report {filepath} does not exist.")
    with open(filepath, "r", encoding="utf-8") as fh:
        record = _restoreNan(json.load(fh))
    if record.get("type") == "sweep":
        return SweepReport.fromRecord(record)
    return RunReport.fromRecord(record)


def comparable(record: Dict[str, Any]) -> Dict[str, Any]:
    """
    Report record without wall-clock timings, at every nesting level.
    """
    if isinstance(record, dict):
        return {k: comparable(v) for k, v in record.items() if k != "timings"}
    if isinstance(record, list):
        return [comparable(v) for v in record]
    return record
