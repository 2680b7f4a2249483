import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from errors import StageFailure, TagDistillError
from experiments.config import ExperimentConfig
from experiments.pipeline import (FULL, INTERPRETER_CHECKPOINT, RATIONALES_FILE, SPLIT_FILE,
                                  cacheDirectory, deviceSummary, encoderTriple, evaluateCheckpoints, loadCheckpoints,
                                  loadDataset, prepare, restoreEncoder, runAblation, runDataEfficiency, runPipeline,
                                  runPretrainFinetune, runSensitivity, trainInterpreterStage,
                                  trainStudentStage, writeSplit)
from experiments.report import RunReport, SweepReport, loadReport
from rationale.Annotator import auditExposure
from rationale.ResponseCache import ResponseCache
from readers.TsvGraphReader import saveGraph
from structures.NodeRationale import saveRationales
from structures.TextGraph import splitNodes
from utils import configureLogging

VERBS = ("ingest", "annotate", "train-interpreter", "train-student", "evaluate",
         "run", "ablate", "sweep", "pretrain-finetune", "report")


def main(config: ExperimentConfig, args: argparse.Namespace) -> int:
    os.makedirs(config.experiment.outputDir, exist_ok=True)
    verb = args.verb
    if verb != "report":
        reportConfig(config)

    if verb == "ingest":
        graph, _ = loadDataset(config)
        manifest = saveGraph(graph, os.path.join(config.experiment.outputDir, "graph"))
        split = splitNodes(graph, config.split.ratios, config.split.seed)
        writeSplit(split, os.path.join(config.experiment.outputDir, SPLIT_FILE))
        print(f"nodes={graph.nodeCount}, edges={graph.edgeCount}, classes={graph.classCount}")
        print(f"train={len(split.trainIds)}, val={len(split.valIds)}, test={len(split.testIds)}")
        print(f"manifest={manifest}")
        return 0

    if verb == "annotate":
        data = prepare(config)
        saveRationales(data.rationales, os.path.join(config.experiment.outputDir, RATIONALES_FILE))
        with open(os.path.join(config.experiment.outputDir, "annotation.json"), "w", encoding="utf-8") as fh:
            json.dump(data.annotation, fh, indent=2, sort_keys=True)
        foreign = auditExposure(ResponseCache(cacheDirectory(config)), data.split)
        if foreign:
            logging.warning(f"Response cache holds texts of {len(foreign)} nodes outside this split's train set.")
        reportAnnotation(data.annotation)
        return 0

    if verb == "train-interpreter":
        data = prepare(config)
        for seed in config.experiment.seeds:
            interpreterEncoder, _, _ = encoderTriple(config)
            _, log = trainInterpreterStage(config, data, seed, interpreterEncoder)
            print(f"seed={seed}: interpreter final loss {log.curve('total')[-1]:.5f}")
        return 0

    if verb == "train-student":
        data = prepare(config)
        for seed in config.experiment.seeds:
            interpreter = loadCheckpoints(config, seed, (INTERPRETER_CHECKPOINT,))[INTERPRETER_CHECKPOINT]
            interpreterEncoder, studentEncoder, reference = encoderTriple(config)
            restoreEncoder(config, interpreter, interpreterEncoder)
            _, log, weights = trainStudentStage(config, data, seed, interpreter, interpreterEncoder,
                                                studentEncoder, reference)
            print(f"seed={seed}: student final loss {log.curve('total')[-1]:.5f}, weights {weights.fingerprint()[:12]}")
        return 0

    if verb == "evaluate":
        report = evaluateCheckpoints(config, prepare(config))
        report.writeFiles(config.experiment.outputDir)
        print(report.renderTable(), end="")
        return 0

    if verb == "run":
        return reportResult(runPipeline(config, variant=args.variant or FULL))

    if verb == "ablate":
        return reportResult(runAblation(config, args.variant_list or None))

    if verb == "sweep":
        if args.kind == "fractions":
            return reportResult(runDataEfficiency(config, args.values or None))
        return reportResult(runSensitivity(config, args.parameter, args.values or None))

    if verb == "pretrain-finetune":
        return reportResult(runPretrainFinetune(config))

    if verb == "report":
        path = args.path or config.experiment.outputDir
        print(loadReport(path).renderTable(), end="")
        return 0
    raise ValueError(f"Unknown verb {verb}")


def reportConfig(config: ExperimentConfig) -> None:
    print("[Dataset]")
    print(f"path={config.dataset.path or '(synthetic)'}, subject={config.dataset.subject}")
    print("[Backbone]")
    print(f"family={config.backbone.family}, layers={config.backbone.layers}, hiddenDim={config.backbone.hiddenDim}")
    print("[Encoder]")
    print(f"kind={config.encoder.kind}, dim={config.encoder.dim}")
    print("[LLM]")
    print(f"client={config.llm.client}, model={config.llm.model}")
    print("[Losses]")
    print(f"lambda1={config.interpreter.lambda1}, lambda2={config.student.lambda2}, "
          f"lambda3={config.alignment.lambda3}, lambda4={config.alignment.lambda4}")
    print("[Experiment]")
    print(f"seeds={list(config.experiment.seeds)}, outputDir={config.experiment.outputDir}, {deviceSummary()}")


def reportAnnotation(annotation: dict) -> None:
    tokens = annotation["tokens"]
    print(f"statusCounts={annotation['statusCounts']}")
    print(f"exposedNodes={annotation['exposedNodes']} of {annotation['trainNodes']} train nodes")
    print(f"prompts={tokens['promptCount']}, promptTokens={tokens['promptTokens']}, "
          f"responseTokens={tokens['responseTokens']}, estimated={tokens['estimated']}")


def reportResult(report) -> int:
    print(report.renderTable(), end="")
    if isinstance(report, RunReport):
        return 0 if report.complete else 1
    if isinstance(report, SweepReport):
        return 0 if all(r.complete for _, r in report.rows) else 1
    return 0


def parseArguments(argv: Optional[List[str]]=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Distills LLM rationales on text-attributed graphs into graph neural networks.")
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("--config", help="Path to the .ini configuration file, defaults apply when omitted.")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="Override one configuration value, repeatable.")
    parser.add_argument("--variant", help="Ablation variant of the 'run' verb.")
    parser.add_argument("--variants", dest="variant_list", nargs="+", help="Variants of the 'ablate' verb.")
    parser.add_argument("--kind", choices=("fractions", "sensitivity"), default="sensitivity",
                        help="Sweep kind of the 'sweep' verb.")
    parser.add_argument("--parameter", help="Loss weight swept by a sensitivity sweep (lambda1..lambda4).")
    parser.add_argument("--values", nargs="+", type=float, help="Fractions or grid values of the sweep.")
    parser.add_argument("--path", help="Report file or directory of the 'report' verb.")
    return parser.parse_args(argv)


if __name__ == "__main__":
    arguments = parseArguments()
    try:
        configuration = ExperimentConfig.fromFile(arguments.config) if arguments.config else ExperimentConfig()
        configuration = configuration.withOverrides(arguments.overrides)
    except TagDistillError as e:
        print(f"Configuration error: {e}")
        sys.exit(2)
    configureLogging(configuration.misc.logLevel)
    try:
        sys.exit(main(configuration, arguments))
    except (TagDistillError, StageFailure, ValueError) as e:
        logging.error(str(e))
        sys.exit(1)
