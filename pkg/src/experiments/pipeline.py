#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" End-to-end distillation pipeline, ablations and sweeps """

import copy
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar

import numpy as np
import torch
from sklearn.metrics import accuracy_score

from encoders.EncoderFactory import EncoderFactory
from encoders.TextEncoder import TextEncoder
from errors import AnnotationFailedError, ConfigError, StageFailure, TagDistillError
from models.GraphModel import BackboneConfig, GraphModel
from models.forwards import EnhancementFlags, predict
from rationale.Annotator import Annotator
from rationale.ResponseCache import ResponseCache
from rationale.clients import CacheOnlyClient, LLMClient, OpenAIChatClient, OracleClient
from readers.ReaderFactory import ReaderFactory
from readers.SyntheticGraphReader import SyntheticGraphReader, SyntheticSpec, generateSynthetic
from structures.NodeRationale import FAILED, LABELS_ONLY, OK, NodeRationale, usableRationales
from structures.TextGraph import SplitAssignment, TextGraph, makeInductiveView, splitNodes
from training.AlignmentWeightTable import AlignmentWeightTable, computeAlignmentWeights
from training.trainers import (TrainingLog, TrainingSchedule, evaluateAccuracy, interpreterTrace,
                               supervisedTrain, trainInterpreter, trainStudent)
from utils import seedEverything, torchDtype

from .config import ExperimentConfig
from .report import RunReport, SeedResult, SweepReport

T = TypeVar("T")

FULL = "full"
ABLATION_VARIANTS = ("no-soft-labels", "no-keywords", "no-key-edges", "no-messages",
                     "vanilla-align", "no-semantic", "no-structural", "labels-only")
VARIANTS = (FULL,) + ABLATION_VARIANTS
LAMBDA_SECTIONS = {"lambda1": "interpreter", "lambda2": "student", "lambda3": "alignment", "lambda4": "alignment"}
CLIENT_KINDS = ("live", "oracle", "cache-only")

INTERPRETER_CHECKPOINT = "interpreter.pt"
STUDENT_CHECKPOINT = "student.pt"
INTERPRETER_LOG = "interpreter.log.jsonl"
STUDENT_LOG = "student.log.jsonl"
WEIGHTS_FILE = "alignment_weights.tsv"
RATIONALES_FILE = "rationales.jsonl"
SPLIT_FILE = "split.json"


def applyVariant(config: ExperimentConfig, variant: str) -> ExperimentConfig:
    """
    Config of an ablation variant: each variant switches off exactly one mechanism.

    Parameters:
        config: ExperimentConfig
            Full-method configuration.
        variant: str
            'full' or one of ABLATION_VARIANTS.

    Returns:
        ExperimentConfig
    """
    if variant == FULL:
        return config
    if variant == "no-soft-labels":
        return config.withValue("interpreter", "lambda1", 0.0)
    if variant == "no-keywords":
        return config.withValue("interpreter", "useKeywords", False)
    if variant == "no-key-edges":
        return config.withValue("interpreter", "useKeyEdges", False)
    if variant == "no-messages":
        return config.withValue("interpreter", "useMessages", False)
    if variant == "vanilla-align":
        return config.withValue("alignment", "lambda3", 0.0).withValue("alignment", "lambda4", 0.0)
    if variant == "no-semantic":
        return config.withValue("alignment", "lambda3", 0.0)
    if variant == "no-structural":
        return config.withValue("alignment", "lambda4", 0.0)
    if variant == "labels-only":
        return (config.withValue("student", "lambda2", 0.0)
                      .withValue("alignment", "lambda3", 0.0)
                      .withValue("alignment", "lambda4", 0.0))
    raise ConfigError(f"Unknown variant '{variant}', expected one of {VARIANTS}.")


def syntheticSpec(config: ExperimentConfig) -> SyntheticSpec:
    s = config.synthetic
    return SyntheticSpec(classCount=s.classCount, nodesPerClass=s.nodesPerClass,
                         intraClassEdgeProb=s.intraClassEdgeProb, interClassEdgeProb=s.interClassEdgeProb,
                         noiseWordRate=s.noiseWordRate, seed=s.seed, signatureVocabSize=s.signatureVocabSize,
                         wordsPerText=s.wordsPerText, neutralVocabSize=s.neutralVocabSize, confusionRate=s.confusionRate)


def loadDataset(config: ExperimentConfig) -> Tuple[TextGraph, Optional[SyntheticSpec]]:
    """
    Reads the configured dataset, or generates the synthetic graph when no path is set.

    Returns:
        Tuple (graph, synthetic spec or None for real datasets).
    """
    if not config.dataset.path:
        spec = syntheticSpec(config)
        return generateSynthetic(spec), spec
    reader = ReaderFactory.getReader(config.dataset.path, config.dataset.format or None)
    if isinstance(reader, SyntheticGraphReader):
        spec = reader.readSpec()
        return generateSynthetic(spec), spec
    graph = reader.read()
    if not isinstance(graph, TextGraph):
        raise ConfigError(f"{config.dataset.path} is not a graph dataset.")
    logging.info(f"Loaded {config.dataset.path}: {graph.nodeCount} nodes, {graph.edgeCount} edges, "
                 f"{graph.classCount} classes.")
    return graph, None


def cacheDirectory(config: ExperimentConfig) -> str:
    return config.llm.cacheDir or os.path.join(config.experiment.outputDir, "cache")


def buildClient(config: ExperimentConfig, graph: TextGraph, spec: Optional[SyntheticSpec]) -> LLMClient:
    """
    LLM client of the configured kind. All kinds report config.llm.model as their
    model name so that cached answers replay across kinds.
    """
    llm = config.llm
    if llm.client == "oracle":
        if spec is None:
            raise ConfigError("The oracle client only answers prompts about the synthetic dataset.")
        return OracleClient(graph, spec, config.annotation.keywordCap, config.annotation.messageCap, llm.model)
    if llm.client == "live":
        return OpenAIChatClient(llm.model, llm.baseUrl or None, llm.apiKeyEnv, llm.temperature, llm.timeout)
    if llm.client == "cache-only":
        return CacheOnlyClient(llm.model)
    raise ConfigError(f"Unknown client kind '{llm.client}', expected one of {CLIENT_KINDS}.")


@dataclass
class PreparedData:
    """
    Everything the training stages share: dataset, split, training view and rationales.

    Attributes:
        graph: TextGraph
            Full graph, only used at evaluation and for degrees.
        spec: Optional[SyntheticSpec]
        split: SplitAssignment
        view: TextGraph
            Inductive training view.
        rationales: Dict[int, NodeRationale]
        annotation: Dict[str, Any]
            Token ledger, status counts and exposure audit of the annotation pass.
        client: LLMClient
    """
    graph: TextGraph
    spec: Optional[SyntheticSpec]
    split: SplitAssignment
    view: TextGraph
    rationales: Dict[int, NodeRationale]
    annotation: Dict[str, Any]
    client: LLMClient


def prepare(config: ExperimentConfig, client: Optional[LLMClient]=None,
            dataset: Optional[Tuple[TextGraph, Optional[SyntheticSpec]]]=None) -> PreparedData:
    """
    Ingest, split, inductive view and annotation of the train nodes.

    Parameters:
        config: ExperimentConfig
        client: Optional[LLMClient], default=None
            Built from config when None.
        dataset: Optional[Tuple[TextGraph, Optional[SyntheticSpec]]], default=None
            Already loaded dataset.

    Returns:
        PreparedData
    """
    graph, spec = dataset if dataset is not None else loadDataset(config)
    split = splitNodes(graph, config.split.ratios, config.split.seed)
    view = makeInductiveView(graph, split)
    if client is None:
        client = buildClient(config, graph, spec)
    annotation = config.annotation
    annotator = Annotator(client, ResponseCache(cacheDirectory(config)), view, split,
                          neighborCap=annotation.neighborCap, keywordCap=annotation.keywordCap,
                          messageCap=annotation.messageCap, maxRetries=annotation.maxRetries,
                          subject=config.dataset.subject, network=config.dataset.network,
                          workers=annotation.workers)
    rationales = annotator.annotateNodes(split.trainIds)

    statusCounts = {status: sum(1 for r in rationales.values() if r.status == status) for status in (OK, LABELS_ONLY, FAILED)}
    failureRate = statusCounts[FAILED] / max(1, len(rationales))
    if failureRate > annotation.maxFailureRate:
        raise AnnotationFailedError(f"{statusCounts[FAILED]} of {len(rationales)} nodes failed annotation, "
                                    f"above the tolerated rate {annotation.maxFailureRate}.")
    trainIds = set(split.trainIds)
    violations = sorted(n for n in annotator.exposed if n not in trainIds)
    record = {
        "tokens": annotator.ledger.toRecord(),
        "statusCounts": statusCounts,
        "trainNodes": len(split.trainIds),
        "exposedNodes": len(annotator.exposed),
        "exposureViolations": violations,
        "client": client.kind,
        "model": client.modelName,
    }
    return PreparedData(graph, spec, split, view, rationales, record, client)


def restrictTraining(data: PreparedData, nodes: Sequence[int]) -> PreparedData:
    """
    Copy of data whose rationales only cover nodes.
    """
    keep = set(int(n) for n in nodes)
    rationales = {n: r for n, r in data.rationales.items() if n in keep}
    annotation = dict(data.annotation, supervisedNodes=len(usableRationales(rationales)))
    return replace(data, rationales=rationales, annotation=annotation)


def _stage(name: str, action: Callable[[], T]) -> T:
    try:
        return action()
    except StageFailure:
        raise
    except (TagDistillError, ValueError, ArithmeticError, RuntimeError) as e:
        logging.error(f"Stage {name} failed: {e}")
        raise StageFailure(name, e) from e


def _schedule(section: Any, validationFraction: float) -> TrainingSchedule:
    return TrainingSchedule(epochs=section.epochs, learningRate=section.learningRate,
                            encoderEpochs=section.encoderEpochs, encoderLearningRate=section.encoderLearningRate,
                            weightDecay=section.weightDecay, validationFraction=validationFraction)


def enhancementFlags(config: ExperimentConfig) -> EnhancementFlags:
    i = config.interpreter
    return EnhancementFlags(i.useKeywords, i.useKeyEdges, i.useMessages)


def encoderTriple(config: ExperimentConfig) -> Tuple[TextEncoder, TextEncoder, TextEncoder]:
    e = config.encoder
    return EncoderFactory.getEncoderTriple(e.kind, dim=e.dim, modelName=e.modelName,
                                           maxTokensFull=e.maxTokensFull, maxTokensKeywords=e.maxTokensKeywords)


def encoderBinding(config: ExperimentConfig, encoder: TextEncoder) -> Dict[str, Any]:
    e = config.encoder
    return {"kind": e.kind, "dim": encoder.dim, "modelName": e.modelName, "maxTokensFull": e.maxTokensFull,
            "maxTokensKeywords": e.maxTokensKeywords, "stateDict": encoder.stateDict() if encoder.trainable else None}


def restoreEncoder(config: ExperimentConfig, model: GraphModel, encoder: TextEncoder) -> None:
    """
    Loads the encoder weights stored with a checkpoint into encoder.
    """
    binding = model.encoderBinding
    if binding.get("kind") != config.encoder.kind or binding.get("dim") != encoder.dim:
        raise ConfigError(f"Checkpoint was trained with encoder {binding.get('kind')} of width {binding.get('dim')}, "
                          f"configuration asks for {config.encoder.kind} of width {encoder.dim}.")
    if binding.get("stateDict"):
        encoder.loadStateDict(binding["stateDict"])


def seedDirectory(config: ExperimentConfig, seed: int) -> str:
    directory = os.path.join(config.experiment.outputDir, f"seed-{seed}")
    os.makedirs(directory, exist_ok=True)
    return directory


def _newModel(config: ExperimentConfig, graph: TextGraph, encoder: TextEncoder) -> GraphModel:
    backbone = BackboneConfig(family=config.backbone.family, layers=config.backbone.layers,
                              hiddenDim=config.backbone.hiddenDim, classCount=graph.classCount, inputDim=encoder.dim)
    return GraphModel(backbone, torchDtype(config.misc.precision))


def trainInterpreterStage(config: ExperimentConfig, data: PreparedData, seed: int,
                          encoder: TextEncoder) -> Tuple[GraphModel, TrainingLog]:
    """
    Trains and checkpoints the interpreter of one seed.
    """
    directory = seedDirectory(config, seed)
    seedEverything(seed)
    model = _newModel(config, data.graph, encoder)
    log = trainInterpreter(model, encoder, data.view, data.rationales, data.split.trainIds,
                           lambda1=config.interpreter.lambda1,
                           schedule=_schedule(config.interpreter, config.experiment.validationFraction),
                           seed=seed, flags=enhancementFlags(config), split=data.split,
                           logPath=os.path.join(directory, INTERPRETER_LOG))
    model.saveToFile(os.path.join(directory, INTERPRETER_CHECKPOINT), encoderBinding(config, encoder),
                     {"seed": seed, "stage": "interpreter"})
    return model, log


def trainStudentStage(config: ExperimentConfig, data: PreparedData, seed: int, interpreter: GraphModel,
                      interpreterEncoder: TextEncoder, studentEncoder: TextEncoder,
                      reference: TextEncoder) -> Tuple[GraphModel, TrainingLog, AlignmentWeightTable]:
    """
    Computes the alignment weights, then trains and checkpoints the student of one seed
    against the frozen interpreter.
    """
    directory = seedDirectory(config, seed)
    flags = enhancementFlags(config)
    interpreterPass = interpreterTrace(interpreter, interpreterEncoder, data.view, data.rationales, flags)
    weights = computeAlignmentWeights(data.graph, data.view, data.rationales, reference, data.split.trainIds, flags)
    weights.writeTsv(os.path.join(directory, WEIGHTS_FILE))
    fingerprint = weights.fingerprint()

    if studentEncoder.trainable and interpreterEncoder.trainable:
        studentEncoder.loadWeightsFrom(interpreterEncoder)  # type: ignore[attr-defined]
    seedEverything(seed)
    student = _newModel(config, data.graph, studentEncoder)
    lambdas = (config.student.lambda2, config.alignment.lambda3, config.alignment.lambda4)
    log = trainStudent(student, studentEncoder, interpreterPass, data.view, data.rationales, weights,
                       data.split.trainIds, lambdas=lambdas,
                       schedule=_schedule(config.student, config.experiment.validationFraction),
                       seed=seed, split=data.split, logPath=os.path.join(directory, STUDENT_LOG))
    if weights.fingerprint() != fingerprint:
        raise RuntimeError("Alignment weights changed during student training.")
    student.saveToFile(os.path.join(directory, STUDENT_CHECKPOINT), encoderBinding(config, studentEncoder),
                       {"seed": seed, "stage": "student", "weightsFingerprint": fingerprint})
    return student, log, weights


def studentAccuracies(data: PreparedData, student: GraphModel, encoder: TextEncoder) -> Tuple[float, float, int]:
    """
    Student accuracy on test and validation nodes of the full graph.

    Returns:
        Tuple (test accuracy, validation accuracy, client calls issued meanwhile).
    """
    before = data.client.callCount
    if data.graph.goldLabels is None:
        test = val = float("nan")
    else:
        test = evaluateAccuracy(student, encoder, data.graph, data.split.testIds)
        val = evaluateAccuracy(student, encoder, data.graph, data.split.valIds)
    calls = data.client.callCount - before
    if calls:
        raise RuntimeError(f"Student evaluation issued {calls} client calls.")
    return test, val, calls


def interpreterAccuracies(config: ExperimentConfig, data: PreparedData, interpreter: GraphModel,
                          encoder: TextEncoder) -> Tuple[float, float]:
    """
    Interpreter accuracy on the train nodes carrying a usable rationale, against
    gold labels (nan when unknown) and against pseudo-labels.
    """
    ids = usableRationales(data.rationales, data.split.trainIds)
    if not ids:
        return float("nan"), float("nan")
    trace = interpreterTrace(interpreter, encoder, data.view, data.rationales, enhancementFlags(config))
    predicted, _ = predict(trace)
    pseudo = float(accuracy_score([data.rationales[n].pseudoLabel for n in ids], predicted[ids]))
    gold = float("nan")
    if data.graph.goldLabels is not None:
        known = [n for n in ids if data.graph.goldLabels[n] >= 0]
        if known:
            gold = float(accuracy_score(data.graph.goldLabels[known], predicted[known]))
    return gold, pseudo


@dataclass
class SeedArtifacts:
    interpreter: GraphModel
    interpreterEncoder: TextEncoder
    student: GraphModel
    studentEncoder: TextEncoder
    weights: AlignmentWeightTable


def runSeed(config: ExperimentConfig, data: PreparedData, seed: int) -> Tuple[SeedResult, SeedArtifacts]:
    """
    Interpreter training, student training and evaluation of one seed.
    """
    logging.info(f"Seed {seed}: training interpreter.")
    start = time.perf_counter()
    interpreterEncoder, studentEncoder, reference = encoderTriple(config)
    interpreter, interpreterLog = _stage("train-interpreter",
                                         lambda: trainInterpreterStage(config, data, seed, interpreterEncoder))
    logging.info(f"Seed {seed}: training student.")
    student, studentLog, weights = _stage("train-student",
                                          lambda: trainStudentStage(config, data, seed, interpreter, interpreterEncoder,
                                                                    studentEncoder, reference))
    trained = time.perf_counter()
    test, val, calls = _stage("evaluate", lambda: studentAccuracies(data, student, studentEncoder))
    tested = time.perf_counter()
    gold, pseudo = _stage("evaluate", lambda: interpreterAccuracies(config, data, interpreter, interpreterEncoder))
    logging.info(f"Seed {seed}: student test accuracy {test:.4f}, interpreter accuracy {gold:.4f}.")
    result = SeedResult(seed=seed, testAccuracy=test, valAccuracy=val, interpreterGoldAccuracy=gold,
                        interpreterPseudoAccuracy=pseudo, weightsFingerprint=weights.fingerprint(),
                        curves={"interpreter": interpreterLog.curve("total"), "student": studentLog.curve("total")},
                        inferenceCalls=calls, timings={"train": trained - start, "test": tested - trained})
    return result, SeedArtifacts(interpreter, interpreterEncoder, student, studentEncoder, weights)


def runPipeline(config: ExperimentConfig, client: Optional[LLMClient]=None, variant: str=FULL,
                data: Optional[PreparedData]=None, write: bool=True) -> RunReport:
    """
    Annotates the train nodes, then trains and evaluates interpreter and student
    for every configured seed.

    A failing stage stops the run; the report then carries the completed seeds
    and a failure marker naming the stage.

    Parameters:
        config: ExperimentConfig
        client: Optional[LLMClient], default=None
            Built from config when None.
        variant: str, default='full'
            Ablation variant applied on top of config.
        data: Optional[PreparedData], default=None
            Annotated data, shared by runs that only differ after annotation.
        write: bool, default=True
            Whether report.json and report.txt are written to the output directory.

    Returns:
        RunReport
    """
    config = applyVariant(config, variant)
    report = RunReport(config.experiment.name, variant, config.toDict())
    try:
        if data is None:
            data = _stage("annotate", lambda: prepare(config, client))
        report.annotation = data.annotation
        for seed in config.experiment.seeds:
            result, _ = runSeed(config, data, seed)
            report.results.append(result)
    except StageFailure as failure:
        report.failure = {"stage": failure.stage, "message": str(failure.cause)}
    if write:
        report.writeFiles(config.experiment.outputDir)
    return report


def _pointConfig(config: ExperimentConfig, subdirectory: str) -> ExperimentConfig:
    return config.withValue("experiment", "outputDir", os.path.join(config.experiment.outputDir, subdirectory)) \
                 .withValue("llm", "cacheDir", cacheDirectory(config))


def _runPoint(config: ExperimentConfig, variant: str, nodes: Optional[Tuple[int, ...]]) -> RunReport:
    """
    One sweep point in a worker process; annotation replays from the warm cache.
    """
    from utils import configureLogging
    configureLogging(config.misc.logLevel)
    try:
        data = prepare(config, CacheOnlyClient(config.llm.model))
    except TagDistillError as e:
        report = RunReport(config.experiment.name, variant, applyVariant(config, variant).toDict())
        report.failure = {"stage": "annotate", "message": str(e)}
        report.writeFiles(config.experiment.outputDir)
        return report
    if nodes is not None:
        data = restrictTraining(data, nodes)
    return runPipeline(config, variant=variant, data=data)


def _runPoints(config: ExperimentConfig, data: PreparedData,
               points: List[Tuple[ExperimentConfig, str, Optional[Tuple[int, ...]]]]) -> List[RunReport]:
    """
    Runs sweep points, in up to `workers` processes.
    """
    workers = config.experiment.workers
    if workers > 1 and len(points) > 1:
        logging.info(f"Running {len(points)} sweep points on {workers} processes.")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_runPoint, *point) for point in points]
            return [f.result() for f in futures]
    reports = []
    for pointConfig, variant, nodes in points:
        pointData = data if nodes is None else restrictTraining(data, nodes)
        reports.append(runPipeline(pointConfig, variant=variant, data=pointData))
    return reports


def runAblation(config: ExperimentConfig, variants: Optional[Sequence[str]]=None,
                client: Optional[LLMClient]=None) -> SweepReport:
    """
    Full method and each ablation variant over the same annotations and seeds.
    """
    requested = list(variants if variants is not None else config.experiment.variants)
    for variant in requested:
        applyVariant(config, variant)
    ordered = [FULL] + [v for v in dict.fromkeys(requested) if v != FULL]
    data = prepare(config, client)
    points = [(_pointConfig(config, variant), variant, None) for variant in ordered]
    reports = _runPoints(config, data, points)  # type: ignore[arg-type]
    sweep = SweepReport("ablation", "variant", list(zip(ordered, reports)))
    sweep.writeFiles(config.experiment.outputDir, plot=False)
    return sweep


def nestedSubsets(nodes: Sequence[int], fractions: Sequence[float], seed: int,
                  minimum: int) -> Tuple[List[Tuple[float, Tuple[int, ...]]], List[float]]:
    """
    Prefixes of one seeded permutation of nodes, so smaller fractions give subsets of larger ones.

    Returns:
        Tuple (list of (fraction, sorted node subset), skipped fractions with fewer than minimum nodes).
    """
    nodes = sorted(nodes)
    order = np.random.default_rng(seed).permutation(len(nodes))
    subsets, skipped = [], []
    for fraction in sorted(fractions):
        count = int(math.floor(fraction * len(nodes) + 0.5))
        if count < minimum:
            logging.warning(f"Fraction {fraction} keeps {count} train nodes, fewer than {minimum}; skipped.")
            skipped.append(fraction)
            continue
        subsets.append((fraction, tuple(sorted(nodes[i] for i in order[:count]))))
    return subsets, skipped


def runDataEfficiency(config: ExperimentConfig, fractions: Optional[Sequence[float]]=None,
                      client: Optional[LLMClient]=None) -> SweepReport:
    """
    Retrains both stages on nested subsets of the annotated train nodes.
    """
    fractions = list(fractions if fractions is not None else config.experiment.fractions)
    bad = [f for f in fractions if not 0.0 < f <= 1.0]
    if bad:
        raise ConfigError(f"Training fractions must be in (0, 1], got {bad}.")
    data = prepare(config, client)
    usable = usableRationales(data.rationales, data.split.trainIds)
    subsets, skipped = nestedSubsets(usable, fractions, config.experiment.subsetSeed, data.graph.classCount)
    points = [(_pointConfig(config, f"fraction-{fraction}"), FULL, nodes) for fraction, nodes in subsets]
    reports = _runPoints(config, data, points)  # type: ignore[arg-type]
    sweep = SweepReport("data-efficiency", "fraction", [(f, r) for (f, _), r in zip(subsets, reports)],
                        logScale=True, skipped=skipped)
    sweep.writeFiles(config.experiment.outputDir, plot=config.experiment.plots)
    return sweep


def runSensitivity(config: ExperimentConfig, parameter: Optional[str]=None, grid: Optional[Sequence[float]]=None,
                   client: Optional[LLMClient]=None) -> SweepReport:
    """
    One full run per grid value of a loss weight, the other weights held fixed,
    with the vanilla-align run as reference line.
    """
    parameter = parameter or config.experiment.sensitivityParameter
    grid = list(grid if grid is not None else config.experiment.sensitivityGrid)
    if parameter not in LAMBDA_SECTIONS:
        raise ConfigError(f"Unknown sensitivity parameter '{parameter}', expected one of {list(LAMBDA_SECTIONS)}.")
    if any(v < 0 or not math.isfinite(v) for v in grid):
        raise ConfigError(f"Grid values must be finite and non-negative, got {grid}.")
    data = prepare(config, client)
    section = LAMBDA_SECTIONS[parameter]
    points = [(_pointConfig(config, f"{parameter}-{value}").withValue(section, parameter, float(value)), FULL, None)
              for value in grid]
    points.append((_pointConfig(config, "baseline"), "vanilla-align", None))
    reports = _runPoints(config, data, points)  # type: ignore[arg-type]
    sweep = SweepReport("sensitivity", parameter, list(zip(grid, reports[:-1])), baseline=reports[-1], logScale=True)
    sweep.writeFiles(config.experiment.outputDir, plot=config.experiment.plots)
    return sweep


def _labelledSubset(config: ExperimentConfig, data: PreparedData) -> Dict[int, int]:
    gold = data.graph.goldLabels
    labelled = [n for n in data.split.trainIds if gold[n] >= 0]  # type: ignore[index]
    subsets, _ = nestedSubsets(labelled, [config.experiment.finetuneLabelFraction], config.experiment.subsetSeed, 1)
    if not subsets:
        raise ConfigError(f"finetuneLabelFraction {config.experiment.finetuneLabelFraction} leaves no labelled node.")
    return {n: int(gold[n]) for n in subsets[0][1]}  # type: ignore[index]


def runPretrainFinetune(config: ExperimentConfig, client: Optional[LLMClient]=None) -> SweepReport:
    """
    Compares the distilled student, a student trained on gold labels only and
    the distilled student fine-tuned on gold labels.
    """
    graph, spec = loadDataset(config)
    if graph.goldLabels is None or not (graph.goldLabels >= 0).any():
        raise ConfigError("Pretrain-finetune needs a dataset with gold labels.")
    settings = ("distilled", "supervised", "pretrained+supervised")
    reports = {s: RunReport(config.experiment.name, s, config.toDict()) for s in settings}
    try:
        data = _stage("annotate", lambda: prepare(config, client, (graph, spec)))
        labels = _labelledSubset(config, data)
        schedule = _schedule(config.student, config.experiment.validationFraction)
        for report in reports.values():
            report.annotation = dict(data.annotation, goldLabelledNodes=len(labels))
        for seed in config.experiment.seeds:
            distilled, artifacts = runSeed(config, data, seed)
            reports["distilled"].results.append(distilled)
            directory = seedDirectory(config, seed)

            seedEverything(seed)
            _, freshEncoder, _ = encoderTriple(config)
            fresh = _newModel(config, graph, freshEncoder)
            start = time.perf_counter()
            _stage("finetune", lambda: supervisedTrain(fresh, freshEncoder, data.view, labels, schedule, seed,
                                                       os.path.join(directory, "supervised.log.jsonl")))
            test, val, _ = _stage("evaluate", lambda: studentAccuracies(data, fresh, freshEncoder))
            reports["supervised"].results.append(SeedResult(seed=seed, testAccuracy=test, valAccuracy=val,
                                                            timings={"train": time.perf_counter() - start}))

            pretrained = copy.deepcopy(artifacts.student)
            pretrainedEncoder = copy.deepcopy(artifacts.studentEncoder)
            start = time.perf_counter()
            _stage("finetune", lambda: supervisedTrain(pretrained, pretrainedEncoder, data.view, labels, schedule, seed,
                                                       os.path.join(directory, "finetune.log.jsonl")))
            test, val, _ = _stage("evaluate", lambda: studentAccuracies(data, pretrained, pretrainedEncoder))
            reports["pretrained+supervised"].results.append(SeedResult(seed=seed, testAccuracy=test, valAccuracy=val,
                                                                       timings={"train": time.perf_counter() - start}))
    except StageFailure as failure:
        for report in reports.values():
            report.failure = {"stage": failure.stage, "message": str(failure.cause)}
    sweep = SweepReport("pretrain-finetune", "setting", [(s, reports[s]) for s in settings])
    sweep.writeFiles(config.experiment.outputDir, plot=False)
    return sweep


def writeSplit(split: SplitAssignment, filepath: str) -> None:
    with open(filepath, "w", encoding="utf-8") as fh:
        json.dump({"seed": split.seed, "nodeCount": split.nodeCount, "train": list(split.trainIds),
                   "val": list(split.valIds), "test": list(split.testIds)}, fh)


def loadCheckpoints(config: ExperimentConfig, seed: int, names: Sequence[str]) -> Mapping[str, GraphModel]:
    """
    Checkpoints of one seed written by the training stages.
    """
    directory = os.path.join(config.experiment.outputDir, f"seed-{seed}")
    return {name: GraphModel.loadFromFile(os.path.join(directory, name)) for name in names}


def evaluateCheckpoints(config: ExperimentConfig, data: PreparedData) -> RunReport:
    """
    Re-evaluates the stored interpreter and student checkpoints of every seed.
    """
    report = RunReport(config.experiment.name, FULL, config.toDict(), annotation=data.annotation)
    for seed in config.experiment.seeds:
        models = loadCheckpoints(config, seed, (INTERPRETER_CHECKPOINT, STUDENT_CHECKPOINT))
        interpreterEncoder, studentEncoder, _ = encoderTriple(config)
        restoreEncoder(config, models[INTERPRETER_CHECKPOINT], interpreterEncoder)
        restoreEncoder(config, models[STUDENT_CHECKPOINT], studentEncoder)
        start = time.perf_counter()
        test, val, calls = studentAccuracies(data, models[STUDENT_CHECKPOINT], studentEncoder)
        tested = time.perf_counter()
        gold, pseudo = interpreterAccuracies(config, data, models[INTERPRETER_CHECKPOINT], interpreterEncoder)
        report.results.append(SeedResult(seed=seed, testAccuracy=test, valAccuracy=val, interpreterGoldAccuracy=gold,
                                         interpreterPseudoAccuracy=pseudo,
                                         weightsFingerprint=models[STUDENT_CHECKPOINT].extra.get("weightsFingerprint", ""),
                                         inferenceCalls=calls, timings={"test": tested - start}))
    return report


def deviceSummary() -> str:
    return f"torch {torch.__version__}, {torch.get_num_threads()} threads"
