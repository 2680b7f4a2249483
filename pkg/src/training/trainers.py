#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Interpreter and student training loops """

import copy
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import torch
from sklearn.metrics import accuracy_score

from encoders.TextEncoder import TextEncoder
from errors import ExposureViolationError, TrainingDivergenceError
from models.GraphModel import ForwardTrace, GraphModel, GraphStructure
from models.forwards import (EnhancementFlags, InterpreterPlan, buildInterpreterPlan, buildStudentStructure,
                             encodeInterpreterInputs, forwardStudent, predict)
from structures.NodeRationale import NodeRationale
from structures.TextGraph import TEST, SplitAssignment, TextGraph

from .AlignmentWeightTable import AlignmentWeightTable
from .losses import interpreterLoss, studentLoss, supervisedIds


@dataclass(frozen=True)
class TrainingSchedule:
    """
    Optimizer settings shared by both training stages.

    Attributes:
        epochs: int
            Epochs of the graph model.
        learningRate: float
            Adam learning rate of the graph model.
        encoderEpochs: int
            Leading epochs during which a trainable encoder is updated.
        encoderLearningRate: float
        weightDecay: float
        validationFraction: float
            Share of supervised train nodes held out to select the best epoch on pseudo-labels.
    """
    epochs: int = 200
    learningRate: float = 0.01
    encoderEpochs: int = 10
    encoderLearningRate: float = 1e-5
    weightDecay: float = 0.0
    validationFraction: float = 0.1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"Training needs at least 1 epoch, got {self.epochs}")
        if not 0.0 <= self.validationFraction < 1.0:
            raise ValueError(f"validationFraction must be in [0, 1), got {self.validationFraction}")


class TrainingLog:
    """
    Per-epoch records, kept in memory and appended to a line-delimited JSON file when a path is given.
    """
    def __init__(self, filepath: Optional[str]=None) -> None:
        self.filepath = filepath
        self.records: List[Dict[str, Any]] = []
        if filepath is not None:
            os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
            open(filepath, "w", encoding="utf-8").close()

    def append(self, record: Dict[str, Any]) -> None:
        self.records.append(record)
        if self.filepath is not None:
            with open(self.filepath, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")

    def curve(self, key: str) -> List[float]:
        return [r[key] for r in self.records if key in r]


def assertInductive(structure: GraphStructure, split: SplitAssignment) -> None:
    """
    Raises ExposureViolationError if an edge of structure touches a test node.
    """
    isTest = torch.from_numpy(split.mask(TEST))
    touching = isTest[structure.src] | isTest[structure.dst] if structure.edgeCount else torch.zeros(0, dtype=torch.bool)
    if bool(touching.any()):
        raise ExposureViolationError(f"{int(touching.sum())} training edges touch test nodes.")


def holdOut(ids: Sequence[int], fraction: float, seed: int) -> Tuple[List[int], List[int]]:
    """
    Splits ids into (fit, validation) with a seeded permutation. No validation
    nodes are held out when fewer than 10 ids are available.
    """
    ids = sorted(ids)
    count = int(math.floor(len(ids) * fraction + 0.5)) if len(ids) >= 10 else 0
    if count == 0:
        return ids, []
    permutation = np.random.default_rng(seed).permutation(len(ids))
    validation = sorted(ids[i] for i in permutation[:count])
    held = set(validation)
    return [n for n in ids if n not in held], validation


def pseudoLabelAccuracy(trace: ForwardTrace, rationales: Mapping[int, NodeRationale], ids: Sequence[int]) -> float:
    if not ids:
        return float("nan")
    labels, _ = predict(trace)
    return float(accuracy_score([rationales[n].pseudoLabel for n in ids], labels[list(ids)]))


def _optimizer(model: GraphModel, encoder: TextEncoder, schedule: TrainingSchedule) -> torch.optim.Optimizer:
    groups = [{"params": list(model.parameters()), "lr": schedule.learningRate}]
    encoderParameters = list(encoder.parameters()) if encoder.trainable else []
    if encoderParameters:
        groups.append({"params": encoderParameters, "lr": schedule.encoderLearningRate})
    return torch.optim.Adam(groups, weight_decay=schedule.weightDecay)


def _checkFinite(total: torch.Tensor, stage: str, epoch: int, record: Dict[str, Any]) -> None:
    if not torch.isfinite(total):
        raise TrainingDivergenceError(f"{stage} loss became non-finite at epoch {epoch}: {record}")


def _fit(stage: str, model: GraphModel, encoder: TextEncoder, schedule: TrainingSchedule,
         step: Callable[[bool], Tuple[torch.Tensor, Dict[str, Any], ForwardTrace]],
         validate: Callable[[ForwardTrace], float], log: TrainingLog) -> float:
    """
    Shared loop: optimizes, logs every epoch and restores the best epoch by validation
    accuracy, or keeps the last epoch when there is no validation node.

    step(encoderActive) returns (total loss, record, trace) of one forward pass.
    """
    optimizer = _optimizer(model, encoder, schedule)
    best = (-1.0, -1)
    bestState = copy.deepcopy(model.state_dict())
    bestEncoder = encoder.stateDict()
    for epoch in range(1, schedule.epochs + 1):
        encoderActive = encoder.trainable and epoch <= schedule.encoderEpochs
        model.train()
        optimizer.zero_grad()
        total, record, trace = step(encoderActive)
        _checkFinite(total, stage, epoch, record)
        total.backward()
        if not encoderActive:
            for group in optimizer.param_groups[1:]:
                for parameter in group["params"]:
                    parameter.grad = None
        optimizer.step()

        model.eval()
        with torch.no_grad():
            _, _, evalTrace = step(False)
        accuracy = validate(evalTrace)
        record.update({"stage": stage, "epoch": epoch, "valAccuracy": accuracy})
        log.append(record)
        if epoch == 1 or epoch % 50 == 0:
            logging.debug(f"{stage} epoch {epoch}: total {record['total']:.5f}, val accuracy {accuracy:.4f}")
        score = -1.0 if math.isnan(accuracy) else accuracy
        if math.isnan(accuracy) or score > best[0]:
            best = (score, epoch)
            bestState = copy.deepcopy(model.state_dict())
            bestEncoder = encoder.stateDict()
    model.load_state_dict(bestState)
    encoder.loadStateDict(bestEncoder)
    model.eval()
    logging.info(f"{stage} training done, best epoch {best[1]} with validation accuracy {best[0]:.4f}.")
    return best[0]


def trainInterpreter(model: GraphModel, encoder: TextEncoder, view: TextGraph, rationales: Mapping[int, NodeRationale],
                     trainIds: Iterable[int], lambda1: float=1.0, schedule: TrainingSchedule=TrainingSchedule(),
                     seed: int=0, flags: EnhancementFlags=EnhancementFlags(), split: Optional[SplitAssignment]=None,
                     logPath: Optional[str]=None) -> TrainingLog:
    """
    Trains the interpreter on rationale-enhanced inputs against pseudo-labels and soft labels.

    A validationFraction share of the supervised train nodes is held out and the
    epoch with the best pseudo-label accuracy on it is kept.

    Parameters:
        model: GraphModel
            Interpreter backbone, updated in place.
        encoder: TextEncoder
            Interpreter encoder, fine-tuned during the first encoderEpochs when trainable.
        view: TextGraph
            Inductive training view.
        rationales: Mapping[int, NodeRationale]
        trainIds: Iterable[int]
        lambda1: float, default=1.0
        schedule: TrainingSchedule
        seed: int, default=0
            Seed of the validation hold-out.
        flags: EnhancementFlags
        split: Optional[SplitAssignment], default=None
            When given, the edited structure is checked to avoid test nodes.
        logPath: Optional[str], default=None

    Returns:
        TrainingLog
    """
    ids = supervisedIds(rationales, trainIds)
    if not ids:
        raise ValueError("No train node carries a pseudo-label, cannot train the interpreter.")
    fitIds, valIds = holdOut(ids, schedule.validationFraction, seed)
    plan = buildInterpreterPlan(view, rationales, flags)
    if split is not None:
        assertInductive(plan.structure, split)
    log = TrainingLog(logPath)
    frozen: Dict[str, Any] = {}

    def step(encoderActive: bool):
        if encoderActive:
            frozen.clear()
            h0, override = encodeInterpreterInputs(plan, encoder)
        else:
            if "inputs" not in frozen:
                frozen["inputs"] = _encodeFrozen(plan, encoder)
            h0, override = frozen["inputs"]
        trace = model(h0, plan.structure, override)
        terms = interpreterLoss(trace, rationales, fitIds, lambda1)
        return terms.total, terms.toRecord(), trace

    logging.info(f"Training interpreter on {len(fitIds)} nodes, {len(valIds)} held out.")
    _fit("interpreter", model, encoder, schedule, step,
         lambda trace: pseudoLabelAccuracy(trace, rationales, valIds or fitIds), log)
    return log


def _encodeFrozen(plan: InterpreterPlan, encoder: TextEncoder):
    with torch.no_grad():
        return encodeInterpreterInputs(plan, encoder)


def _rawTextStep(model: GraphModel, encoder: TextEncoder, view: TextGraph, structure: GraphStructure,
                 objective: Callable[[ForwardTrace], Tuple[torch.Tensor, Dict[str, Any]]]):
    """
    Step function of a raw-text pass; text embeddings are computed once while the encoder is frozen.
    """
    frozen: Dict[str, torch.Tensor] = {}

    def step(encoderActive: bool):
        if encoderActive:
            frozen.clear()
            trace = forwardStudent(model, view, encoder)
        else:
            if "h0" not in frozen:
                with torch.no_grad():
                    frozen["h0"] = encoder.encodeTexts(list(view.texts))
            trace = model(frozen["h0"], structure)
        total, record = objective(trace)
        return total, record, trace

    return step


def interpreterTrace(model: GraphModel, encoder: TextEncoder, view: TextGraph, rationales: Mapping[int, NodeRationale],
                     flags: EnhancementFlags=EnhancementFlags()) -> ForwardTrace:
    """
    Inference pass of a trained interpreter, without gradients.
    """
    model.eval()
    plan = buildInterpreterPlan(view, rationales, flags)
    with torch.no_grad():
        h0, override = encodeInterpreterInputs(plan, encoder)
        return model(h0, plan.structure, override)


def trainStudent(model: GraphModel, encoder: TextEncoder, interpreterPass: ForwardTrace, view: TextGraph,
                 rationales: Mapping[int, NodeRationale], weights: AlignmentWeightTable, trainIds: Iterable[int],
                 lambdas: Tuple[float, float, float]=(1.0, 1.0, 1.0), schedule: TrainingSchedule=TrainingSchedule(),
                 seed: int=0, split: Optional[SplitAssignment]=None, logPath: Optional[str]=None) -> TrainingLog:
    """
    Trains the student on raw texts and full training-view neighborhoods,
    aligned to interpreterPass, a forward pass of the frozen interpreter.

    Parameters:
        model: GraphModel
            Student backbone, updated in place.
        encoder: TextEncoder
            Student encoder.
        interpreterPass: ForwardTrace
            Interpreter pass on the training view, computed once.
        view: TextGraph
        rationales: Mapping[int, NodeRationale]
        weights: AlignmentWeightTable
        trainIds: Iterable[int]
        lambdas: Tuple[float, float, float], default=(1, 1, 1)
            (lambda2, lambda3, lambda4).
        schedule: TrainingSchedule
        seed: int, default=0
        split: Optional[SplitAssignment], default=None
        logPath: Optional[str], default=None

    Returns:
        TrainingLog
    """
    ids = supervisedIds(rationales, trainIds)
    if not ids:
        raise ValueError("No train node carries a pseudo-label, cannot train the student.")
    fitIds, valIds = holdOut(ids, schedule.validationFraction, seed)
    structure = buildStudentStructure(view)
    if split is not None:
        assertInductive(structure, split)
    log = TrainingLog(logPath)
    def objective(trace: ForwardTrace):
        terms = studentLoss(trace, interpreterPass, rationales, weights, fitIds, *lambdas)
        return terms.total, terms.toRecord()

    step = _rawTextStep(model, encoder, view, structure, objective)

    logging.info(f"Training student on {len(fitIds)} nodes, {len(valIds)} held out, lambdas {lambdas}.")
    _fit("student", model, encoder, schedule, step,
         lambda trace: pseudoLabelAccuracy(trace, rationales, valIds or fitIds), log)
    return log


def supervisedTrain(model: GraphModel, encoder: TextEncoder, view: TextGraph, labels: Mapping[int, int],
                    schedule: TrainingSchedule=TrainingSchedule(), seed: int=0,
                    logPath: Optional[str]=None) -> TrainingLog:
    """
    Plain cross-entropy training of a student on gold labels, used for fine-tuning.

    Parameters:
        model: GraphModel
        encoder: TextEncoder
        view: TextGraph
        labels: Mapping[int, int]
            Gold label per labelled train node.
        schedule: TrainingSchedule
        seed: int, default=0
        logPath: Optional[str], default=None

    Returns:
        TrainingLog
    """
    if not labels:
        raise ValueError("Supervised training needs at least one labelled node.")
    fitIds, valIds = holdOut(sorted(labels), schedule.validationFraction, seed)
    structure = buildStudentStructure(view)
    log = TrainingLog(logPath)
    targets = torch.tensor([labels[n] for n in fitIds], dtype=torch.int64)

    def objective(trace: ForwardTrace):
        loss = torch.nn.functional.cross_entropy(trace.logits[fitIds], targets)
        return loss, {"labelLoss": float(loss), "total": float(loss)}

    step = _rawTextStep(model, encoder, view, structure, objective)

    def validate(trace: ForwardTrace) -> float:
        check = valIds or fitIds
        predicted, _ = predict(trace)
        return float(accuracy_score([labels[n] for n in check], predicted[check]))

    _fit("finetune", model, encoder, schedule, step, validate, log)
    return log


def evaluateAccuracy(model: GraphModel, encoder: TextEncoder, graph: TextGraph, ids: Sequence[int],
                     labels: Optional[np.ndarray]=None) -> float:
    """
    Accuracy of a student on ids of graph, against gold labels by default.

    Parameters:
        model: GraphModel
        encoder: TextEncoder
        graph: TextGraph
            Full graph at evaluation.
        ids: Sequence[int]
        labels: Optional[np.ndarray], default=None
            Reference labels per node, graph.goldLabels when None.

    Returns:
        Accuracy in [0, 1]; nan when no id has a known label.
    """
    reference = graph.goldLabels if labels is None else labels
    if reference is None:
        raise ValueError("Evaluation needs gold labels.")
    known = [n for n in ids if reference[n] >= 0]
    if not known:
        return float("nan")
    model.eval()
    with torch.no_grad():
        predicted, _ = predict(forwardStudent(model, graph, encoder))
    return float(accuracy_score(reference[known], predicted[known]))
