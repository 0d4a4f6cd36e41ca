"""Bundled case studies (anesthesia, ACC) with fixed seeds and committed logs.

Each case directory entry ``<name>.json`` names a seed, horizon, logging
probabilities and sample-noise levels. The four offline variants cross
sporadic/frequent logging with low/high sample noise; their logs and the
ground-truth behavior are committed next to the config so that runs never
depend on fresh randomness. :func:`generate_case_files` rebuilds them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Tuple

from .dynamics import UncertainLinearSystem
from .errors import BoundmonError
from .formats import ModelMeta, parse_mbeh, parse_mlog, parse_model, parse_unsafe, write_mbeh, write_mlog
from .geometry import UnsafeSpec, from_interval
from .loggen import GenConfig, generate
from .offline import Log, Verdict, monitor_offline
from .online import Behavior, OnlineConfig, monitor_online

CASE_NAMES = ("anesthesia", "acc")


class UnknownCaseError(BoundmonError, KeyError):
    pass


def _read(filename: str) -> str:
    return resources.files("boundmon.cases").joinpath(filename).read_text(encoding="utf-8")


@dataclass
class CaseStudy:
    name: str
    system: UncertainLinearSystem
    meta: ModelMeta
    unsafe: UnsafeSpec
    config: dict

    @property
    def plot_dim(self) -> int:
        return int(self.config["plot_dim"])

    @property
    def variants(self) -> Tuple[str, ...]:
        return tuple(sorted(self.config["offline"]))

    def gen_config(self, variant: str) -> GenConfig:
        density, level = self.config["offline"][variant]
        return GenConfig(
            init=from_interval(self.meta.init),
            length=int(self.config["length"]),
            log_probability=float(self.config["probability"][density]),
            noise=tuple(self.config["noise"][level]),
            seed=int(self.config["seed"]),
        )

    def online_config(self) -> OnlineConfig:
        on = self.config["online"]
        return OnlineConfig(tuple(self.config["noise"][on["noise"]]), int(on["max_skip"]), self.meta.max_generators)

    def log_file(self, variant: str) -> str:
        return f"{self.name}_offline_{variant}.mlog"

    @property
    def behavior_file(self) -> str:
        return f"{self.name}.mbeh"


def load_case(name: str) -> CaseStudy:
    if name not in CASE_NAMES:
        raise UnknownCaseError(f"unknown case {name!r}; choose from {', '.join(CASE_NAMES)}")
    sys, meta = parse_model(_read(f"{name}.model"))
    unsafe = parse_unsafe(_read(f"{name}.unsafe"), meta.names)
    config = json.loads(_read(f"{name}.json"))
    return CaseStudy(name, sys, meta, unsafe, config)


def generate_case_files(case: CaseStudy) -> Dict[str, str]:
    """Regenerate the committed behavior and logs from the case seed."""
    files = {}
    beh = None
    for variant in case.variants:
        b, log = generate(case.system, case.gen_config(variant))
        # all variants share the seed, hence the behavior
        beh = b if beh is None else beh
        files[case.log_file(variant)] = write_mlog(log)
    files[case.behavior_file] = write_mbeh(beh)
    return files


def case_log(case: CaseStudy, variant: str) -> Log:
    if variant not in case.config["offline"]:
        raise UnknownCaseError(f"case {case.name} has no offline variant {variant!r}")
    return parse_mlog(_read(case.log_file(variant)))


def case_behavior(case: CaseStudy) -> Behavior:
    return parse_mbeh(_read(case.behavior_file))


def run_offline(case: CaseStudy, variant: str, refine: bool = True) -> Tuple[Verdict, Log]:
    log = case_log(case, variant)
    return monitor_offline(case.system, log, case.unsafe, case.meta.max_generators, refine), log


def run_online(case: CaseStudy) -> Tuple[Verdict, Log]:
    return monitor_online(case.system, case_behavior(case), case.unsafe, case.online_config())
