"""Loading the corpus the way the acceptance suite sees it."""

from __future__ import annotations

import functools
import json
from pathlib import Path

from lattc.elaborate import check_source, elaborate_module
from lattc.kernel import GlobalEnv
from lattc.lattice import default_config, load_config
from lattc.syntax.parser import parse_module

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


@functools.lru_cache(maxsize=None)
def manifest() -> dict:
    return json.loads((CORPUS / "manifest.json").read_text())["files"]


def positive_files():
    return [f for f, info in manifest().items() if info["expect"] == "ok"]


def negative_files():
    return [f for f, info in manifest().items() if info["expect"] != "ok"]


@functools.lru_cache(maxsize=None)
def config_for(name: str):
    which = manifest()[name]["lattice"]
    if which == "default":
        return default_config()
    return load_config((CORPUS / which).read_text())


def source(name: str) -> str:
    return (CORPUS / name).read_text()


@functools.lru_cache(maxsize=None)
def checked(name: str):
    return check_source(source(name), config_for(name), name, keep_going=True)


def resolved(name: str):
    return elaborate_module(parse_module(source(name), name), config_for(name), GlobalEnv())
