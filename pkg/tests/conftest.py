import textwrap
from pathlib import Path

import pytest

from ctypeinfer.registry import load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry()


@pytest.fixture
def write_java(tmp_path):
    def write(rel: str, text: str, root: Path = None) -> Path:
        base = root or tmp_path
        path = base / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text), encoding="utf-8")
        return path
    return write


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    from ctypeinfer.generator import generate_corpus
    root = tmp_path_factory.mktemp("corpus")
    return generate_corpus(root, n_projects=4, seed=7)


@pytest.fixture(scope="session")
def corpus_occurrences(corpus, registry):
    from ctypeinfer.extract import scan_project
    occs = []
    for name, path in corpus:
        occs.extend(scan_project(path, registry, name))
    return occs
