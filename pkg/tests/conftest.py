import io

import pytest

from contrafact import corpus, synthgen
from contrafact.corpus import CorpusConfig, load_config, read_corpus


def make_snapshot(pubs_text: str, edges_text: str, config: CorpusConfig):
    pubs = corpus.load_publications(io.StringIO(pubs_text))
    edges = corpus.load_edges(io.StringIO(edges_text))
    return corpus.build_snapshot(pubs, edges, config)


def pub_line(pid, year, doc_type="article", categories=("C1",), countries=("AAA",),
             refs_total=0):
    import json
    return json.dumps({
        "id": pid, "year": year, "doc_type": doc_type,
        "categories": list(categories), "countries": list(countries),
        "refs_total": refs_total,
    }, separators=(",", ":")) + "\n"


@pytest.fixture(scope="session")
def preset_corpus(tmp_path_factory):
    """Generate each preset once per session; returns (snapshot, paths)."""
    cache = {}

    def build(name):
        if name not in cache:
            out = tmp_path_factory.mktemp(f"preset_{name}")
            paths = synthgen.generate_files(synthgen.preset(name), out)
            snap = read_corpus(paths["pubs"], paths["edges"],
                               load_config(paths["config"]))
            cache[name] = (snap, paths)
        return cache[name]

    return build
