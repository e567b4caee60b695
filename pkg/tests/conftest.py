from __future__ import annotations

import pytest

from semweave.fixtures import fixture_text
from semweave.graph import Graph
from semweave.turtle import parse_turtle


@pytest.fixture(scope="session")
def excerpt_text() -> str:
    return fixture_text("catalog-excerpt.ttl")


@pytest.fixture(scope="session")
def excerpt_graph(excerpt_text: str) -> Graph:
    graph, diagnostics = parse_turtle(excerpt_text)
    assert diagnostics == []
    return graph


@pytest.fixture(scope="session")
def mobility_graph() -> Graph:
    graph, diagnostics = parse_turtle(fixture_text("mobility-catalog.ttl"))
    assert diagnostics == []
    return graph


@pytest.fixture(scope="session")
def domain_graph() -> Graph:
    graph, diagnostics = parse_turtle(fixture_text("mobility-domain.ttl"))
    assert diagnostics == []
    return graph


@pytest.fixture(scope="session")
def domain_model(domain_graph: Graph):
    from semweave.catalog import load_domain_model

    return load_domain_model(domain_graph)


@pytest.fixture()
def mobility_catalog(mobility_graph: Graph):
    from semweave.catalog import load_catalog

    catalog, diagnostics = load_catalog(mobility_graph)
    assert diagnostics == []
    return catalog


@pytest.fixture(scope="session")
def data_root():
    from semweave.fixtures import fixture_path

    return fixture_path("fcd.csv").parent


def build_speed_spec(catalog, dm):
    """The shipped end-to-end flow: FCD features joined with street segments."""
    from semweave.codes import ExtractorKind
    from semweave.dataspec import (
        ExtractFeature,
        IntegrateDatasets,
        SelectDataset,
        SelectFeatures,
        add_step,
        new_spec,
    )
    from semweave.vocab import SML

    spec = new_spec(catalog, spec_id="speed-prediction")
    for step in [
        SelectDataset(SML.FCDDataset),
        SelectFeatures(("speed", "time")),
        ExtractFeature("time", ExtractorKind.WEEKDAY),
        ExtractFeature("time", ExtractorKind.HOUR_OF_DAY),
        SelectDataset(SML.OSMDataset),
        SelectFeatures(("type", "maxSpeed")),
        IntegrateDatasets(0, 1),
    ]:
        spec, _ = add_step(spec, step, catalog, dm)
    return spec


@pytest.fixture()
def speed_spec(mobility_catalog, domain_model):
    return build_speed_spec(mobility_catalog, domain_model)
