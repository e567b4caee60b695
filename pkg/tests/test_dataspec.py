"""Specification building, schema inference, and persistence."""

from __future__ import annotations

import pytest

from semweave.codes import (
    ExtractorKind,
    IntegrationKind,
    SampleMethod,
    SemanticKind,
    SpecCode,
)
from semweave.dataspec import (
    DataSpecification,
    ExtractFeature,
    IntegrateDatasets,
    SampleRows,
    SelectDataset,
    SelectFeatures,
    add_step,
    infer_schema,
    load_spec,
    new_spec,
    replay,
    save_spec,
    step_from_json,
    step_to_json,
)
from semweave.errors import (
    SpecError,
    SpecFormatError,
    SpecReferenceError,
    SpecTypeError,
)
from semweave.fixtures import fixture_text
from semweave.terms import Iri
from semweave.vocab import SML

from conftest import build_speed_spec


def steps_of(*steps):
    return tuple(steps)


def spec_with(catalog, *steps) -> DataSpecification:
    from dataclasses import replace

    return replace(new_spec(catalog, spec_id="t"), steps=tuple(steps))


class TestSchemaInference:
    def test_empty_spec_has_empty_schema(self, mobility_catalog, domain_model):
        spec = new_spec(mobility_catalog, spec_id="empty")
        assert infer_schema(spec, mobility_catalog, domain_model) == ()

    def test_select_dataset_exposes_mapped_attributes_in_column_order(
            self, mobility_catalog, domain_model):
        spec = spec_with(mobility_catalog, SelectDataset(SML.FCDDataset))
        schema = infer_schema(spec, mobility_catalog, domain_model)
        # The unmapped "type" attribute (column 1) is not part of the schema.
        assert [c.name for c in schema] == ["vehicle id", "speed", "time", "lat", "lon"]
        assert [c.column_number for c in schema] == [0, 2, 3, 4, 5]
        assert all(c.source_dataset == SML.FCDDataset for c in schema)

    def test_column_kinds_follow_mapped_properties(
            self, mobility_catalog, domain_model):
        spec = spec_with(mobility_catalog, SelectDataset(SML.FCDDataset))
        schema = infer_schema(spec, mobility_catalog, domain_model)
        kinds = {c.name: c.kind for c in schema}
        assert kinds == {
            "vehicle id": SemanticKind.IDENTIFIER,
            "speed": SemanticKind.NUMBER,
            "time": SemanticKind.TIMESTAMP,
            "lat": SemanticKind.GEO_POINT,
            "lon": SemanticKind.GEO_POINT,
        }

    def test_full_flow_schema(self, speed_spec, mobility_catalog, domain_model):
        schema = infer_schema(speed_spec, mobility_catalog, domain_model)
        assert [c.name for c in schema] == [
            "speed", "time", "time (day)", "time (hour)", "type", "maxSpeed"]
        assert [c.kind for c in schema] == [
            SemanticKind.NUMBER, SemanticKind.TIMESTAMP, SemanticKind.CATEGORY,
            SemanticKind.NUMBER, SemanticKind.CATEGORY, SemanticKind.CATEGORY]
        assert [c.source_dataset for c in schema] == (
            [SML.FCDDataset] * 4 + [SML.OSMDataset] * 2)

    def test_extracted_columns_carry_provenance(
            self, speed_spec, mobility_catalog, domain_model):
        schema = infer_schema(speed_spec, mobility_catalog, domain_model)
        day = next(c for c in schema if c.name == "time (day)")
        assert day.extractor == ExtractorKind.WEEKDAY
        assert day.source_column == "time"
        assert day.column_number is None

    def test_sampling_is_a_schema_no_op(self, mobility_catalog, domain_model):
        base = spec_with(mobility_catalog, SelectDataset(SML.FCDDataset))
        sampled = spec_with(mobility_catalog, SelectDataset(SML.FCDDataset),
                            SampleRows(SampleMethod.HEAD, 2))
        assert (infer_schema(base, mobility_catalog, domain_model)
                == infer_schema(sampled, mobility_catalog, domain_model))

    def test_select_features_reorders(self, mobility_catalog, domain_model):
        spec = spec_with(mobility_catalog, SelectDataset(SML.FCDDataset),
                         SelectFeatures(("time", "speed")))
        schema = infer_schema(spec, mobility_catalog, domain_model)
        assert [c.name for c in schema] == ["time", "speed"]

    def test_schema_inference_is_deterministic(
            self, speed_spec, mobility_catalog, domain_model):
        first = infer_schema(speed_spec, mobility_catalog, domain_model)
        second = infer_schema(speed_spec, mobility_catalog, domain_model)
        assert first == second

    def test_extract_commutes_with_projection(self, mobility_catalog, domain_model):
        before = spec_with(
            mobility_catalog,
            SelectDataset(SML.FCDDataset),
            SelectFeatures(("speed", "time")),
            ExtractFeature("time", ExtractorKind.WEEKDAY))
        after = spec_with(
            mobility_catalog,
            SelectDataset(SML.FCDDataset),
            ExtractFeature("time", ExtractorKind.WEEKDAY),
            SelectFeatures(("speed", "time", "time (day)")))

        def shape(spec):
            # source_step records where a column was introduced, which
            # legitimately differs between the two orderings.
            return [(c.name, c.kind, c.mapped_property, c.mapped_domain,
                     c.source_dataset, c.column_number, c.extractor,
                     c.source_column)
                    for c in infer_schema(spec, mobility_catalog, domain_model)]

        assert shape(before) == shape(after)

    def test_join_qualifies_colliding_names(self, mobility_catalog, domain_model):
        spec = spec_with(
            mobility_catalog,
            SelectDataset(SML.FCDDataset),
            ExtractFeature("time", ExtractorKind.WEEKDAY, new_name="type"),
            SelectDataset(SML.OSMDataset),
            IntegrateDatasets(0, 1))
        schema = infer_schema(spec, mobility_catalog, domain_model)
        names = [c.name for c in schema]
        assert "FCDDataset.type" in names
        assert "OSMDataset.type" in names
        assert "type" not in names


class TestTypeErrors:
    def fail(self, catalog, dm, *steps) -> SpecError:
        with pytest.raises(SpecError) as info:
            infer_schema(spec_with(catalog, *steps), catalog, dm)
        return info.value

    def test_step_without_active_dataset(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model, SelectFeatures(("speed",)))
        assert err.code == SpecCode.NO_ACTIVE_LINEAGE
        assert err.step == 0

    def test_unknown_dataset(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(Iri("urn:nope")))
        assert err.code == SpecCode.UNKNOWN_DATASET
        assert isinstance(err, SpecReferenceError)

    def test_unknown_column(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectFeatures(("speed", "altitude")))
        assert err.code == SpecCode.UNKNOWN_COLUMN
        assert err.column == "altitude"
        assert err.step == 1

    def test_unmapped_column_is_not_selectable(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectFeatures(("type",)))
        assert err.code == SpecCode.UNKNOWN_COLUMN

    def test_duplicate_selection(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectFeatures(("speed", "speed")))
        assert err.code == SpecCode.DUPLICATE_COLUMN

    def test_empty_selection(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectFeatures(()))
        assert err.code == SpecCode.INVALID_PARAM

    def test_extractor_needs_timestamp_column(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        ExtractFeature("speed", ExtractorKind.WEEKDAY))
        assert err.code == SpecCode.EXTRACTOR_KIND_MISMATCH
        assert err.column == "speed"
        assert isinstance(err, SpecTypeError)

    def test_extract_name_collision(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        ExtractFeature("time", ExtractorKind.WEEKDAY,
                                       new_name="speed"))
        assert err.code == SpecCode.DUPLICATE_COLUMN
        assert err.column == "speed"

    def test_extract_from_unknown_column(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        ExtractFeature("missing", ExtractorKind.WEEKDAY))
        assert err.code == SpecCode.UNKNOWN_COLUMN

    def test_random_sample_needs_seed(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SampleRows(SampleMethod.RANDOM, 2))
        assert err.code == SpecCode.MISSING_SEED

    def test_sample_count_must_be_positive(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SampleRows(SampleMethod.HEAD, 0))
        assert err.code == SpecCode.INVALID_PARAM

    def test_seed_must_fit_64_bits(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SampleRows(SampleMethod.RANDOM, 2, seed=2**64))
        assert err.code == SpecCode.INVALID_PARAM

    def test_join_rejects_unknown_lineage(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        IntegrateDatasets(0, 5))
        assert err.code == SpecCode.UNKNOWN_LINEAGE

    def test_join_rejects_self_join(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        IntegrateDatasets(0, 0))
        assert err.code == SpecCode.INVALID_PARAM

    def test_join_rejects_consumed_lineage(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectDataset(SML.OSMDataset),
                        IntegrateDatasets(0, 1),
                        SelectDataset(SML.OSMDataset),
                        IntegrateDatasets(0, 3))
        assert err.code == SpecCode.LINEAGE_CONSUMED

    def test_join_needs_point_and_polyline(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectDataset(SML.FCDDataset),
                        IntegrateDatasets(0, 1))
        assert err.code == SpecCode.INTEGRATION_KIND_MISMATCH

    def test_join_distance_must_be_positive(self, mobility_catalog, domain_model):
        err = self.fail(mobility_catalog, domain_model,
                        SelectDataset(SML.FCDDataset),
                        SelectDataset(SML.OSMDataset),
                        IntegrateDatasets(0, 1, max_distance_meters=0.0))
        assert err.code == SpecCode.INVALID_PARAM

    def test_errors_are_reproducible(self, mobility_catalog, domain_model):
        codes = set()
        for _ in range(3):
            err = self.fail(mobility_catalog, domain_model,
                            SelectDataset(SML.FCDDataset),
                            ExtractFeature("speed", ExtractorKind.WEEKDAY))
            codes.add((err.code, err.column, err.step))
        assert codes == {(SpecCode.EXTRACTOR_KIND_MISMATCH, "speed", 1)}


class TestAddStep:
    def test_returns_extended_spec_and_schema(self, mobility_catalog, domain_model):
        spec = new_spec(mobility_catalog, spec_id="t")
        extended, schema = add_step(spec, SelectDataset(SML.FCDDataset),
                                    mobility_catalog, domain_model)
        assert len(extended.steps) == 1
        assert [c.name for c in schema][:2] == ["vehicle id", "speed"]

    def test_failure_leaves_input_unchanged(self, mobility_catalog, domain_model):
        spec = new_spec(mobility_catalog, spec_id="t")
        with pytest.raises(SpecTypeError):
            add_step(spec, SelectFeatures(("speed",)),
                     mobility_catalog, domain_model)
        assert spec.steps == ()

    def test_join_consumes_inputs(self, speed_spec, mobility_catalog, domain_model):
        state = replay(speed_spec, mobility_catalog, domain_model)
        assert state.lineages[0].consumed
        assert state.lineages[1].consumed
        assert not state.lineages[2].consumed


class TestStepJson:
    CASES = [
        SelectDataset(SML.FCDDataset),
        SampleRows(SampleMethod.HEAD, 5),
        SampleRows(SampleMethod.RANDOM, 3, seed=42),
        SelectFeatures(("speed", "time")),
        ExtractFeature("time", ExtractorKind.WEEKDAY),
        ExtractFeature("time", ExtractorKind.HOUR_OF_DAY, new_name="h"),
        IntegrateDatasets(0, 1, max_distance_meters=25.0),
    ]

    @pytest.mark.parametrize("step", CASES, ids=lambda s: type(s).__name__)
    def test_round_trip(self, step):
        assert step_from_json(step_to_json(step)) == step

    def test_unknown_kind(self):
        with pytest.raises(SpecFormatError) as info:
            step_from_json({"step": "transmogrify"})
        assert info.value.code == SpecCode.UNKNOWN_STEP_KIND
        assert "transmogrify" in str(info.value)

    def test_missing_field(self):
        with pytest.raises(SpecFormatError) as info:
            step_from_json({"step": "selectFeatures"})
        assert info.value.code == SpecCode.MALFORMED_DOCUMENT

    def test_wrong_field_type(self):
        with pytest.raises(SpecFormatError) as info:
            step_from_json({"step": "sampleRows", "method": "HEAD", "count": "2"})
        assert info.value.code == SpecCode.MALFORMED_DOCUMENT


class TestPersistence:
    def test_round_trip_identity(self, speed_spec, mobility_catalog, domain_model):
        document = save_spec(speed_spec)
        loaded, diagnostics = load_spec(document, mobility_catalog, domain_model)
        assert diagnostics == []
        assert loaded == speed_spec

    def test_save_is_line_oriented_json(self, speed_spec):
        import json

        lines = save_spec(speed_spec).splitlines()
        assert len(lines) == 1 + len(speed_spec.steps)
        header = json.loads(lines[0])
        assert header["format"] == "semweave-spec"
        assert header["version"] == 1
        for line in lines[1:]:
            json.loads(line)

    def test_save_is_deterministic(self, speed_spec):
        assert save_spec(speed_spec) == save_spec(speed_spec)

    def test_shipped_flow_document_matches_builder(
            self, mobility_catalog, domain_model):
        document = fixture_text("speed-prediction.jsonl")
        loaded, diagnostics = load_spec(document, mobility_catalog, domain_model)
        assert diagnostics == []
        assert loaded == build_speed_spec(mobility_catalog, domain_model)
        assert save_spec(loaded) == document

    def test_digest_drift_warns(self, mobility_catalog, domain_model, speed_spec):
        from dataclasses import replace

        drifted = replace(speed_spec, catalog_digest="0" * 64)
        _, diagnostics = load_spec(save_spec(drifted), mobility_catalog,
                                   domain_model)
        assert any("digest" in d.message for d in diagnostics)
        assert all(d.severity == "warning" for d in diagnostics)

    def test_catalog_iri_drift_warns(self, mobility_catalog, domain_model,
                                     speed_spec):
        from dataclasses import replace

        drifted = replace(speed_spec, catalog_iri="urn:other-catalog")
        _, diagnostics = load_spec(save_spec(drifted), mobility_catalog,
                                   domain_model)
        assert any("catalog" in d.message for d in diagnostics)

    def test_empty_document_rejected(self, mobility_catalog, domain_model):
        with pytest.raises(SpecFormatError) as info:
            load_spec("", mobility_catalog, domain_model)
        assert info.value.code == SpecCode.MALFORMED_DOCUMENT

    def test_bad_header_rejected(self, mobility_catalog, domain_model):
        with pytest.raises(SpecFormatError) as info:
            load_spec("not json\n", mobility_catalog, domain_model)
        assert info.value.code == SpecCode.MALFORMED_DOCUMENT

    def test_unknown_format_marker_rejected(self, mobility_catalog, domain_model):
        with pytest.raises(SpecFormatError) as info:
            load_spec('{"format": "other", "version": 1}\n',
                      mobility_catalog, domain_model)
        assert info.value.code == SpecCode.MALFORMED_DOCUMENT

    def test_future_version_rejected(self, mobility_catalog, domain_model):
        with pytest.raises(SpecFormatError) as info:
            load_spec('{"format": "semweave-spec", "version": 99}\n',
                      mobility_catalog, domain_model)
        assert info.value.code == SpecCode.VERSION_MISMATCH

    def test_invalid_step_fails_replay_on_load(
            self, mobility_catalog, domain_model, speed_spec):
        from dataclasses import replace

        bad = replace(speed_spec, steps=speed_spec.steps + (
            SelectFeatures(("no-such-column",)),))
        with pytest.raises(SpecTypeError) as info:
            load_spec(save_spec(bad), mobility_catalog, domain_model)
        assert info.value.code == SpecCode.UNKNOWN_COLUMN


class TestNewSpec:
    def test_records_catalog_identity(self, mobility_catalog):
        spec = new_spec(mobility_catalog)
        assert spec.catalog_iri == "https://simple-ml.de/vocab/SimpleMLCatalog"
        assert len(spec.catalog_digest) == 64
        assert spec.steps == ()

    def test_generated_ids_are_unique(self, mobility_catalog):
        assert new_spec(mobility_catalog).id != new_spec(mobility_catalog).id
