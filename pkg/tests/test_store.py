import random

import pytest

from alertfp.errors import (
    EmptyPatternSetError,
    ModelFormatError,
    SchemaMismatchError,
)
from alertfp.miner import MiningConfig, mine
from alertfp.model import (
    Alert,
    AlertDataset,
    AttributeSchema,
    FieldKind,
    SchemaField,
    snort_schema,
)
from alertfp.scorer import rank
from alertfp.store import (
    ClassifierModel,
    load_model,
    save_model,
    schema_fingerprint,
    score_new,
)

from conftest import random_schema_dataset

FIXED_TIME = "2010-06-22T00:00:00+00:00"


@pytest.fixture
def sample_model(sample_dataset):
    fps = mine(sample_dataset, MiningConfig(minisupport=2))
    return ClassifierModel.from_pattern_set(
        fps, sample_dataset.schema, built_at=FIXED_TIME
    )


class TestFingerprint:
    def test_stable_for_equal_schemas(self):
        assert schema_fingerprint(snort_schema()) == schema_fingerprint(snort_schema())

    def test_sensitive_to_layout(self):
        a = AttributeSchema((SchemaField("x", FieldKind.CATEGORICAL),))
        b = AttributeSchema((SchemaField("x", FieldKind.NUMERIC),))
        assert schema_fingerprint(a) != schema_fingerprint(b)


class TestModelBuild:
    def test_basket_model_metadata(self, baskets4):
        fps = mine(baskets4, MiningConfig(minisupport=0.5))
        schema = AttributeSchema((SchemaField("basket", FieldKind.CATEGORICAL),))
        model = ClassifierModel.from_pattern_set(fps, schema)
        assert model.pattern_count == 9
        assert model.n_train == 4
        assert model.minisupport_abs == 2

    def test_sample_model_pattern_count(self, sample_model):
        assert sample_model.pattern_count == 319
        assert sample_model.n_train == 3

    def test_empty_pattern_set_refused_with_guidance(self, baskets4):
        empty = mine(baskets4, MiningConfig(minisupport=4))
        schema = AttributeSchema((SchemaField("basket", FieldKind.CATEGORICAL),))
        with pytest.raises(EmptyPatternSetError) as info:
            ClassifierModel.from_pattern_set(empty, schema)
        assert "minisupport" in str(info.value)


class TestSaveLoad:
    def test_round_trip_equality(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        assert load_model(path) == sample_model

    def test_second_save_is_byte_identical(self, sample_model, tmp_path):
        first, second = tmp_path / "a.fps", tmp_path / "b.fps"
        save_model(sample_model, first)
        save_model(load_model(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_header_layout(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# alertfp-model v1"
        assert lines[1] == "n_train=3"
        assert lines[2] == "minisupport=2"
        assert lines[3].startswith("schema_fp=")
        assert lines[4] == f"built_at={FIXED_TIME}"
        assert lines[5] == "patterns=319"
        support, items = lines[6].split("\t")
        assert support.isdigit()
        assert "=" in items

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "model.fps"
        path.write_text("# alertfp-model v999\nn_train=4\n", encoding="utf-8")
        with pytest.raises(ModelFormatError) as info:
            load_model(path)
        assert "v999" in str(info.value)

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "model.fps"
        path.write_text("hello\n", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_support_above_n_train_is_invariant_breach(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        body = lines[6].split("\t")
        body[0] = "99"
        lines[6] = "\t".join(body)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ModelFormatError) as info:
            load_model(path)
        assert "99" in str(info.value)

    def test_corrupted_row_reports_line_number(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[8] = "garbage without structure"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ModelFormatError) as info:
            load_model(path)
        assert info.value.line_number == 9

    def test_pattern_count_mismatch_detected(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        del lines[6]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_values_with_delimiters_escape_cleanly(self, tmp_path):
        schema = AttributeSchema(
            (
                SchemaField("sig", FieldKind.CATEGORICAL),
                SchemaField("note", FieldKind.CATEGORICAL),
            )
        )
        nasty = "a=b,c%d\te"
        ds = AlertDataset(
            schema, (Alert(0, ("x", nasty)), Alert(1, ("x", nasty)))
        )
        fps = mine(ds, MiningConfig(minisupport=2))
        model = ClassifierModel.from_pattern_set(fps, schema, built_at=FIXED_TIME)
        path = tmp_path / "model.fps"
        save_model(model, path)
        assert load_model(path) == model

    def test_tidlists_persisted_when_asked(self, sample_dataset, tmp_path):
        fps = mine(sample_dataset, MiningConfig(minisupport=2))
        model = ClassifierModel.from_pattern_set(
            fps, sample_dataset.schema, built_at=FIXED_TIME, include_tidlists=True
        )
        path = tmp_path / "model.fps"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded == model
        assert loaded.tidlists is not None
        assert loaded.tidlists[0] == fps.patterns[0].tidlist

    def test_atomic_write_replaces_not_appends(self, sample_model, tmp_path):
        path = tmp_path / "model.fps"
        save_model(sample_model, path)
        first = path.read_bytes()
        save_model(sample_model, path)
        assert path.read_bytes() == first
        assert not list(tmp_path.glob("*.tmp"))


class TestScoreNew:
    def test_training_set_scores_identically_to_rank(self, sample_dataset, sample_model):
        fps = mine(sample_dataset, MiningConfig(minisupport=2))
        direct = rank(sample_dataset, fps)
        via_model = score_new(sample_dataset, sample_model)
        assert direct == via_model

    def test_unseen_signature_ranks_first(self, sample_dataset, sample_model):
        novel = Alert(
            3,
            ("3", "99", "999", "EXPLOIT/brand-new", "77", "9",
             "9/9/2010 3:33 PM", "42", "43", "17", "1", "1"),
        )
        extended = AlertDataset(
            sample_dataset.schema, sample_dataset.alerts + (novel,)
        )
        ranked = score_new(extended, sample_model)
        assert ranked[0].tid == 3
        assert ranked[0].simple_fpof == 0
        assert ranked[0].fpof == 0.0

    def test_duplicating_pattern_relevant_items_reproduces_score(
        self, sample_dataset, sample_model
    ):
        # same items as t2 except the identifier and the unique-valued
        # columns; stored patterns never mention those, so the score matches
        t2 = sample_dataset.alerts[1].values
        clone = list(t2)
        clone[1] = "77"           # cid (identifier)
        clone[7] = "999999999"    # ip_src, unique in training
        clone[10] = "59,999"      # sport, unique in training
        extended = AlertDataset(
            sample_dataset.schema, sample_dataset.alerts + (Alert(3, tuple(clone)),)
        )
        ranked = score_new(extended, sample_model)
        by_tid = {sa.tid: sa for sa in ranked}
        assert by_tid[3].simple_fpof == by_tid[1].simple_fpof == 319
        assert by_tid[3].fpof == by_tid[1].fpof

    def test_identifier_change_never_moves_score(self, sample_dataset, sample_model):
        mutated = [list(a.values) for a in sample_dataset.alerts]
        for row in mutated:
            row[1] = str(int(row[1]) + 500)
        remade = AlertDataset(
            sample_dataset.schema,
            tuple(Alert(i, tuple(row)) for i, row in enumerate(mutated)),
        )
        assert score_new(remade, sample_model) == score_new(sample_dataset, sample_model)

    def test_fingerprint_gate(self, sample_dataset, sample_model):
        other_schema = AttributeSchema(
            tuple(
                SchemaField(f.name, FieldKind.CATEGORICAL)
                for f in sample_dataset.schema.fields
            )
        )
        remade = AlertDataset(other_schema, sample_dataset.alerts)
        with pytest.raises(SchemaMismatchError):
            score_new(remade, sample_model)
        forced = score_new(remade, sample_model, force_schema=True)
        assert len(forced) == 3

    def test_ratio_denominator_is_training_size(self, sample_dataset, sample_model):
        single = AlertDataset(sample_dataset.schema, sample_dataset.alerts[:1])
        scored = score_new(single, sample_model)[0]
        direct = rank(sample_dataset, mine(sample_dataset, MiningConfig(minisupport=2)))
        assert scored.fpof == next(sa for sa in direct if sa.tid == 0).fpof


class TestRandomizedPersistence:
    def test_round_trip_and_self_consistency_corpus(self, tmp_path):
        rng = random.Random(0xC0DE)
        done = 0
        while done < 20:
            ds = random_schema_dataset(rng)
            fps = mine(ds, MiningConfig(minisupport=rng.randint(1, ds.n)))
            if fps.count == 0:
                continue
            model = ClassifierModel.from_pattern_set(
                fps, ds.schema, built_at=FIXED_TIME
            )
            first = tmp_path / f"m{done}a.fps"
            second = tmp_path / f"m{done}b.fps"
            save_model(model, first)
            save_model(load_model(first), second)
            assert first.read_bytes() == second.read_bytes()
            assert score_new(ds, model) == rank(ds, fps)
            done += 1
