import pytest

from alertfp.errors import SchemaError, ValueParseError
from alertfp.model import (
    Alert,
    AlertDataset,
    AttributeSchema,
    FieldKind,
    Item,
    SchemaField,
    canonicalize_value,
    itemize,
    snort_schema,
    split_timestamp,
)


def cat_schema(*names):
    return AttributeSchema(tuple(SchemaField(n, FieldKind.CATEGORICAL) for n in names))


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(SchemaError):
            cat_schema("a", "a")

    def test_empty_name_rejected(self):
        with pytest.raises(SchemaError):
            cat_schema("a", "")

    def test_items_per_alert_counts_timestamp_twice(self):
        schema = AttributeSchema(
            (
                SchemaField("sig", FieldKind.CATEGORICAL),
                SchemaField("port", FieldKind.NUMERIC),
                SchemaField("ts", FieldKind.TIMESTAMP),
                SchemaField("cid", FieldKind.IDENTIFIER),
                SchemaField("junk", FieldKind.IGNORE),
            )
        )
        assert schema.items_per_alert() == 4
        assert schema.itemizable_indexes() == (0, 1, 2)

    def test_field_index_lookup(self):
        schema = snort_schema()
        assert schema.field_index("cid") == 1
        with pytest.raises(SchemaError):
            schema.field_index("nope")


class TestCanonicalize:
    def test_numeric_strips_thousands_separators(self):
        assert canonicalize_value("46,865", FieldKind.NUMERIC) == "46865"

    def test_categorical_identity_on_clean_input(self):
        value = "WEB-MISC/doc/access"
        assert canonicalize_value(value, FieldKind.CATEGORICAL) == value

    def test_numeric_strips_leading_zeros(self):
        assert canonicalize_value("007", FieldKind.NUMERIC) == "7"

    def test_categorical_trims_whitespace_only(self):
        assert canonicalize_value("  a b  ", FieldKind.CATEGORICAL) == "a b"

    def test_numeric_garbage_raises(self):
        with pytest.raises(ValueParseError):
            canonicalize_value("80x", FieldKind.NUMERIC)

    @pytest.mark.parametrize("raw", ["", "   ", "null", "NULL", "Null"])
    def test_null_and_empty_become_null(self, raw):
        assert canonicalize_value(raw, FieldKind.NUMERIC) == "null"
        assert canonicalize_value(raw, FieldKind.CATEGORICAL) == "null"

    def test_underscores_are_not_digits(self):
        with pytest.raises(ValueParseError):
            canonicalize_value("1_0", FieldKind.NUMERIC)


class TestSplitTimestamp:
    def test_morning(self):
        assert split_timestamp("6/11/2010 8:57 AM") == ("6/11/2010", "8:57AM")

    def test_other_day(self):
        assert split_timestamp("8/11/2010 8:59 AM") == ("8/11/2010", "8:59AM")

    def test_midnight_boundary(self):
        assert split_timestamp("1/1/2000 12:00 AM") == ("1/1/2000", "12:00AM")

    def test_no_space_before_meridiem(self):
        assert split_timestamp("6/11/2010 8:57AM") == ("6/11/2010", "8:57AM")

    def test_seconds_dropped(self):
        assert split_timestamp("6/11/2010 8:57:31 AM") == ("6/11/2010", "8:57AM")

    def test_garbage_raises(self):
        with pytest.raises(ValueParseError):
            split_timestamp("2010-06-11T08:57")


class TestItem:
    def test_same_value_different_columns_distinct(self):
        assert Item(0, "6") != Item(9, "6")

    def test_equality_on_both_parts(self):
        assert Item(3, "80") == Item(3, "80")

    def test_ordering_is_index_then_value(self):
        assert Item(0, "b") < Item(1, "a")
        assert Item(1, "a") < Item(1, "b")


class TestItemize:
    def test_three_column_positional_items(self):
        schema = cat_schema("a", "b", "c")
        txn = itemize(Alert(0, ("1", "3", "4")), schema)
        assert txn.items == frozenset({Item(0, "1"), Item(1, "3"), Item(2, "4")})

    def test_all_ignore_schema_gives_empty_transaction(self):
        schema = AttributeSchema(
            (SchemaField("a", FieldKind.IGNORE), SchemaField("b", FieldKind.IGNORE))
        )
        txn = itemize(Alert(0, ("x", "y")), schema)
        assert txn.items == frozenset()

    def test_snort_row_yields_twelve_items_without_cid(self):
        row = (
            "7", "1", "508", "WEB-MISC/doc/access", "25", "2",
            "6/11/2010 8:57 AM", "1136881320", "2148203530", "6", "46,865", "80",
        )
        txn = itemize(Alert(0, row), snort_schema())
        expected = {
            Item(0, "7"),
            Item(2, "508"),
            Item(3, "WEB-MISC/doc/access"),
            Item(4, "25"),
            Item(5, "2"),
            Item(6, "6/11/2010"),
            Item(6, "8:57AM"),
            Item(7, "1136881320"),
            Item(8, "2148203530"),
            Item(9, "6"),
            Item(10, "46865"),
            Item(11, "80"),
        }
        assert txn.items == expected
        assert len(txn.items) == 12
        assert not any(item.field_index == 1 for item in txn.items)

    def test_field_count_mismatch_raises_schema_error(self):
        with pytest.raises(SchemaError):
            itemize(Alert(0, ("1", "2")), cat_schema("a", "b", "c"))

    def test_bad_timestamp_names_field_and_tid(self):
        schema = AttributeSchema((SchemaField("ts", FieldKind.TIMESTAMP),))
        with pytest.raises(ValueParseError) as info:
            itemize(Alert(7, ("yesterday",)), schema)
        assert "ts" in str(info.value)
        assert "7" in str(info.value)

    def test_null_timestamp_collapses_to_single_item(self):
        schema = AttributeSchema((SchemaField("ts", FieldKind.TIMESTAMP),))
        txn = itemize(Alert(0, ("null",)), schema)
        assert txn.items == frozenset({Item(0, "null")})

    def test_pure_function(self):
        schema = snort_schema()
        alert = Alert(
            2,
            ("7", "3", "508", "x", "25", "2", "8/11/2010 8:59 AM",
             "1", "2", "6", "34,075", "80"),
        )
        assert itemize(alert, schema) == itemize(alert, schema)

    def test_item_count_matches_schema_budget(self):
        schema = snort_schema()
        alert = Alert(
            0,
            ("7", "9", "508", "x", "25", "2", "8/11/2010 8:59 AM",
             "1", "2", "6", "34075", "80"),
        )
        assert len(itemize(alert, schema).items) == schema.items_per_alert()

    def test_distinct_field_indexes_except_timestamp(self):
        schema = snort_schema()
        alert = Alert(
            0,
            ("7", "9", "508", "x", "25", "2", "8/11/2010 8:59 AM",
             "1", "2", "6", "34075", "80"),
        )
        indexes = [item.field_index for item in itemize(alert, schema).items]
        ts_index = schema.field_index("timestamp")
        assert indexes.count(ts_index) == 2
        non_ts = [i for i in indexes if i != ts_index]
        assert len(non_ts) == len(set(non_ts))


class TestAlertDataset:
    def test_tids_must_be_positional(self):
        schema = cat_schema("a")
        with pytest.raises(ValueError):
            AlertDataset(schema, (Alert(1, ("x",)),))

    def test_transactions_cached_and_ordered(self):
        schema = cat_schema("a")
        ds = AlertDataset(schema, (Alert(0, ("x",)), Alert(1, ("y",))))
        first = ds.transactions()
        assert first is ds.transactions()
        assert [t.tid for t in first] == [0, 1]
