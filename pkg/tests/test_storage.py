"""
Unit tests for formula persistence.
"""

import json
from fractions import Fraction

import pytest

from machin_forge.errors import FormulaFormatError
from machin_forge.machin import build_two_term_formula, get_builtin, verify_formula
from machin_forge.models import MachinFormula, TwoTermFormula
from machin_forge.storage import formula_document, load_formula, parse_formula, save_formula


class TestFormulaDocument:
    """Test the JSON shape of formulas."""

    def test_two_term_shape(self):
        doc = formula_document(build_two_term_formula(3))
        assert doc == {"k": 3, "u1": "5", "u2": {"num": "-239", "den": "1"}}

    def test_generic_shape(self):
        doc = formula_document(get_builtin("machin"))
        assert doc["terms"][0] == {"a": "4", "b": {"num": "5", "den": "1"}}
        assert doc["terms"][1] == {"a": "-1", "b": {"num": "239", "den": "1"}}


class TestSaveLoad:
    """Test saving and loading formulas."""

    def test_two_term(self, tmp_path):
        formula = build_two_term_formula(6)
        path = save_formula(formula, tmp_path / "k6.json")
        loaded = load_formula(path)
        assert loaded == formula
        assert verify_formula(loaded)
        assert not list(tmp_path.glob("*.tmp"))

    def test_generic(self, tmp_path):
        formula = MachinFormula.from_pairs(
            [(1, 4), (1, Fraction(9, 2)), (1, Fraction(11, 2)), (1, 7)]
        )
        loaded = load_formula(save_formula(formula, tmp_path / "id9.json"))
        assert loaded.as_pairs() == formula.as_pairs()

    def test_creates_parent(self, tmp_path):
        path = save_formula(get_builtin("kanada2"), tmp_path / "nested" / "kanada2.json")
        assert path.exists()

    def test_hand_written(self, tmp_path):
        path = tmp_path / "machin.json"
        path.write_text('{"terms": [{"a": 4, "b": 5}, {"a": "-1", "b": "239/1"}]}')
        assert verify_formula(load_formula(path))


class TestSidecars:
    """Test externalized huge integers."""

    def test_round_trip(self, tmp_path):
        formula = build_two_term_formula(6)
        path = save_formula(formula, tmp_path / "k6.json", sidecar_threshold=10)

        doc = json.loads(path.read_text())
        numerator = doc["u2"]["num"]
        assert set(numerator) == {"path", "sha256", "digits"}
        assert numerator["digits"] == 52
        assert (tmp_path / numerator["path"]).exists()
        assert load_formula(path) == formula

    def test_digest_mismatch(self, tmp_path):
        path = save_formula(build_two_term_formula(6), tmp_path / "k6.json", sidecar_threshold=10)
        sidecar = tmp_path / json.loads(path.read_text())["u2"]["num"]["path"]
        sidecar.write_text(sidecar.read_text().replace("9", "8"))
        with pytest.raises(FormulaFormatError):
            load_formula(path)

    def test_missing_sidecar(self, tmp_path):
        path = save_formula(build_two_term_formula(6), tmp_path / "k6.json", sidecar_threshold=10)
        for sidecar in tmp_path.glob("*.txt"):
            sidecar.unlink()
        with pytest.raises(FormulaFormatError):
            load_formula(path)


class TestMalformed:
    """Test rejection of malformed documents."""

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(FormulaFormatError):
            load_formula(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormulaFormatError):
            load_formula(tmp_path / "absent.json")

    @pytest.mark.parametrize(
        "doc",
        [
            [],
            {"k": 3, "u1": "5"},
            {"k": 3, "u1": "5", "u2": {"num": "-239", "den": "0"}},
            {"k": 3, "u1": "five", "u2": "-239"},
            {"terms": [{"a": "x", "b": "5"}]},
            {"terms": [{"a": "1", "b": "0"}]},
            {"terms": []},
        ],
    )
    def test_rejected(self, doc, tmp_path):
        with pytest.raises(FormulaFormatError):
            parse_formula(doc, tmp_path)

    def test_integer_fields_accept_strings(self):
        formula = parse_formula({"k": "3", "u1": "5", "u2": "-239"})
        assert formula == TwoTermFormula(k=3, u1=5, u2=-239)
