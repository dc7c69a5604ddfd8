import json
from fractions import Fraction

import pytest

from spincs.cli import (
    EXIT_CAP,
    EXIT_CHECK,
    EXIT_OK,
    EXIT_SCHEMA,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def z4_file(tmp_path):
    return write(
        tmp_path, "z4.json", {"orders": [4], "q": {"gram": [["1/8"]]}, "fermion": [2]}
    )


@pytest.fixture
def ising_file(tmp_path):
    return write(
        tmp_path,
        "ising.json",
        {
            "simples": [
                {"label": "1", "dim": 1, "degree": 0, "fixed_by_f": False},
                {"label": "f", "dim": 1, "degree": 0, "fixed_by_f": False},
                {
                    "label": "s",
                    "dim": {"order": 8, "coeffs": ["0", "1", "0", "-1"]},
                    "degree": 1,
                    "fixed_by_f": True,
                },
            ],
            "fermion_dim": 1,
        },
    )


class TestGaussSum:
    def test_z4(self, capsys, z4_file):
        code, doc = run_cli(capsys, "gauss-sum", "--input", f"group={z4_file}")
        assert code == EXIT_OK
        result = doc["results"][0]
        assert result["sigma_mod_8"] == 1
        assert result["tau_plus"]["order"] == 8
        assert result["tau_plus"]["coeffs"] == ["0", "1", "0", "0"]
        assert result["tau_plus"]["float"]["re"].startswith("0.7071")
        assert result["tau_plus"]["float"]["im"].startswith("0.7071")

    def test_corpus(self, capsys):
        code, doc = run_cli(capsys, "gauss-sum", "--corpus")
        assert code == EXIT_OK
        assert len(doc["results"]) >= 5
        for entry in doc["results"]:
            assert entry["homogeneous"] and entry["nondegenerate"]
            assert entry["sigma_mod_8"] in range(8)


class TestDims:
    def test_ising_genus_one_tuple11(self, capsys, ising_file):
        code, doc = run_cli(
            capsys,
            "dims",
            "--input",
            f"summary={ising_file}",
            "--genus",
            "1",
            "--spin-tuple",
            "1,1",
        )
        assert code == EXIT_OK
        result = doc["results"][0]
        assert result["dim_plus"] == "0"
        assert result["dim_minus"] == "1"

    def test_pointed_all_tuples(self, capsys, z4_file):
        code, doc = run_cli(
            capsys, "dims", "--input", f"psm={z4_file}", "--genus", "2"
        )
        assert code == EXIT_OK
        assert len(doc["results"]) == 16
        assert all(r["dim_plus"] == "1" and r["dim_minus"] == "0" for r in doc["results"])


class TestInvariant:
    def test_lens_two(self, capsys, z4_file, tmp_path):
        surgery = write(tmp_path, "lens2.json", {"linking_matrix": [[2]]})
        code, doc = run_cli(
            capsys,
            "invariant",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_OK
        result = doc["results"][0]
        assert result["sublink_count"] == 2
        assert result["inertia"] == {"b_plus": 1, "b_minus": 0, "b_one": 0}
        values = {tuple(v["sublink"]): v["value"] for v in result["spin_invariants"]}
        assert values[(0,)]["order"] == 8  # zeta_8^-1

    def test_explicit_sublink(self, capsys, z4_file, tmp_path):
        surgery = write(
            tmp_path, "lens2s.json", {"linking_matrix": [[2]], "sublink": [1]}
        )
        code, doc = run_cli(
            capsys,
            "invariant",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_OK
        assert len(doc["results"][0]["spin_invariants"]) == 1

    def test_non_characteristic_sublink_rejected(self, capsys, z4_file, tmp_path):
        surgery = write(
            tmp_path, "bad.json", {"linking_matrix": [[1]], "sublink": [0]}
        )
        code, doc = run_cli(
            capsys,
            "invariant",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_SCHEMA
        assert "characteristic" in doc["error"]

    def test_three_torus_reports_both_normalisations(self, capsys, z4_file, tmp_path):
        surgery = write(
            tmp_path, "zero3.json", {"linking_matrix": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}
        )
        code, doc = run_cli(
            capsys,
            "invariant",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_OK
        entry = doc["results"][0]["spin_invariants"][0]
        assert entry["value"]["coeffs"][0] == "1"  # |G|/4 = 1
        assert entry["three_torus_closed_form"]["coeffs"][0] == "2"  # |G|/2 = 2


class TestClassify:
    def test_z4(self, capsys, z4_file):
        code, doc = run_cli(capsys, "classify", "--input", f"psm={z4_file}")
        assert code == EXIT_OK
        result = doc["results"][0]
        assert result["sigma_mod_8"] == 1
        assert result["group_invariant_factors"] == []
        assert result["shift_rep"] == [1]
        assert result["is_spin"] is True

    def test_invalid_fermion_is_schema_error(self, capsys, tmp_path):
        bad = write(
            tmp_path,
            "bad.json",
            {"orders": [4], "q": {"gram": [["1/8"]]}, "fermion": [1]},
        )
        code, doc = run_cli(capsys, "classify", "--input", f"psm={bad}")
        assert code == EXIT_SCHEMA
        assert "fermion" in doc["error"]

    def test_from_lattice_flag(self, capsys, tmp_path):
        lat = write(tmp_path, "lat.json", {"gram": [[1]], "w2": [1]})
        code, doc = run_cli(
            capsys, "classify", "--from-lattice", "--input", f"lattice={lat}"
        )
        assert code == EXIT_OK
        entry = doc["results"][0]
        assert entry["triple"]["sigma_mod_8"] == 1
        assert entry["reconstructed_psm"]["invariant_factors"] == [4]
        assert entry["reconstructed_psm"]["round_trip_matches"] is True


class TestLattice:
    def test_corpus(self, capsys):
        code, doc = run_cli(capsys, "lattice", "--corpus")
        assert code == EXIT_OK
        by_name = {entry["input"]: entry for entry in doc["results"]}
        a2 = next(v for k, v in by_name.items() if "a2" in k)
        assert a2["triple"]["is_spin"] is False
        assert "error" in a2["reconstructed_psm"]
        spin_entries = [v for k, v in by_name.items() if "a2" not in k]
        assert all(v["reconstructed_psm"]["round_trip_matches"] for v in spin_entries)


class TestMcg:
    def test_z4(self, capsys, z4_file):
        code, doc = run_cli(capsys, "mcg", "--input", f"psm={z4_file}")
        assert code == EXIT_OK
        result = doc["results"][0]
        assert result["restriction_check"] is True
        assert result["intertwiner"]["passed"] is True
        assert result["intertwiner"]["phase_order"] == 1
        sector = result["sectors"]["00"]
        assert sector["basis_labels"] == [[0]]
        assert sector["t"]["target_sector"] == [1, 0]


class TestCheckRefinement:
    def test_single_pair(self, capsys, z4_file, tmp_path):
        surgery = write(tmp_path, "lens3.json", {"linking_matrix": [[3]]})
        code, doc = run_cli(
            capsys,
            "check-refinement",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_OK
        assert doc["single_constant"] is True
        assert doc["results"][0]["passed"] is True

    def test_corpus(self, capsys):
        code, doc = run_cli(capsys, "check-refinement", "--corpus")
        assert code == EXIT_OK
        assert doc["single_constant"] is True
        for r in doc["results"]:
            if r["constant"] is not None:
                coeffs = r["constant"]["coeffs"]
                assert coeffs[0] == "1" and all(c == "0" for c in coeffs[1:])


class TestDeterminismAndErrors:
    def test_byte_identical_output(self, capsys, z4_file):
        code1 = main(["classify", "--input", f"psm={z4_file}"])
        out1 = capsys.readouterr().out
        code2 = main(["classify", "--input", f"psm={z4_file}"])
        out2 = capsys.readouterr().out
        assert code1 == code2 == EXIT_OK
        assert out1 == out2

    def test_missing_file(self, capsys):
        code, doc = run_cli(capsys, "gauss-sum", "--input", "group=/nope.json")
        assert code == EXIT_SCHEMA

    def test_unknown_role(self, capsys, z4_file):
        code, doc = run_cli(capsys, "gauss-sum", "--input", f"banana={z4_file}")
        assert code == EXIT_SCHEMA
        assert "banana" in doc["error"]

    def test_cap_exceeded(self, capsys, z4_file, tmp_path):
        rows = [[0] * 25 for _ in range(25)]
        surgery = write(tmp_path, "big.json", {"linking_matrix": rows})
        code, doc = run_cli(
            capsys,
            "invariant",
            "--input",
            f"psm={z4_file}",
            "--input",
            f"surgery={surgery}",
        )
        assert code == EXIT_CAP

    def test_corpus_files_all_validate(self, capsys):
        for command in ("gauss-sum", "dims", "classify", "lattice"):
            code, _ = run_cli(capsys, command, "--corpus")
            assert code == EXIT_OK
