import json

import pytest

from icqam.cli import main
from conftest import FIXTURE_DIR

SEVEN = str(FIXTURE_DIR / "seven_user.json")
FIVE_L3 = str(FIXTURE_DIR / "five_user_len3.json")
FIVE_IDENTITY = str(FIXTURE_DIR / "five_user_identity.json")


def data_rows(text: str) -> list[str]:
    return [
        ln
        for ln in text.splitlines()
        if ln and not ln.startswith("#")
    ]


class TestValidate:
    def test_good_fixture(self, capsys):
        assert main(["validate", SEVEN]) == 0
        out = capsys.readouterr().out
        assert "valid: True" in out
        assert "single_unicast: True" in out

    def test_invalid_file_exit_2_with_json_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 2, "receivers": [{"wants": [1], "knows": [1]}]}')
        assert main(["validate", str(bad)]) == 2
        err = capsys.readouterr().err
        payload = json.loads(err)
        assert payload["error"] == "validation"
        assert "overlap" in payload["detail"]

    def test_missing_file_exit_2(self, capsys):
        assert main(["validate", "no/such/file.json"]) == 2
        assert json.loads(capsys.readouterr().err)["error"] == "validation"


class TestMinrank:
    def test_prints_value(self, capsys):
        assert main(["minrank", SEVEN]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "minrank: 4"

    def test_json_artifact(self, tmp_path, capsys):
        out_path = tmp_path / "minrank.json"
        assert main(["minrank", FIVE_L3, "--out", str(out_path)]) == 0
        capsys.readouterr()
        data = json.loads(out_path.read_text())
        assert data["minrank"] == 3
        assert len(data["witness_L"]) == 5


class TestAnalyze:
    def test_known_transmissions_and_flags(self, capsys):
        assert main(["analyze", SEVEN]) == 0
        rows = data_rows(capsys.readouterr().out)
        assert rows[0] == (
            "receiver,known_transmissions,eta,sicg_vs_length,prioritized_vs_minrank"
        )
        assert rows[1] == "1,2;3;4,1,true,true"
        assert rows[7] == "7,,4,false,false"

    def test_byte_identical_across_runs(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["analyze", SEVEN, "--out", str(a)]) == 0
        assert main(["analyze", SEVEN, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_code_falls_back_to_minrank_witness(self, tmp_path, capsys):
        no_code = tmp_path / "bare.json"
        no_code.write_text(
            '{"n": 2, "receivers": '
            '[{"wants": [1], "knows": [2]}, {"wants": [2], "knows": [1]}]}'
        )
        assert main(["analyze", str(no_code)]) == 0
        out = capsys.readouterr().out
        assert "# code_source: minrank-witness" in out
        assert "# l: 1" in out


class TestMapCommand:
    def test_csv_output(self, tmp_path):
        out = tmp_path / "mapping.csv"
        assert main(["map", SEVEN, "--out", str(out)]) == 0
        rows = data_rows(out.read_text())
        assert rows[0] == "codeword_bits,point_index,I,Q"
        assert len(rows) == 17

    def test_json_output_with_seed(self, tmp_path):
        out = tmp_path / "mapping.json"
        assert main(["map", SEVEN, "--out", str(out), "--map-seed", "4"]) == 0
        data = json.loads(out.read_text())
        assert data["seed"] == 4 and data["l"] == 4
        assert data["threshold"] == 4

    def test_threshold_option(self, tmp_path):
        out = tmp_path / "mapping.json"
        assert main(["map", FIVE_IDENTITY, "--out", str(out), "--threshold", "length"]) == 0
        assert json.loads(out.read_text())["threshold"] == 5


class TestDistances:
    def test_five_user_8qam_row(self, capsys):
        assert main(["distances", FIVE_L3]) == 0
        rows = data_rows(capsys.readouterr().out)
        dmins = [float(r.split(",")[2]) for r in rows[1:]]
        assert dmins == pytest.approx([9.6, 4.8, 2.4, 2.4, 2.4], abs=5e-3)

    def test_brackets_flag_in_provenance(self, capsys):
        assert main(["distances", SEVEN]) == 0
        out = capsys.readouterr().out
        assert "# brackets_ok: true" in out


class TestSimulate:
    def test_csv_schema_and_determinism(self, tmp_path):
        argv = [
            "simulate", SEVEN,
            "--scheme", "binary",
            "--snr-start", "8", "--snr-stop", "10", "--snr-step", "2",
            "--trials", "2000", "--seed", "5",
        ]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        rows = data_rows(a.read_text())
        assert rows[0] == "scheme,receiver,snr_db,trials,errors,error_rate,stderr"
        assert len(rows) == 1 + 7 * 2

    def test_receiver_filter(self, tmp_path):
        out = tmp_path / "r.csv"
        argv = [
            "simulate", SEVEN,
            "--scheme", "qam-mapped",
            "--snr-start", "10", "--snr-stop", "10",
            "--trials", "1000", "--receivers", "1,7",
            "--out", str(out),
        ]
        assert main(argv) == 0
        rows = data_rows(out.read_text())
        receivers = {r.split(",")[1] for r in rows[1:]}
        assert receivers == {"1", "7"}

    def test_undecodable_binary_is_runtime_error(self, tmp_path, capsys):
        bad = tmp_path / "undecodable.json"
        bad.write_text(
            '{"n": 2, "receivers": [{"wants": [2], "knows": []}], "L": [[1], [0]]}'
        )
        code = main(
            [
                "simulate", str(bad),
                "--scheme", "binary",
                "--snr-start", "10", "--snr-stop", "10",
                "--trials", "10",
            ]
        )
        assert code == 3
        assert json.loads(capsys.readouterr().err)["error"] == "runtime"


class TestFormula:
    def test_includes_16qam_value(self, capsys):
        assert main(["formula", "--from", "2", "--to", "6"]) == 0
        rows = data_rows(capsys.readouterr().out)
        table = {int(r.split(",")[0]): float(r.split(",")[2]) for r in rows[1:]}
        assert table[4] == pytest.approx(1.6, abs=5e-4)
        assert table[3] == pytest.approx(2.4, abs=5e-4)
        assert table[5] == pytest.approx(0.952, abs=5e-4)

    def test_bad_range(self, capsys):
        assert main(["formula", "--from", "5", "--to", "3"]) == 2
