import json
from fractions import Fraction

import numpy as np
import pytest

from nullag import micropolar as mp
from nullag.cli import main
from nullag.rund import GenPoly, GeneratorSet, generator_set_to_json

Z81 = [0.0] * 81


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def iso_b_flat(b1, b2, b3):
    eye = np.eye(3)
    b = (
        b1 * np.einsum("ij,kl->ijkl", eye, eye)
        + b2 * np.einsum("ik,jl->ijkl", eye, eye)
        + b3 * np.einsum("il,jk->ijkl", eye, eye)
    )
    return [float(v) for v in b.reshape(-1)]


def minor_generator_json():
    nvars = 9
    def unit(var, sign=1):
        expo = [0] * nvars
        expo[var] = 1
        return GenPoly(nvars, {tuple(expo): Fraction(sign)})
    g = GeneratorSet([unit(3 + 4), unit(3 + 3, -1), GenPoly(nvars)], 6)
    return generator_set_to_json(g)


def test_check_zero_micropolar_passes(tmp_path, capsys):
    path = write(tmp_path, "m.json", {"model": "micropolar", "A": Z81, "B": Z81, "D": Z81})
    assert main(["check", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["report"]["passed"] is True


def test_check_isotropic_fails_naming_a_zero(tmp_path, capsys):
    path = write(
        tmp_path,
        "iso.json",
        {"model": "micropolar_isotropic", "lambda": 1.0, "mu": 1.0, "kappa": 1.0,
         "beta1": 0.0, "beta2": 0.0, "beta3": 0.0},
    )
    assert main(["check", path]) == 1
    payload = json.loads(capsys.readouterr().out)
    failing = {c["name"] for c in payload["report"]["checks"] if not c["passed"]}
    assert "A zero" in failing


def test_check_wrong_length_is_usage_error(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"model": "micropolar", "A": [0.0] * 80, "B": Z81, "D": Z81})
    assert main(["check", path]) == 2
    assert "81" in capsys.readouterr().err


def test_check_unknown_keys_rejected(tmp_path, capsys):
    path = write(
        tmp_path, "bad2.json",
        {"model": "micropolar", "A": Z81, "B": Z81, "D": Z81, "extra": 1},
    )
    assert main(["check", path]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_split_reports_table_and_counts(tmp_path, capsys):
    path = write(
        tmp_path, "isoB.json",
        {"model": "micropolar", "A": Z81, "B": iso_b_flat(1.0, 0.0, 2.0), "D": Z81},
    )
    code = main(["split", path])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1  # tilde part is nonzero, Cauchy-analogue relations fail
    assert payload["structural_zero_entries"] == 45
    assert payload["independent_entries"] == 18
    entry = {c["name"]: c for c in payload["cauchy_analogue"]["checks"]}["B~_1122"]
    assert entry["max_violation"] == pytest.approx(0.5)
    assert payload["B_ring"]["data"] == [0.0] * 81


def test_split_equal_betas_passes(tmp_path, capsys):
    path = write(
        tmp_path, "isoB2.json",
        {"model": "micropolar", "A": Z81, "B": iso_b_flat(1.0, 0.5, 1.0), "D": Z81},
    )
    assert main(["split", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cauchy_analogue"]["passed"] is True
    assert payload["B_tilde"]["data"] == [0.0] * 81


def test_split_round_trip_bit_exact(tmp_path, capsys):
    rng = np.random.default_rng(0)
    b = rng.uniform(-1, 1, (3, 3, 3, 3))
    b = 0.5 * (b + np.transpose(b, (2, 3, 0, 1)))
    path = write(
        tmp_path, "rand.json",
        {"model": "micropolar", "A": Z81, "B": [float(v) for v in b.reshape(-1)], "D": Z81},
    )
    main(["split", path])
    payload = json.loads(capsys.readouterr().out)
    tilde = np.array(payload["B_tilde"]["data"]).reshape(3, 3, 3, 3)
    assert np.array_equal(tilde, mp.split_B(b).b_tilde)


def test_split_rejects_non_micropolar(tmp_path, capsys):
    path = write(
        tmp_path, "qc.json", {"model": "quasicrystal", "C": Z81, "D": Z81, "E": Z81}
    )
    assert main(["split", path]) == 2


def test_certify_generator_file_passes(tmp_path, capsys):
    path = write(tmp_path, "gen.json", minor_generator_json())
    assert main(["certify", path, "--trials", "4"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["certificate"]["passed"] is True
    assert payload["certificate"]["path"] == "finite-difference"


def test_certify_em_coupling_fails(tmp_path, capsys):
    path = write(
        tmp_path, "em.json",
        {"model": "em_elast", "C": Z81, "P": [0.0] * 27, "Q": [0.0] * 27,
         "Ediel": [0.0] * 9, "Bperm": [0.0] * 9,
         "Acpl": [1.0, 0, 0, 0, 1.0, 0, 0, 0, 1.0]},
    )
    assert main(["certify", path, "--trials", "4"]) == 1


def test_certify_tilde_model_passes(tmp_path, capsys):
    tilde = mp.split_B(np.array(iso_b_flat(1.0, 0.0, 2.0)).reshape(3, 3, 3, 3)).b_tilde
    path = write(
        tmp_path, "tilde.json",
        {"model": "micropolar", "A": Z81, "B": [float(v) for v in tilde.reshape(-1)], "D": Z81},
    )
    assert main(["certify", path, "--trials", "4"]) == 0


def test_certify_deterministic_output(tmp_path, capsys):
    path = write(tmp_path, "gen.json", minor_generator_json())
    main(["certify", path, "--trials", "3", "--seed", "7"])
    first = capsys.readouterr().out
    main(["certify", path, "--trials", "3", "--seed", "7"])
    second = capsys.readouterr().out
    assert first == second


def test_text_format_same_verdict(tmp_path, capsys):
    path = write(tmp_path, "m.json", {"model": "micropolar", "A": Z81, "B": Z81, "D": Z81})
    assert main(["check", path, "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "passed: True" in out


def test_malformed_json_is_usage_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["check", str(path)]) == 2


def test_missing_file_is_usage_error(capsys):
    assert main(["check", "/nonexistent/file.json"]) == 2
