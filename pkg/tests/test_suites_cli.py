import json

import pytest

from nclp.cli import main
from nclp.errors import ConfigInvalid, UnknownSuite
from nclp.suites import SUITES, SuiteConfig, run_suite


def _small_config(name):
    overrides = {
        "clarkson": {"sample_count": 60},
        "yeadon_roundtrip": {"sample_count": 4},
        "dichotomy": {"sample_count": 4},
        "classify_roundtrip": {"sample_count": 4},
        "state_restriction": {"sample_count": 4},
        "interpolation": {"sample_count": 120},
        "duality": {"sample_count": 4},
        "extrapolation": {"sample_count": 3},
        "lemma41": {"sample_count": 40},
        "expectation_detect": {"sample_count": 4},
    }
    return SuiteConfig(suite=name, seed=1, **overrides[name])


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes(name):
    report = run_suite(_small_config(name))
    assert report.passed, report.cases
    assert report.to_json()["schema"] == "nclp/1"
    assert all("pass" in case for case in report.cases)
    assert report.wall_time_s < 60.0


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_reports_deterministic(name):
    a = run_suite(_small_config(name)).dumps(include_timing=False)
    b = run_suite(_small_config(name)).dumps(include_timing=False)
    assert a == b


def test_unknown_suite_and_bad_config():
    with pytest.raises(UnknownSuite):
        run_suite(SuiteConfig(suite="nope"))
    with pytest.raises(ConfigInvalid):
        run_suite(SuiteConfig(suite="clarkson", exponents=[2.0]))
    with pytest.raises(ConfigInvalid):
        run_suite(SuiteConfig(suite="clarkson", sample_count=0))
    with pytest.raises(ConfigInvalid):
        run_suite(SuiteConfig(suite="duality", exponents=[0.5]))


def test_cli_gen_and_norm(tmp_path, capsys):
    alg_file = tmp_path / "alg.json"
    assert main(["gen", "algebra", "--blocks", "2,3", "-o", str(alg_file)]) == 0
    assert json.loads(alg_file.read_text())["blocks"] == [2, 3]

    state_file = tmp_path / "state.json"
    assert main(["gen", "state", "--blocks", "2", "--seed", "7", "-o", str(state_file)]) == 0

    # norm of rho^(1/3) prints one
    from nclp import serialize as ser
    from nclp.lp import state_power

    state = ser.state_from_json(ser.load(str(state_file)))
    vec_file = tmp_path / "vec.json"
    ser.dump(ser.lp_vector_to_json(state_power(state, 1 / 3)), str(vec_file))
    capsys.readouterr()
    assert main(["norm", str(vec_file), "--p", "3"]) == 0
    printed = capsys.readouterr().out.strip()
    assert abs(float(printed) - 1.0) < 1e-12


def test_cli_classify_roundtrip(tmp_path):
    data_file = tmp_path / "data.json"
    map_file = tmp_path / "map.json"
    report_file = tmp_path / "report.json"
    assert (
        main(
            [
                "gen",
                "isometry",
                "--seed",
                "4",
                "--p",
                "3",
                "-o",
                str(data_file),
                "--map-out",
                str(map_file),
            ]
        )
        == 0
    )
    from nclp import serialize as ser

    data = ser.isometry_data_from_json(ser.load(str(data_file)))
    state_file = tmp_path / "refstate.json"
    ser.dump(ser.state_to_json(data.reference_state), str(state_file))
    code = main(
        ["classify", str(map_file), "--state", str(state_file), "--p", "3", "-o", str(report_file)]
    )
    assert code == 0
    report = json.loads(report_file.read_text())
    assert report["verdict"] == "accept"
    assert set(report["defects"]) >= {
        "isometry",
        "two_isometry",
        "multiplicativity",
        "state_restriction",
        "reconstruction",
    }


def test_cli_classify_rejection_exits_one(tmp_path):
    # a halved identity is not an isometry
    import numpy as np

    from nclp import serialize as ser
    from nclp.algebra import make_algebra, random_faithful_state
    from nclp.lp import LpMap

    alg = make_algebra([2])
    map_file = tmp_path / "map.json"
    state_file = tmp_path / "state.json"
    ser.dump(ser.lp_map_to_json(LpMap(alg, alg, 3.0, 0.5 * np.eye(4))), str(map_file))
    ser.dump(ser.state_to_json(random_faithful_state(alg, 1)), str(state_file))
    assert main(["classify", str(map_file), "--state", str(state_file)]) == 1


def test_cli_error_paths_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["norm", str(bad), "--p", "3"]) == 2
    assert main(["norm", str(tmp_path / "missing.json"), "--p", "3"]) == 2
    assert main([]) == 2
    assert main(["verify", "--suite", "does-not-exist"]) == 2

    # p = 2 is rejected for classification
    import numpy as np

    from nclp import serialize as ser
    from nclp.algebra import make_algebra, random_faithful_state
    from nclp.lp import LpMap

    alg = make_algebra([2])
    map_file = tmp_path / "map2.json"
    state_file = tmp_path / "state2.json"
    ser.dump(ser.lp_map_to_json(LpMap(alg, alg, 2.0, np.eye(4))), str(map_file))
    ser.dump(ser.state_to_json(random_faithful_state(alg, 1)), str(state_file))
    assert main(["classify", str(map_file), "--state", str(state_file), "--p", "2"]) == 2


def test_cli_verify_pass_fail_and_determinism(tmp_path):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    args = ["verify", "--suite", "duality", "--seed", "1", "--samples", "3"]
    assert main(args + ["-o", str(r1)]) == 0
    assert main(args + ["-o", str(r2)]) == 0
    a = json.loads(r1.read_text())
    b = json.loads(r2.read_text())
    a.pop("wall_time_s")
    b.pop("wall_time_s")
    assert a == b

    # an absurd tolerance forces a failing verdict, exit code 1
    fail = main(
        [
            "verify",
            "--suite",
            "duality",
            "--seed",
            "1",
            "--samples",
            "2",
            "--tol",
            "identity=1e-30",
        ]
    )
    assert fail == 1
