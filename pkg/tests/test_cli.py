import csv
import io

import pytest

from mlsm.check import is_stable
from mlsm.cli import CSV_COLUMNS, ExperimentConfig, rows_to_csv, run_cli, run_experiment, sample_seed
from mlsm.core import Concept, format_profile, parse_matching, parse_profile, random_profile
from mlsm.fixtures import fixture_names, load_fixture
from mlsm.reduce import Digraph, format_digraph, parse_digraphs


def cli(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_documented_exit_codes(capsys):
    assert cli(capsys, "check", "--concept", "individual", "--alpha", "2", "FIX-INTRO", "M1")[:2] == (0, "holds\n")
    assert cli(capsys, "solve", "--concept", "individual", "--alpha", "3", "FIX-INTRO")[:2] == (1, "none\n")
    code, out, err = cli(capsys, "check", "--concept", "global", "--alpha", "5", "FIX-D", "M1")
    assert code == 2 and out == "" and "out of range" in err


@pytest.mark.parametrize("name", [n for n in fixture_names() if n != "FIX-SM"])
def test_exit_codes_match_checker(capsys, name):
    fx = load_fixture(name)
    for key, m in fx.matchings.items():
        for c in Concept:
            for a in range(1, fx.profile.layers + 1):
                code, out, _ = cli(capsys, "check", "--concept", c.value, "--alpha", str(a), name, key)
                want = is_stable(fx.profile, m, c, a).holds
                assert code == (0 if want else 1)
                assert out == ("holds\n" if want else "fails\n")


def test_inline_matching_and_verbose(capsys):
    code, out, err = cli(capsys, "--verbose", "check", "--concept", "individual", "--alpha", "2", "FIX-INTRO", "2,1")
    assert code == 1 and out == "fails\n"
    assert "witness pair u1 w1" in err


def test_solve_and_enumerate_output(capsys):
    code, out, _ = cli(capsys, "solve", "--concept", "individual", "--alpha", "2", "FIX-A")
    assert code == 0 and parse_matching(out).vector == (3, 1, 2)
    code, out, _ = cli(capsys, "enumerate", "--concept", "global", "--alpha", "1", "FIX-A")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, err = cli(capsys, "solve", "--verbose", "--concept", "global", "--alpha", "1", "FIX-A")
    assert "gale_shapley" in err and "proposals" in err


def test_profile_file_and_errors(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text(format_profile(random_profile(3, 2, "general", 1)))
    code, out, _ = cli(capsys, "solve", "--concept", "pair", "--alpha", "1", str(f))
    assert code == 0 and out.startswith("matching : ")
    bad = tmp_path / "bad.txt"
    bad.write_text("mlsm 1\nagents 2\nlayers 1\nlayer 1\nU 1 : 1 1\n")
    code, out, err = cli(capsys, "solve", "--concept", "pair", "--alpha", "1", str(bad))
    assert code == 2 and out == "" and "bad.txt" in err
    bad.write_text("mlsm 1\nagents 2\nlayers one\n")
    code, _, err = cli(capsys, "solve", "--concept", "pair", "--alpha", "1", str(bad))
    assert code == 2 and "line 3" in err
    assert cli(capsys, "solve", "--concept", "pair", "--alpha", "1", str(tmp_path / "missing"))[0] == 2
    assert cli(capsys, "frobnicate")[0] == 2
    assert cli(capsys, "check", "--concept", "pair", "--alpha", "1", "FIX-A", "M9")[0] == 2


def test_brute_cap_flag(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("MLSM_BRUTE_CAP", raising=False)
    f = tmp_path / "p.txt"
    f.write_text(format_profile(random_profile(9, 3, "general", 2)))
    code, _, err = cli(capsys, "solve", "--concept", "pair", "--alpha", "2", str(f))
    assert code == 2 and "brute-force cap" in err
    code, _, _ = cli(capsys, "--brute-cap", "9", "enumerate", "--limit", "1", "--concept", "pair", "--alpha", "2", str(f))
    assert code in (0, 1)


def test_reduce_commands(capsys, tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 1 0\n-1 -1 0\n")
    code, out, _ = cli(capsys, "reduce", "sat2global", str(cnf))
    assert code == 0 and parse_profile(out).n == 2 + 3 * 2
    plain = tmp_path / "g.cnf"
    plain.write_text("p cnf 2 1\n1 -2 0\n")
    assert cli(capsys, "reduce", "sat2global", str(plain))[0] == 2
    code, out, _ = cli(capsys, "reduce", "sat2global", "--restrict", "--alpha", "2", "--layers", "3", str(plain))
    assert code == 0 and parse_profile(out).layers == 3
    smti = tmp_path / "s.smti"
    smti.write_text("smti 1\nU 1 : w1\nW 1 : u1\n")
    code, out, _ = cli(capsys, "reduce", "smti2individual", str(smti))
    assert code == 0 and out.startswith("# alpha 2\n") and parse_profile(out).n == 5
    code, out, _ = cli(capsys, "reduce", "smti2pair", str(smti))
    assert code == 0 and out.startswith("# alpha 3\n") and parse_profile(out).layers == 5
    g = tmp_path / "g.txt"
    g.write_text("p graph 3 2\ne 1 2\ne 2 3\n")
    code, out, _ = cli(capsys, "reduce", "is2global", "--k", "2", str(g))
    assert code == 0 and parse_profile(out).n == 9
    p4 = tmp_path / "p4.txt"
    p4.write_text("p graph 4 3\ne 1 2\ne 2 3\ne 3 4\n")
    code, out, _ = cli(capsys, "reduce", "gi2individual", str(p4), str(p4))
    prof = parse_profile(out)
    assert code == 0 and prof.n == 19 and prof.layers == 226 and prof.labels


def test_gen_and_induce_round_trip(capsys, tmp_path):
    g, h = Digraph.of(3, [(1, 2), (2, 3)]), Digraph.of(3, [(3, 1), (1, 2)])
    f = tmp_path / "d.txt"
    f.write_text(format_digraph(g) + format_digraph(h))
    code, out, _ = cli(capsys, "gen", "mcgarvey", str(f))
    assert code == 0
    prof = tmp_path / "mc.txt"
    prof.write_text(out)
    code, out, _ = cli(capsys, "induce", "--alpha", "2", str(prof))
    assert code == 0 and parse_digraphs(out) == [g, h]
    assert cli(capsys, "induce", "--alpha", "1", "FIX-A")[0] == 2


# -- experiment ----------------------------------------------------------------------------


def test_experiment_config_guards():
    with pytest.raises(ValueError):
        ExperimentConfig(2, 2, 3, "pair")
    with pytest.raises(ValueError):
        ExperimentConfig(2, 2, 1, "pair", samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(2, 2, 1, "nope")


def test_global_one_always_exists():
    row = run_experiment(ExperimentConfig(4, 3, 1, "global", samples=200, seed=3))[0]
    assert row.existence_rate == 1.0


def test_experiment_deterministic_across_runs_and_workers():
    cfg = ExperimentConfig(2, 2, 2, "pair", samples=2000, seed=1)
    a = rows_to_csv(run_experiment(cfg))
    b = rows_to_csv(run_experiment(cfg))
    c = rows_to_csv(run_experiment(cfg, workers=3))
    assert a == b == c
    rows = list(csv.DictReader(io.StringIO(a)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["mean_runtime_s"] == ""
    assert 0 <= int(rows[0]["existence_count"]) <= 2000


def test_timing_column():
    row = run_experiment(ExperimentConfig(2, 2, 2, "pair", samples=10), timing=True)[0]
    assert row.mean_runtime_s is not None and row.mean_runtime_s >= 0


def test_sample_seed_depends_on_index_only():
    assert sample_seed(5, 7) == sample_seed(5, 7)
    assert len({sample_seed(5, k) for k in range(100)}) == 100
    assert sample_seed(5, 0) != sample_seed(6, 0)


def test_experiment_cli(capsys, tmp_path):
    out_file = tmp_path / "o.csv"
    args = ["experiment", "--concept", "pair", "--alpha", "2", "--n", "2", "--layers", "2", "--samples", "300", "--seed", "1"]
    code, out, _ = cli(capsys, *args)
    assert code == 0 and out.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert cli(capsys, *args, "--output", str(out_file))[0] == 0
    assert out_file.read_text() == out
    assert cli(capsys, *args[:-2], "--seed", "x")[0] == 2


def test_individual_full_alpha_rate_is_strictly_between():
    row = run_experiment(ExperimentConfig(3, 3, 3, "individual", samples=10_000, seed=0), workers=2)[0]
    assert 0 < row.existence_count < 10_000
