from fractions import Fraction

import pytest

import oracles
from qgame.analysis import read_certificate
from qgame.cli import main
from qgame.engine import parse_trace


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def game_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "g.trace"
    assert main(["play", "--breaker", "random:7", "--turns", "1000", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_play_writes_a_complete_trace(game_file):
    trace = parse_trace(game_file.read_text())
    assert trace.turns == len(trace.moves) == 1000
    assert trace.breaker == "random:7" and trace.seed == 7


def test_play_is_byte_for_byte_reproducible(tmp_path, game_file):
    again = tmp_path / "again.trace"
    assert main(["play", "--breaker", "random:7", "--turns", "1000", "--seed", "7", "--out", str(again)]) == 0
    assert again.read_bytes() == game_file.read_bytes()


def test_play_to_stdout_and_stream_dump(capsys):
    code, out, err = run(capsys, "play", "--turns", "4", "--dump-stream", "7")
    assert code == 0 and out.startswith("qgame-trace v1 ")
    assert "stream 1 1 2 1 2 1 1" in err


@pytest.mark.parametrize("argv", [
    ["play", "--turns", "0"],
    ["play", "--turns", "-3"],
    ["play"],
    ["play", "--turns", "5", "--maker", "greedy"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unwritable_output_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "play", "--turns", "2", "--out", str(tmp_path / "missing" / "x.trace"))
    assert code == 1 and "cannot write" in err


def test_verify_all_passes_on_a_fresh_trace(capsys, game_file):
    code, out, _ = run(capsys, "verify", "--in", str(game_file))
    assert code == 0 and out.startswith("OK")
    assert "# maker: maker moves recomputed: 500" in out


def test_verify_flags_a_corrupted_trace(capsys, tmp_path, game_file):
    lines = game_file.read_text().splitlines()
    lines[11] = lines[1]  # a Breaker turn repeats Maker's opening edge
    bad = tmp_path / "bad.trace"
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", "--in", str(bad))
    assert code == 1 and out.startswith("FAIL")
    assert "turn 11" in out


def test_verify_unreadable_trace_fails(capsys, tmp_path):
    junk = tmp_path / "junk.trace"
    junk.write_text("not a trace\n")
    code, out, _ = run(capsys, "verify", "--in", str(junk))
    assert code == 1 and "unreadable trace" in out


def test_disjointness_check_needs_no_trace(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "disjointness", "--bound", "10000")
    assert code == 0 and out.startswith("OK")


@pytest.mark.parametrize("checks", ["bogus", "legality,bogus", "pairing"])
def test_unknown_or_inapplicable_checks_exit_2(capsys, game_file, checks):
    assert run(capsys, "verify", "--in", str(game_file), "--checks", checks)[0] == 2


def test_missing_input_file_exits_2(capsys, tmp_path):
    assert run(capsys, "verify", "--in", str(tmp_path / "nope"))[0] == 2


def test_extract_then_verify_round_trip(capsys, tmp_path, game_file):
    out_path = tmp_path / "cert.trace"
    code, out, _ = run(capsys, "extract", "--in", str(game_file), "--out", str(out_path))
    assert code == 0
    head, clique = out.splitlines()
    m = int(head.split()[0].removeprefix("m="))
    assert m >= 1 and len(clique.split()) == m + 1
    assert read_certificate(out_path.read_text()).m == m
    code, out, _ = run(capsys, "verify", "--in", str(out_path))
    assert code == 0 and "certificate m=" in out


def test_extract_rewrites_input_by_default(capsys, tmp_path):
    path = tmp_path / "short.trace"
    assert main(["play", "--turns", "1", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "extract", "--in", str(path))
    assert code == 0 and out.startswith("m=1 ")
    assert read_certificate(path.read_text()).vertices == [Fraction(0)]


def test_tampered_certificate_is_rejected(capsys, tmp_path, game_file):
    path = tmp_path / "cert.trace"
    assert main(["extract", "--in", str(game_file), "--out", str(path)]) == 0
    capsys.readouterr()
    text = path.read_text().replace(" w=", " w=1", 1)  # inflate the first recorded W size
    path.write_text(text)
    code, out, _ = run(capsys, "verify", "--in", str(path), "--checks", "certificate")
    assert code == 1


@pytest.mark.parametrize("n", [1, 2, 5, 10, 14])
def test_ramsey_prefix_matches_monotone_subsequences(capsys, n):
    code, out, _ = run(capsys, "ramsey", "--prefix", str(n))
    values = [oracles.enum_q(i) for i in range(1, n + 1)]
    want = f"{oracles.longest_increasing(values)} {oracles.longest_decreasing(values)}"
    assert code == 0 and out.strip() == want


def test_ramsey_prefix_one():
    assert main(["ramsey", "--prefix", "1"]) == 0


def test_ramsey_dense_subset_cases(capsys):
    code, out, _ = run(capsys, "ramsey", "--dense-subset", "all-red", "--count", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("case 2 colour=red") and len(lines) == 6
    code, out, _ = run(capsys, "ramsey", "--dense-subset", "all-blue", "--count", "5", "--budget", "3")
    assert code == 1 and out.startswith("inconclusive")
    assert run(capsys, "ramsey", "--dense-subset", "mauve")[0] == 2


def test_iso_subcommands(capsys):
    assert run(capsys, "iso", "--forward", "0", "0")[1].strip() == "1/2"
    code, out, _ = run(capsys, "iso", "--backward", "1/2")
    assert code == 0 and out.strip() == "0/1 0/1"
    code, out, _ = run(capsys, "iso", "--class-of", "1/2")
    assert code == 0 and out.strip() == "0/1"
    assert run(capsys, "iso", "--backward", "3/2")[0] == 2


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for play\nturns = 6\nbreaker = pairing\n")
    code, out, _ = run(capsys, "--config", str(cfg), "play")
    trace = parse_trace(out)
    assert code == 0 and trace.turns == 6 and trace.breaker == "pairing"
    code, out, _ = run(capsys, "--config", str(cfg), "play", "--turns", "2")
    assert parse_trace(out).turns == 2


def test_config_file_rejects_unknown_keys(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = teal\n")
    assert run(capsys, "--config", str(cfg), "play", "--turns", "2")[0] == 2
