import io
import json

import pytest

from digits_toolkit import cli, curation, evaluation, grammar, model_spec
from digits_toolkit.constrained_decode import constrained_text
from oracles import recursive_edit_distance
import wer_fixture


def run(*argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = cli.run(list(argv), stdout=out)
    return code, out.getvalue()


def test_verbalize_653():
    code, out = run("verbalize", "653")
    assert code == 0
    assert out == grammar.dump_verbalizations("653")
    assert len(out.splitlines()) == 5


def test_verbalize_styles_and_vocab():
    assert run("verbalize", "480", "--style", "compact")[1] == "four eighty\n"
    assert run("verbalize", "05", "--style", "digit_by_digit")[1] == "zero five\n"
    code, out = run("verbalize", "--vocab")
    assert out == grammar.vocabulary_text() and len(out.splitlines()) == 33


def test_parse():
    assert run("parse", "four hundred and eighty") == (0, "480\n")
    assert run("parse", "one", "twenty", "three", "--expected-length", "4") == (0, "1203\n")


def test_parse_domain_errors(capsys):
    assert run("parse", "well fix")[0] == 1
    assert "well" in capsys.readouterr().err
    assert run("parse", "hundred")[0] == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["parse"],
    ["parse", "one", "--expected-length", "9"],
    ["curate", "x.json"],
    ["curate", "x.json", "--out", "o", "--ratio", "1.5"],
    ["netspec", "tiny"],
    ["verbalize", "1", "--frobnicate"],
    ["verbalize"],
])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2
    assert capsys.readouterr().err


def test_invalid_digits_is_domain_error():
    assert run("verbalize", "12a")[0] == 1


def test_score_two_files_golden(tmp_path):
    refs, hyps = wer_fixture.build(26, 1000, seed=1)
    assert sum(recursive_edit_distance(r, h) for r, h in zip(refs, hyps)) == 26
    ref_path, hyp_path = wer_fixture.write_tsvs(tmp_path, refs, hyps)
    code, out = run("score", str(ref_path), str(hyp_path))
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("WER 2.60 ") and first.endswith(" N 1000")

    direct = evaluation.score_records(evaluation.join_refs_hyps(
        evaluation.read_two_column(ref_path.read_text().splitlines()),
        evaluation.read_two_column(hyp_path.read_text().splitlines())))
    assert out == direct.summary()


def test_score_single_file_and_json(tmp_path):
    p = tmp_path / "s.tsv"
    p.write_text("u1\ttwo\t\nu2\tsixteen\tsixty\nu3\tsix hundred fifty three\tsix hundred fifty three\n")
    code, out = run("score", str(p))
    assert code == 0
    assert out.splitlines()[0] == "WER 33.33 S 1 D 1 I 0 N 6"
    code, out = run("score", str(p), "--manifest")
    data = json.loads(out)
    assert data["total"]["wer"] == "33.33"
    assert {b["category"]: b["blank_output"] for b in data["buckets"]}["SINGLE_DIGIT_0_9"] == 1


def test_score_missing_file(tmp_path):
    assert run("score", str(tmp_path / "nope.tsv"))[0] == 1


def test_rtf(tmp_path):
    assert run("rtf", "--time", "2.188", "--duration", "3646.3")[1].startswith("RTF 0.00060006 ")
    p = tmp_path / "t.tsv"
    p.write_text("a\t1\t10\nb\t3\t10\n")
    code, out = run("rtf", str(p))
    assert out.splitlines() == ["a\t0.1", "b\t0.3", "RTF 0.2 T 4 D 20"]
    assert run("rtf", "--time", "1", "--duration", "0")[0] == 1
    assert run("rtf")[0] == 2


def test_snap_stdin(monkeypatch):
    code, out = run("snap", "--max-distance", "3", stdin="u1\twell fix\nu2\tfour hundred eighty\nu3\tbanana\n",
                    monkeypatch=monkeypatch)
    assert code == 0
    assert out.splitlines() == ["u1\t126\t4", "u2\t480\t0", "u3\t\t0"]
    direct = constrained_text("well fix", 3)
    assert out.splitlines()[0] == f"u1\t{direct.best}\t{direct.total_distance}"


def test_netspec():
    code, out = run("netspec", "dense")
    assert out == model_spec.emit_config(model_spec.build_network("dense"))
    code, out = run("netspec", "light", "--count")
    assert out.split("\t")[1] == str(model_spec.param_count(model_spec.build_network("light")))
    data = json.loads(run("netspec", "light", "--manifest")[1])
    assert model_spec.parse_config(data["config"]) == model_spec.build_network("light")


def test_curate_and_split(tmp_path, sine_source):
    wav, js = sine_source
    out_dir = tmp_path / "corpus"
    code, out = run("curate", str(js), "--out", str(out_dir), "--lead", "0.5", "--trail", "0.5", "--seed", "1")
    assert code == 0, out
    assert out.startswith("clips 1 train 1 test 0")
    assert (out_dir / "text").read_text() == "call_01-0000-00002000 four five six\n"
    m = curation.read_data_dir(out_dir)
    assert len(m) == 1

    code, out = run("split", str(out_dir), "--out", str(tmp_path / "s"), "--manifest")
    assert code == 0 and json.loads(out) == {"train": ["call_01-0000-00002000"], "test": []}
    train = curation.read_data_dir(tmp_path / "s" / "train")
    assert (tmp_path / "s" / "train" / train.entries[0].wav_path).exists()


def test_curate_bad_document(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"words":[{"text":"eighty","start":0.9,"end":0.5}]}')
    assert run("curate", str(bad), "--out", str(tmp_path / "o"))[0] == 1


def test_curate_missing_audio(tmp_path):
    js = tmp_path / "lonely.json"
    js.write_text('{"words":[{"text":"two","start":0.1,"end":0.4}]}')
    assert run("curate", str(js), "--out", str(tmp_path / "o"))[0] == 1
