import json
import random

import pytest

from nft_recsys.cli import main
from nft_recsys.ingest import write_collection_json

from synthdata import CONTRACT, make_collection, random_collection


@pytest.fixture
def collection_dir(tmp_path):
    coll = random_collection(random.Random(30), n_tokens=20)
    d = tmp_path / "coll"
    d.mkdir()
    write_collection_json(coll, d / "collection.json")
    return coll, d


@pytest.fixture
def index_dir(tmp_path, collection_dir):
    _, coll_dir = collection_dir
    idx = tmp_path / "idx"
    assert main(["index", "--collection", str(coll_dir), "--out", str(idx)]) == 0
    return idx


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestHelp:
    def test_help_exits_zero(self, capsys):
        code, out, _ = run(capsys, ["--help"])
        assert code == 0
        assert "usage" in out.lower()

    def test_missing_subcommand_is_usage_error(self, capsys):
        code, _, err = run(capsys, [])
        assert code == 2

    def test_bad_flag_is_usage_error(self, capsys):
        code, _, _ = run(capsys, ["recommend", "--no-such-flag"])
        assert code == 2


class TestIngestAndIndex:
    def test_ingest_writes_collection(self, tmp_path, capsys):
        coll = make_collection([[("Fur", "Black")], [("Fur", "Red")]])
        src = tmp_path / "src.json"
        write_collection_json(coll, src)
        out = tmp_path / "out"
        code, stdout, _ = run(
            capsys,
            ["ingest", "--input", str(src), "--format", "erc721-metadata", "--out", str(out)],
        )
        assert code == 0
        assert json.loads(stdout) == {"tokens": 2}
        assert (out / "collection.json").is_file()

    def test_index_reports_sizes(self, tmp_path, collection_dir, capsys):
        coll, coll_dir = collection_dir
        idx = tmp_path / "idx2"
        code, stdout, _ = run(
            capsys, ["index", "--collection", str(coll_dir), "--out", str(idx)]
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["tokens"] == len(coll)
        assert (idx / "vocabulary.txt").is_file()
        assert (idx / "matrix.tsv").is_file()

    def test_missing_input_file_is_domain_error(self, tmp_path, capsys):
        code, _, err = run(
            capsys,
            ["ingest", "--input", str(tmp_path / "nope.json"), "--format", "erc721-metadata", "--out", str(tmp_path / "o")],
        )
        assert code == 1
        assert "error" in err


class TestRecommend:
    def test_json_output_schema(self, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        ref = coll.tokens[0].ref.display()
        code, stdout, err = run(
            capsys,
            ["recommend", "--index", str(index_dir), "--ref", ref, "--model", "both", "-k", "10", "--format", "json"],
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["reference"] == ref
        assert payload["model"] == "both"
        assert payload["k"] == 10
        assert set(payload["results"]) == {"traits", "rarity"}
        for rows in payload["results"].values():
            assert len(rows) == 10
            assert [r["rank"] for r in rows] == list(range(1, 11))
            for row in rows:
                assert set(row) == {"rank", "id", "score"}

    def test_single_model_flat_results(self, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        ref = coll.tokens[3].ref.display()
        code, stdout, _ = run(
            capsys,
            ["recommend", "--index", str(index_dir), "--ref", ref, "--model", "traits", "-k", "5"],
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["model"] == "traits"
        assert isinstance(payload["results"], list)
        assert len(payload["results"]) == 5

    def test_missing_ref_names_token(self, index_dir, capsys):
        missing = f"{CONTRACT}-99999"
        code, stdout, err = run(
            capsys, ["recommend", "--index", str(index_dir), "--ref", missing]
        )
        assert code == 1
        assert stdout == ""
        assert "99999" in err

    def test_malformed_ref_is_domain_error(self, index_dir, capsys):
        code, _, err = run(
            capsys, ["recommend", "--index", str(index_dir), "--ref", "0x1234-5"]
        )
        assert code == 1
        assert "0x1234" in err

    def test_table_format(self, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        ref = coll.tokens[0].ref.display()
        code, stdout, _ = run(
            capsys,
            ["recommend", "--index", str(index_dir), "--ref", ref, "--model", "rarity", "-k", "3", "--format", "table"],
        )
        assert code == 0
        lines = stdout.splitlines()
        assert lines[1] == "model: rarity"
        assert lines[2].split() == ["rank", "id", "score"]
        assert len(lines) == 6

    def test_byte_identical_across_runs(self, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        argv = ["recommend", "--index", str(index_dir), "--ref", coll.tokens[1].ref.display()]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second

    def test_stdout_is_pure_json(self, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        ref = coll.tokens[0].ref.display()
        code, stdout, _ = run(
            capsys,
            ["-v", "recommend", "--index", str(index_dir), "--ref", ref],
        )
        assert code == 0
        json.loads(stdout)  # no interleaved diagnostics


class TestEvaluate:
    def test_csv_export_and_stats_stdout(self, tmp_path, collection_dir, index_dir, capsys):
        coll, _ = collection_dir
        out = tmp_path / "frame.csv"
        code, stdout, _ = run(
            capsys,
            ["evaluate", "--index", str(index_dir), "--ref", coll.tokens[0].ref.display(), "--out", str(out)],
        )
        assert code == 0
        stats = json.loads(stdout)
        assert "reference" in stats
        header = out.read_text().splitlines()[0]
        assert header == "reference_id,item_id,source,cosine_to_reference,total_rarity,rank_traits,rank_rarity"

    def test_json_export(self, tmp_path, collection_dir, index_dir, capsys):
        from nft_recsys.evaluate import import_frame

        coll, _ = collection_dir
        out = tmp_path / "frame.json"
        code, _, _ = run(
            capsys,
            ["evaluate", "--index", str(index_dir), "--ref", coll.tokens[2].ref.display(), "--out", str(out), "--format", "json"],
        )
        assert code == 0
        frame = import_frame(out)
        assert frame.rows[0].source == "reference"


class TestDeterminism:
    def test_permuted_collection_same_query_bytes(self, tmp_path, capsys):
        from nft_recsys.model import Collection

        rng = random.Random(31)
        coll = random_collection(rng, n_tokens=25)
        order = list(range(len(coll)))
        rng.shuffle(order)
        permuted = Collection(tokens=[coll.tokens[i] for i in order], contract=coll.contract)

        outputs = []
        for tag, c in (("a", coll), ("b", permuted)):
            cdir = tmp_path / f"coll-{tag}"
            cdir.mkdir()
            write_collection_json(c, cdir / "collection.json")
            idx = tmp_path / f"idx-{tag}"
            assert main(["index", "--collection", str(cdir), "--out", str(idx)]) == 0
            capsys.readouterr()
            argv = ["recommend", "--index", str(idx), "--ref", coll.tokens[4].ref.display(), "--model", "both"]
            code, stdout, _ = run(capsys, argv)
            assert code == 0
            outputs.append(stdout)
        assert outputs[0] == outputs[1]
