import json
import os
import subprocess

import pytest

import pancad


@pytest.fixture(scope="module")
def drawing():
    return pancad.generate(seed=3)


def test_generate_is_deterministic(drawing):
    assert pancad.generate(seed=3) == drawing
    assert pancad.generate(seed=4) != drawing
    head = pancad.header(drawing)
    assert head["classes"] == ["wall", "single door", "window", "parking", "table"]
    assert len(pancad.entities(drawing)) > 50


def test_dxf_round_trip(drawing):
    parsed, skipped = pancad.parse_dxf(pancad.to_dxf(drawing))
    assert skipped == 0
    assert len(pancad.entities(parsed)) == len(pancad.entities(drawing))


def test_graph_degree_cap(drawing):
    edges = pancad.graph_edges(drawing, k_max=2)
    degree = {}
    for i, j in edges:
        assert i < j
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
    assert edges and max(degree.values()) <= 2


def test_self_evaluation_is_perfect(drawing):
    boxes = pancad.gt_boxes(drawing)
    assembled = pancad.assemble(drawing, pancad.labels(drawing), boxes)
    scores = pancad.evaluate_panoptic([assembled], [drawing])
    assert scores["overall"]["PQ"] == 1.0
    assert pancad.evaluate_semantic([drawing], [drawing])["F1"] == 1.0
    assert pancad.evaluate_instance([boxes], [drawing])["mAP"] == 1.0


def test_train_and_infer():
    data = [pancad.generate(seed=s) for s in range(3)]
    model, losses = pancad.train(data, iterations=40, lr=3e-3, weights="inverse", seed=1)
    assert len(losses) == 40
    assert json.loads(model)["format"] == "pancad-gcn"
    labels = pancad.infer(model, data[0])
    assert len(labels) == len(pancad.entities(data[0]))


def test_mask_export(drawing):
    pgm = pancad.render_mask_pgm(drawing, scale=0.02)
    assert pgm.startswith(b"P5\n401 401\n255\n")


def test_errors():
    with pytest.raises(pancad.PancadError):
        pancad.generate(rooms_x=9)
    with pytest.raises(ValueError):
        pancad.parse_dxf("0\nSECTION\n2\nENTITIES\n0\nLINE\n10\nnope\n")


def test_cli_in_process(tmp_path):
    code, out, _ = pancad.run_cli(["--seed", "2", "gen", "--out", str(tmp_path / "g"), "--count", "1"])
    assert code == 0
    assert (tmp_path / "g" / "drawing_0000.jsonl").exists()
    code, _, err = pancad.run_cli(["gen", "--nope"])
    assert code == 1 and err


def test_cli_binary(tmp_path):
    exe = os.environ.get("PANCAD_CLI")
    if not exe:
        pytest.skip("PANCAD_CLI not set")
    done = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert done.returncode == 0
    assert pancad.__version__ in done.stdout
