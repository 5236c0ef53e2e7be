from __future__ import annotations

import shutil

import pytest

from mural2scene.cli import EXIT_DIAGNOSTICS, EXIT_IO, EXIT_OK, main
from mural2scene.fixtures import SCRIPT_NAME
from mural2scene.narrative import Clean, parse_script, serialize_script


@pytest.fixture
def scene(small_fixture, tmp_path):
    dst = tmp_path / "scene"
    shutil.copytree(small_fixture.parent, dst)
    return dst / small_fixture.name


def test_compile_writes_the_package(scene, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["-v", "compile", str(scene), "-o", str(out), "--downsample", "2"]) == EXIT_OK
    assert (out / "scene.gltf").exists() and (out / "narrative.json").exists()
    assert "downsample 2" in capsys.readouterr().out


def test_compile_failure_writes_nothing(scene, tmp_path, capsys):
    scene.write_text(scene.read_text().replace("source_id: east_wall\n", "source_id: west_wall\n", 1))
    out = tmp_path / "out"
    assert main(["compile", str(scene), "-o", str(out)]) == EXIT_DIAGNOSTICS
    assert not out.exists()
    err = capsys.readouterr().err
    assert err.startswith("ERROR ")
    assert f"{scene}:" in err


def test_missing_manifest_is_an_io_failure(tmp_path, capsys):
    missing = str(tmp_path / "none.scene")
    assert main(["compile", missing, "-o", str(tmp_path / "out")]) == EXIT_IO
    assert main(["validate", missing]) == EXIT_IO
    assert "IO_ERROR" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_validate(scene, capsys):
    assert main(["validate", str(scene)]) == EXIT_OK
    assert "ok (0 warnings)" in capsys.readouterr().out
    scene.write_text(scene.read_text().replace("dpi: 60", "dpi: 0", 1))
    assert main(["validate", str(scene)]) == EXIT_DIAGNOSTICS


def test_simulate_canonical_script(scene, capsys):
    script = scene.parent / SCRIPT_NAME
    assert main(["simulate", str(scene), "--script", str(script), "--strict"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "outcome: Completed()" in out
    assert "final node: return_to_cave" in out
    assert "items delivered (10)" in out


def test_simulate_stuck_script(scene, tmp_path, capsys):
    events = list(parse_script((scene.parent / SCRIPT_NAME).read_text()))
    events.remove(Clean("clean_hall"))
    short = tmp_path / "short.yaml"
    short.write_text(serialize_script(events))
    assert main(["simulate", str(scene), "--script", str(short)]) == EXIT_DIAGNOSTICS
    assert "outcome: Stuck(at_node='clean_hall')" in capsys.readouterr().out


def test_simulate_bad_and_missing_scripts(scene, tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("- {type: Teleport}\n")
    assert main(["simulate", str(scene), "--script", str(bad)]) == EXIT_DIAGNOSTICS
    assert "INVALID_VALUE" in capsys.readouterr().err
    assert main(["simulate", str(scene), "--script", str(tmp_path / "none.yaml")]) == EXIT_IO


def test_fixture_subcommand(tmp_path, capsys):
    assert main(["fixture", "-o", str(tmp_path / "fx"), "--dpi", "20"]) == EXIT_OK
    manifest = capsys.readouterr().out.strip()
    assert main(["validate", manifest]) == EXIT_OK


def test_argument_errors_exit_through_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["compile", "x.scene", "-o", "out", "--downsample", "0"])
    assert exc.value.code == 2
