import filecmp
import hashlib
from pathlib import Path

import pytest

from raplots import KINDS, FigureSpec, RenderError, render
from raplots.cli import main

DATA = Path(__file__).parent / "data"
INPUTS = {
    "pattern": DATA / "pattern.csv",
    "power": DATA / "sweep_power.csv",
    "antennas": DATA / "sweep_n.csv",
}
SCHEMES = ("fixed", "isotropic", "ra", "random")


@pytest.mark.parametrize("kind", KINDS)
def test_renders_all_kinds_with_labeled_curves(kind, tmp_path):
    out = tmp_path / f"{kind}.png"
    fig = render(FigureSpec(INPUTS[kind], kind, out))
    assert out.exists() and out.stat().st_size > 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    ax = fig.axes[0]
    labels = [line.get_label() for line in ax.get_lines()]
    assert len(labels) == len(SCHEMES)  # one curve per scheme
    legend_texts = [t.get_text() for t in ax.get_legend().get_texts()]
    assert len(legend_texts) == len(SCHEMES)
    # axes carry units
    assert "(" in ax.get_xlabel() and ")" in ax.get_xlabel()
    assert "dB" in ax.get_ylabel()


def test_pattern_axis_range():
    fig = render(FigureSpec(INPUTS["pattern"], "pattern", Path("/tmp/_pat.png")))
    assert fig.axes[0].get_xlim() == (0.0, 180.0)
    assert "deg" in fig.axes[0].get_xlabel()


def test_inputs_unmodified_and_output_deterministic(tmp_path):
    before = hashlib.sha256(INPUTS["power"].read_bytes()).hexdigest()
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec(INPUTS["power"], "power", a))
    render(FigureSpec(INPUTS["power"], "power", b))
    assert hashlib.sha256(INPUTS["power"].read_bytes()).hexdigest() == before
    assert filecmp.cmp(a, b, shallow=False)


def test_empty_csv_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(RenderError):
        render(FigureSpec(empty, "power", tmp_path / "x.png"))
    header_only = tmp_path / "header.csv"
    header_only.write_text("scheme,phi_deg,gain_db\n")
    with pytest.raises(RenderError):
        render(FigureSpec(header_only, "pattern", tmp_path / "x.png"))


def test_wrong_columns_rejected(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(RenderError):
        render(FigureSpec(bad, "pattern", tmp_path / "x.png"))
    with pytest.raises(RenderError):
        render(FigureSpec(INPUTS["power"], "antennas", tmp_path / "x.png"))  # wrong sweep variable
    with pytest.raises(RenderError):
        FigureSpec(INPUTS["power"], "surface", tmp_path / "x.png")


def test_cli_exit_codes(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["--kind", "power", "--in", str(INPUTS["power"]), "--out", str(out)]) == 0
    assert out.exists()
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["--kind", "power", "--in", str(empty), "--out", str(out)]) == 1
