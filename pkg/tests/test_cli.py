import json
import math

import pytest

from wwscales.cli import main
from wwscales.syntax import parse_expr, parse_scalar


def _w(k, W=2.0):
    return math.sqrt((k + k**3 / W) * math.tanh(k))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def derived(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    code = main(["derive", "--out", str(out)])
    return code, out


def test_derive_default_passes(derived):
    code, out = derived
    assert code == 0
    assert {p.name for p in out.iterdir()} == {"ledger.json", "report.txt", "report.tex"}


def test_reports_byte_identical(derived, tmp_path):
    _, first = derived
    assert main(["derive", "--out", str(tmp_path)]) == 0
    for name in ("ledger.json", "report.txt", "report.tex"):
        assert (first / name).read_bytes() == (tmp_path / name).read_bytes()


def test_json_roundtrip(derived):
    _, out = derived
    d = json.loads((out / "ledger.json").read_text())
    count = 0
    for sol in d["solutions"].values():
        for key in ("phi", "eta", "phi_raw", "eta_raw"):
            assert str(parse_expr(sol[key])) == sol[key]
            count += 1
    for c in d["constraints"].values():
        for key in ("lhs", "derived", "current"):
            assert str(parse_expr(c[key])) == c[key]
            count += 1
    for lv in d["levels"].values():
        for key in ("laplace", "kinematic", "dynamic", "bottom"):
            assert str(parse_expr(lv[key])) == lv[key]
    for e in d["events"]:
        for key in ("coefficient", "reduced"):
            if e[key] is not None:
                assert str(parse_scalar(e[key])) == e[key]
    assert count > 50


def test_text_report_lists_both_vanishing_events(derived):
    _, out = derived
    text = (out / "report.txt").read_text()
    lines = [ln for ln in text.splitlines() if "amplitude-vanishing" in ln]
    assert len(lines) == 2
    assert "order 2" in lines[0] and "order 4" in lines[1]


def test_latex_second_harmonic_term(derived):
    _, out = derived
    tex = (out / "report.tex").read_text()
    order2 = tex.split(r"\subsection*{Order $\epsilon^{2}$}")[1].split(r"\subsection*")[0]
    eta2 = [ln for ln in order2.splitlines() if ln.startswith(r"\[ \eta_{2}")][0]
    assert r"\frac{k \cosh k}{2 \sinh k} A^{2} e^{2i\theta}" in eta2
    assert r"\cosh[k(y+1)]" in tex


def test_suppress_homogeneous_exits_1(tmp_path, capsys):
    code, _, err = run(capsys, "derive", "--suppress-homogeneous", "--out", str(tmp_path))
    assert code == 1
    assert "F2" in err
    for name in ("report.txt", "report.tex"):
        assert "homogeneous amplitudes suppressed" in (tmp_path / name).read_text()
    assert json.loads((tmp_path / "ledger.json").read_text())["warnings"]


def test_max_order_one(tmp_path, capsys):
    code, _, _ = run(capsys, "derive", "--max-order", "1", "--out", str(tmp_path))
    assert code == 0
    d = json.loads((tmp_path / "ledger.json").read_text())
    assert list(d["constraints"]) == ["o1.dyn.m0", "o1.dyn.m1"]
    assert d["constraints"]["o1.dyn.m1"]["tag"] == "dispersion"


def test_check_labels(capsys):
    assert run(capsys, "check", "kdv")[0] == 0
    assert run(capsys, "check", "Ck")[0] == 0
    code, _, err = run(capsys, "check", "no-such-label")
    assert code == 4 and "no-such-label" in err


@pytest.mark.parametrize(
    "args, value",
    [
        (("Vg",), (_w(1 + 1e-5) - _w(1 - 1e-5)) / 2e-5),
        (("w2",), 1.5 * math.tanh(1)),
        (("kdv_disp", "--W", "3"), 0.0),
        (("cosh(k)^2 - sinh(k)^2",), 1.0),
    ],
)
def test_eval(capsys, args, value):
    code, out, _ = run(capsys, "eval", *args)
    assert code == 0
    assert abs(float(out) - value) < 1e-6
    assert len(out.strip().lstrip("-").replace(".", "").lstrip("0")) <= 12


def test_eval_errors(capsys):
    assert run(capsys, "eval", "nosuch")[0] == 4
    assert run(capsys, "eval", "1/(W - 2)")[0] == 2


def test_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "report", "--out", str(blocker / "sub"))
    assert code == 3 and "I/O error" in err


def test_report_format_selection(tmp_path, capsys):
    assert run(capsys, "report", "--max-order", "2", "--format", "json", "--out", str(tmp_path))[0] == 0
    assert {p.name for p in tmp_path.iterdir()} == {"ledger.json"}
