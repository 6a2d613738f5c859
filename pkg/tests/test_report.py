import os

from carchase.config import default_config
from carchase.report import load_log, make_report
from carchase.simulate import run_simulation


def test_report_renders_figures(tmp_path):
    cfg = default_config(duration="0.5")
    run_simulation(cfg, out_dir=str(tmp_path / "run"))
    written = make_report(str(tmp_path / "run"))
    names = {os.path.basename(p) for p in written}
    assert names == {"trajectory.png", "pixel_errors.png", "standoff.png", "commands.png", "attitude.png"}
    for p in written:
        assert os.path.getsize(p) > 2000


def test_report_accepts_csv_path_and_out_dir(tmp_path):
    cfg = default_config(duration="0.2")
    run_simulation(cfg, out_dir=str(tmp_path / "run"))
    out = tmp_path / "figs"
    written = make_report(str(tmp_path / "run" / "log.csv"), out_dir=str(out))
    assert all(os.path.dirname(p) == str(out) for p in written)


def test_load_log_parses_columns(tmp_path):
    cfg = default_config(duration="0.2")
    run_simulation(cfg, out_dir=str(tmp_path / "run"))
    log = load_log(str(tmp_path / "run" / "log.csv"))
    assert log["t"].shape == (10,)
    assert log["mode"].dtype.kind == "U"
    assert float(log["u_T"][0]) > 0.0
