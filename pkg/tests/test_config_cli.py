import csv
import io

import pytest
from hypothesis import given, settings, strategies as st

from crspectral import cli
from crspectral.config import (
    ConfigError,
    RunConfig,
    SnrGrid,
    format_config,
    parse_config,
    parse_ladder,
    parse_snr_grid,
    resolve_ladder,
    resolve_per_model,
)


def run(capsys, *argv, environ=None):
    code = cli.main(list(argv), environ=environ or {})
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- configuration ---------------------------------------------------------

def test_snr_grid_parsing():
    g = parse_snr_grid("0:30:0.5")
    assert len(g) == 61
    assert g.values()[-1] == 30.0
    assert g.values()[3] == 1.5
    assert parse_snr_grid("20").values() == [20.0]
    assert parse_snr_grid(str(g)) == g
    for bad in ("a:b:c", "0:10", "10:0:1", "0:10:0", "0:inf:1"):
        with pytest.raises(ConfigError):
            parse_snr_grid(bad)


FULL = RunConfig(
    snr_db=SnrGrid(0.0, 30.0, 0.5), users=7, ber=1e-4, mode="vrvp", ladder="r4",
    ladder_sizes=(2, 4, 16), ladder_names=("B", "Q", "S"), nt_max=2, p_loss=0.001,
    per_model_file="per.txt", per_model_lines=("BPSK, 2, 7.0",),
    trials=1234, subbands=16, seed=9, workers=3,
)


def test_config_round_trip_full():
    assert parse_config(format_config(FULL)) == FULL
    assert parse_config(format_config(RunConfig())) == RunConfig()


@settings(max_examples=50, deadline=None)
@given(ber=st.floats(1e-9, 0.19), p_loss=st.floats(1e-9, 0.5),
       users=st.integers(1, 100), seed=st.integers(0, 2**63))
def test_config_round_trip_property(ber, p_loss, users, seed):
    cfg = RunConfig(ber=ber, p_loss=p_loss, users=users, seed=seed)
    assert parse_config(format_config(cfg)) == cfg


@pytest.mark.parametrize("text", [
    "[sweep]\nbogus = 1\n",
    "[weird]\nusers = 1\n",
    "[sweep]\nusers = five\n",
    "[sweep]\nsnr_db = 0:x:1\n",
    "users = 3\n",
    "[per_model]\nmodeX = a, 2, 3\n",
])
def test_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_comments_and_blank_lines():
    cfg = parse_config("# header\n\n[sweep]\n; note\nusers = 4\n\n[sim]\nseed = 3\n")
    assert cfg == RunConfig(users=4, seed=3)


def test_merge_precedence():
    base = RunConfig(users=5, seed=1)
    top = RunConfig(seed=2)
    assert top.merged_over(base) == RunConfig(users=5, seed=2)


def test_ladder_file_and_resolution(tmp_path):
    text = "# lowest first\nBPSK 2\nQPSK, 4\n\n8-PSK 8\n"
    lad = parse_ladder(text)
    assert lad.sizes == (2, 4, 8) and lad.names == ("BPSK", "QPSK", "8-PSK")
    p = tmp_path / "my.ladder"
    p.write_text(text)
    name, got = resolve_ladder(RunConfig(ladder=str(p)))
    assert name == "my" and got == lad
    assert resolve_ladder(RunConfig())[1].sizes == (2, 4, 16, 64)
    assert resolve_ladder(RunConfig(ladder_sizes=(2, 4)))[1].sizes == (2, 4)
    with pytest.raises(ConfigError):
        resolve_ladder(RunConfig(ladder="r9"))
    for bad in ("BPSK\n", "BPSK two\n", "A 4\nB 2\n"):
        with pytest.raises(ConfigError):
            parse_ladder(bad)


def test_inline_per_model():
    cfg = parse_config("[per_model]\nmode2 = QPSK, 4, 10.0\nmode1 = BPSK, 2, 7.0\n")
    pm = resolve_per_model(cfg)
    assert [m.name for m in pm.modes] == ["BPSK", "QPSK"]
    assert resolve_per_model(RunConfig()) is None
    with pytest.raises(ConfigError):
        resolve_per_model(RunConfig(per_model_lines=("BPSK, x, 1",)))


# --- command line ----------------------------------------------------------

def test_sweep_pooling_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--snr-db", "0:30:0.5", "--users", "5")
    assert code == 0
    r = rows(out)
    assert len(r) == 61
    assert list(r[0]) == ["snr_db", "se_L1", "se_L5", "gain", "band_factor"]
    assert all(float(x["gain"]) >= 0 for x in r)


def test_sweep_vrvp_bounded(capsys):
    code, out, _ = run(capsys, "sweep", "--mode", "vrvp", "--snr-db", "30", "--users", "1")
    assert code == 0
    (r,) = rows(out)
    assert "se_r5_L1" in r and "se_r3_L1" in r and "se_r5_L5" not in r
    assert float(r["se_r5_L1"]) <= 6.0
    assert float(r["gain_r5"]) == 0.0


@pytest.mark.parametrize("mode", ["capacity", "crosslayer"])
def test_sweep_other_modes(capsys, mode):
    code, out, _ = run(capsys, "sweep", "--mode", mode, "--snr-db", "0:30:10")
    assert code == 0
    assert len(rows(out)) == 4


def test_sweep_is_byte_reproducible(capsys, tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"o{i}.csv"
        assert run(capsys, "sweep", "--mode", "vrvp", "--out", str(p))[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert run(capsys, "sweep", "--mode", "vrvp", "--workers", "4",
               "--out", str(tmp_path / "w.csv"))[0] == 0
    assert (tmp_path / "w.csv").read_bytes() == outs[0]


def test_table1(capsys):
    code, out, _ = run(capsys, "table1")
    assert code == 0
    vrvp, cld = rows(out)
    assert vrvp["row"] == "avg_snr=20dB" and cld["row"] == "Nt=3"
    assert float(vrvp["No Transmit"]) == 0.0
    for name, want in zip(["BPSK", "QPSK", "16-QAM", "64-QAM"], [5.2745, 8.2848, 14.3054, 20.326]):
        assert float(vrvp[name]) == pytest.approx(want, abs=0.01)
    for name, want in zip(["BPSK", "QPSK", "16-QAM", "64-QAM"], [7.3765, 10.4247, 17.1872, 23.1932]):
        assert float(cld[name]) == pytest.approx(want, abs=0.01)


def test_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "v.csv"
    code, _, err = run(capsys, "verify", "--mode", "capacity", "--snr-db", "0:30:5",
                       "--trials", "20000", "--out", str(out))
    assert code == 0
    assert "verify: PASS" in err
    r = rows(out.read_text())
    assert len(r) == 14
    assert all(abs(float(x["z"])) < 4 for x in r)


def test_verify_sign_test(capsys):
    # independent streams per grid point: z-scores should not share a sign
    code, out, _ = run(capsys, "verify", "--mode", "capacity", "--snr-db", "0:30:5",
                       "--trials", "20000")
    assert code == 0
    z = [float(x["z"]) for x in rows(out) if x["quantity"] == "capacity"]
    assert 0 < sum(v > 0 for v in z) < len(z)


def test_verify_other_modes(capsys):
    for mode in ("pooling", "vrvp", "crosslayer"):
        code, out, _ = run(capsys, "verify", "--mode", mode, "--snr-db", "0:20:10",
                           "--trials", "5000", "--subbands", "16")
        assert code == 0, mode


def test_env_and_config_precedence(capsys, tmp_path):
    cfgfile = tmp_path / "run.ini"
    cfgfile.write_text("[sweep]\nusers = 3\nsnr_db = 0:10:5\n")
    code, out, _ = run(capsys, "sweep", "--config", str(cfgfile))
    assert code == 0 and "se_L3" in out and len(rows(out)) == 3
    code, out, _ = run(capsys, "sweep", "--config", str(cfgfile),
                       environ={"CRSPECTRAL_USERS": "4"})
    assert "se_L4" in out
    code, out, _ = run(capsys, "sweep", "--config", str(cfgfile), "--users", "2",
                       environ={"CRSPECTRAL_USERS": "4"})
    assert "se_L2" in out


@pytest.mark.parametrize("argv, environ, code, kind", [
    ([], {}, 2, "usage"),
    (["sweep", "--mode", "nope"], {}, 2, "usage"),
    (["sweep", "--ladder", "r9"], {}, 2, "usage"),
    (["sweep", "--users", "x"], {}, 2, "usage"),
    (["frobnicate"], {}, 2, "usage"),
    (["sweep"], {"CRSPECTRAL_SEED": "abc"}, 3, "config"),
    (["sweep", "--snr-db", "10:0:1"], {}, 3, "config"),
    (["sweep", "--users", "0"], {}, 3, "config"),
    (["verify", "--trials", "0"], {}, 3, "config"),
    (["table1", "--p-loss", "1.5"], {}, 3, "config"),
    (["table1", "--ber", "0.5"], {}, 3, "config"),
])
def test_exit_codes(capsys, argv, environ, code, kind):
    got, _, err = run(capsys, *argv, environ=environ)
    assert got == code
    assert err.startswith(f"crspectral: error: {kind}: ")
    assert err.count("\n") == 1


def test_exit_code_io(capsys, tmp_path):
    got, _, err = run(capsys, "sweep", "--config", str(tmp_path / "missing.ini"))
    assert got == 5 and "error: io:" in err
    got, _, _ = run(capsys, "sweep", "--per-model", str(tmp_path / "missing.txt"),
                    "--mode", "crosslayer")
    assert got == 5
    got, _, _ = run(capsys, "table1", "--out", str(tmp_path / "no" / "dir" / "x.csv"))
    assert got == 5


def test_exit_code_verify_failed(capsys, monkeypatch):
    import crspectral.sweep as sweep
    monkeypatch.setattr(sweep, "capacity_optimal", lambda ch: 100.0)
    got, _, err = run(capsys, "verify", "--mode", "capacity", "--snr-db", "10",
                      "--trials", "2000")
    assert got == 1 and "verify: FAIL" in err


def test_module_entry_point():
    import subprocess, sys
    r = subprocess.run([sys.executable, "-m", "crspectral", "table1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("row,No Transmit")
