import numpy as np
import pytest

from conftest import blurred_square_edge, square_ring
from dtvar import formats
from dtvar.cli import main
from dtvar.dt import chamfer_d8, exact_edt


@pytest.fixture
def mask_file(tmp_path):
    path = tmp_path / "mask.pbm"
    formats.write_pbm(path, square_ring(24, 6, 17))
    return path


def test_dt_command_matches_library(tmp_path, mask_file):
    out = tmp_path / "d.dtvg"
    assert main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(out)]) == 0
    assert np.array_equal(formats.read_dtvg(out), chamfer_d8(square_ring(24, 6, 17)))


def test_dt_command_euclid(tmp_path, mask_file):
    out = tmp_path / "e.dtvg"
    assert main(["dt", "--metric", "euclid", "--in", str(mask_file), "--out", str(out)]) == 0
    assert np.allclose(formats.read_dtvg(out), exact_edt(square_ring(24, 6, 17)), atol=0)


def test_dt_command_empty_contour_is_domain_error(tmp_path, capsys):
    empty = tmp_path / "empty.pbm"
    formats.write_pbm(empty, np.zeros((8, 8), dtype=np.uint8))
    code = main(["dt", "--metric", "d8", "--in", str(empty), "--out", str(tmp_path / "x.dtvg")])
    assert code == 1
    assert "EmptyContour" in capsys.readouterr().err


def test_missing_required_flag_is_usage_error(tmp_path, capsys):
    assert main(["dt", "--metric", "d8"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(mask_file):
    assert main(["dt", "--metric", "d8", "--frobnicate", "1"]) == 2


def test_unknown_subcommand_is_usage_error():
    assert main(["transmogrify"]) == 2


def test_rw_encode_deterministic_reruns(tmp_path, mask_file):
    d = tmp_path / "d.dtvg"
    main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(d)])
    a = tmp_path / "a.dtvg"
    b = tmp_path / "b.dtvg"
    argv = ["rw-encode", "--in", str(d), "--dims", "3", "--eps", "0.01", "--k", "1000", "--seed", "42"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()  # byte-identical

    c = tmp_path / "c.dtvg"
    assert main(argv[:-2] + ["--seed", "43", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_rw_encode_g_remap(tmp_path, mask_file):
    d = tmp_path / "d.dtvg"
    main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(d)])
    out = tmp_path / "g.dtvg"
    assert main(["rw-encode", "--in", str(d), "--g", "sine", "--out", str(out)]) == 0
    dist = formats.read_dtvg(d)
    assert np.allclose(formats.read_dtvg(out), np.sin(np.pi * dist / dist.max()), atol=0)


def test_env_seed_fallback(tmp_path, mask_file, monkeypatch):
    d = tmp_path / "d.dtvg"
    main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(d)])
    argv = ["rw-encode", "--in", str(d), "--dims", "2"]
    a = tmp_path / "a.dtvg"
    b = tmp_path / "b.dtvg"
    monkeypatch.setenv("DTVAR_SEED", "7")
    main(argv + ["--out", str(a)])
    monkeypatch.delenv("DTVAR_SEED")
    main(argv + ["--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_config_file_precedence(tmp_path, mask_file, capsys):
    d = tmp_path / "d.dtvg"
    main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(d)])
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dims=2\nseed=5\n")
    out = tmp_path / "enc.dtvg"
    # config supplies dims; the explicit flag overrides the config seed
    code = main([
        "rw-encode", "--in", str(d), "--out", str(out),
        "--config", str(cfg), "--seed", "9", "--print-config",
    ])
    assert code == 0
    p = capsys.readouterr().out
    assert "dims=2" in p and "seed=9" in p
    assert formats.read_dtvg(out).shape == (24, 24, 2)


def test_config_rejects_unknown_key(tmp_path, mask_file, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus=1\n")
    code = main(["dt", "--metric", "d8", "--in", str(mask_file), "--out", str(tmp_path / "x.dtvg"), "--config", str(cfg)])
    assert code == 2
    assert "unknown config key" in capsys.readouterr().err


def test_edges_post_command(tmp_path):
    edge = blurred_square_edge()
    src = tmp_path / "edge.pgm"
    formats.write_pgm(src, np.rint(edge * 255.0), maxval=255)
    out = tmp_path / "contour.pbm"
    assert main(["edges", "post", "--in", str(src), "--out", str(out)]) == 0
    contour = formats.read_pbm(out)
    assert contour.sum() > 0


def test_loss_eval_total_record(tmp_path, capsys):
    code = main([
        "loss", "eval", "--kind", "total",
        "--dist-value", "1", "--photo-value", "1", "--smooth-value", "1", "--ns-value", "1",
    ])
    assert code == 0
    out = capsys.readouterr().out.strip()
    kind, value = out.split(",")
    assert kind == "total"
    assert float(value) == pytest.approx(2.011)


def test_loss_eval_photo_and_dist(tmp_path, capsys, rng):
    a = rng.random((8, 8, 3))
    b = np.clip(a + 0.05, 0.0, 1.0)
    pa, pb = tmp_path / "a.dtvg", tmp_path / "b.dtvg"
    formats.write_dtvg(pa, a)
    formats.write_dtvg(pb, b)
    assert main(["loss", "eval", "--kind", "dist", "--rec", str(pa), "--target", str(pb)]) == 0
    record = capsys.readouterr().out.strip()
    from dtvar.losses import dist_loss

    assert float(record.split(",")[1]) == pytest.approx(dist_loss(a, b))


def test_warp_command_identity(tmp_path, rng):
    depth = tmp_path / "d.dtvg"
    formats.write_dtvg(depth, np.full((12, 16), 2.0))
    aug = rng.random((12, 16, 4))
    src = tmp_path / "aug.dtvg"
    formats.write_dtvg(src, aug)
    out = tmp_path / "rec.dtvg"
    maskp = tmp_path / "valid.pbm"
    code = main([
        "warp", "--depth", str(depth), "--pose", "0,0,0,0,0,0",
        "--K", "16,16,7.5,5.5", "--in", str(src), "--out", str(out), "--mask", str(maskp),
    ])
    assert code == 0
    assert np.array_equal(formats.read_dtvg(out), aug)
    assert formats.read_pbm(maskp).all()


def test_verify_thm1_outputs(tmp_path):
    out = tmp_path / "curve.csv"
    code = main([
        "verify", "thm1", "--shape", "disk", "--size", "32",
        "--mu", "10", "--iters", "400", "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "iteration,relative_rmse"
    assert len(lines) > 3
    assert (tmp_path / "curve.pgm").exists()
    assert (tmp_path / "curve.histogram.csv").exists()


def test_verify_thm2_paired_csv(tmp_path):
    out = tmp_path / "pairs.csv"
    code = main([
        "verify", "thm2", "--trials", "3", "--size", "96", "--seed", "1", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "trial,uniform_iters,dt_iters"
    assert len(lines) == 4
    assert (tmp_path / "pairs.pgm").exists()


def test_verify_thm2_single_fill_trajectory(tmp_path):
    out = tmp_path / "traj.csv"
    code = main([
        "verify", "thm2", "--fill", "dt", "--size", "96", "--seed", "1",
        "--max-iters", "50", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "iteration,loss,error"
    assert len(lines) >= 2


def test_verify_bounds_writes_csv_and_snapshot(tmp_path):
    out = tmp_path / "bounds.csv"
    code = main([
        "verify", "bounds", "--g", "identity", "--samples", "1000",
        "--seed", "2", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("g,k1,k2,k3,alpha_hat")
    assert (tmp_path / "bounds.pgm").exists()


def test_verify_constancy_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["verify", "constancy", "--frames", "6", "--size", "64", "--seed", "2"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = dict(line.split(",") for line in a.read_text().splitlines()[1:])
    assert float(rows["dt"]) == 0.0


def test_pipeline_writes_all_intermediates(tmp_path, rng):
    size = 48
    depth = np.full((size, size), 3.0)
    depth[16:32, 16:32] = 1.5
    formats.write_dtvg(tmp_path / "depth.dtvg", depth)
    formats.write_ppm(tmp_path / "rgb.ppm", rng.random((size, size, 3)))
    edge = blurred_square_edge(size, 12, 36, sigma=1.0)
    formats.write_pgm(tmp_path / "edge.pgm", np.rint(edge * 255.0), maxval=255)

    outdir = tmp_path / "run"
    code = main([
        "pipeline", "--depth", str(tmp_path / "depth.dtvg"),
        "--image", str(tmp_path / "rgb.ppm"), "--edge", str(tmp_path / "edge.pgm"),
        "--K", "32,32,23.5,23.5", "--pose", "0,0,0,0.02,0,0",
        "--outdir", str(outdir), "--seed", "4",
    ])
    assert code == 0
    for name in [
        "normals.dtvg", "wd.dtvg", "wn.dtvg", "contour.pbm", "dist.dtvg",
        "enc.dtvg", "aug.dtvg", "rec.dtvg", "valid.pbm", "losses.csv",
    ]:
        assert (outdir / name).exists(), name
    lines = (outdir / "losses.csv").read_text().splitlines()
    assert lines[0] == "kind,value"
    kinds = [ln.split(",")[0] for ln in lines[1:]]
    assert kinds == ["photo", "dist", "smooth", "normal_smooth", "edge", "total"]
    aug = formats.read_dtvg(outdir / "aug.dtvg")
    assert aug.shape == (size, size, 6)


def test_pipeline_deterministic(tmp_path, rng):
    size = 48
    depth = np.full((size, size), 3.0)
    formats.write_dtvg(tmp_path / "depth.dtvg", depth)
    formats.write_ppm(tmp_path / "rgb.ppm", rng.random((size, size, 3)))
    edge = blurred_square_edge(size, 12, 36)
    formats.write_pgm(tmp_path / "edge.pgm", np.rint(edge * 255.0), maxval=255)
    argv = [
        "pipeline", "--depth", str(tmp_path / "depth.dtvg"),
        "--image", str(tmp_path / "rgb.ppm"), "--edge", str(tmp_path / "edge.pgm"),
        "--K", "32,32,23.5,23.5", "--seed", "4",
    ]
    assert main(argv + ["--outdir", str(tmp_path / "r1")]) == 0
    assert main(argv + ["--outdir", str(tmp_path / "r2")]) == 0
    for name in ["enc.dtvg", "rec.dtvg", "losses.csv", "contour.pbm"]:
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()
