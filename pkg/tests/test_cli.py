import socket
import threading
import time

import numpy as np
import pytest

from latentseal import cli, ecies, henon, images
from latentseal.cli import EXIT_AUTH, EXIT_FORMAT, EXIT_IO, EXIT_OK


def run(args):
    return cli.main(args)


@pytest.fixture()
def keys(tmp_path):
    prefix = tmp_path / "key"
    assert run(["keygen", str(prefix), "--seed", "42"]) == EXIT_OK
    return prefix


@pytest.fixture()
def dct_model_path(tmp_path):
    path = tmp_path / "dct.lscm"
    assert run(["make-model", str(path), "--m", "100"]) == EXIT_OK
    return path


@pytest.fixture()
def test_image(tmp_path):
    path = tmp_path / "input.pgm"
    images.write_image(images.smooth_gradient(64), path)
    return path


def test_keygen_writes_three_files(tmp_path):
    prefix = tmp_path / "k"
    assert run(["keygen", str(prefix)]) == EXIT_OK
    priv = ecies.load_private_key(prefix.with_suffix(".priv"))
    pub = ecies.load_public_key(prefix.with_suffix(".pub"))
    assert ecies.keygen(None) is not None  # entropy path sanity
    assert ecies.EciesKeypair(priv, pub)  # loadable pair
    henon.load_sym_key(prefix.with_suffix(".sym")).validate()


def test_keygen_distinct_without_seed(tmp_path):
    run(["keygen", str(tmp_path / "a")])
    run(["keygen", str(tmp_path / "b")])
    assert (tmp_path / "a.priv").read_text() != (tmp_path / "b.priv").read_text()


def test_keygen_seeded_reproducible(tmp_path):
    run(["keygen", str(tmp_path / "a"), "--seed", "42"])
    run(["keygen", str(tmp_path / "b"), "--seed", "42"])
    for suffix in (".priv", ".pub", ".sym"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_encrypt_decrypt_round_trip(tmp_path, keys, dct_model_path, test_image, capsys):
    payload = tmp_path / "out.lsp"
    rc = run([
        "encrypt", str(test_image),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--out", str(payload),
    ])
    assert rc == EXIT_OK
    assert "encrypt_s=" in capsys.readouterr().out
    recon = tmp_path / "recon.pgm"
    rc = run([
        "decrypt", str(payload),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--priv", str(keys) + ".priv",
        "--out", str(recon),
    ])
    assert rc == EXIT_OK
    # on-disk result equals the pure codec round trip
    from latentseal import codec

    model = codec.load_model(dct_model_path)
    img = images.read_image(test_image)
    expected = model.decode(model.encode(img), img.shape[1], img.shape[0])
    assert np.array_equal(images.read_image(recon), expected)


def test_decrypt_wrong_key_exit_code(tmp_path, keys, dct_model_path, test_image):
    payload = tmp_path / "out.lsp"
    run([
        "encrypt", str(test_image),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--out", str(payload),
    ])
    other = tmp_path / "other"
    run(["keygen", str(other), "--seed", "7"])
    out = tmp_path / "never.pgm"
    rc = run([
        "decrypt", str(payload),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--priv", str(other) + ".priv",
        "--out", str(out),
    ])
    assert rc == EXIT_AUTH
    assert not out.exists()  # no partial output


def test_decrypt_truncated_payload(tmp_path, keys, dct_model_path):
    bad = tmp_path / "trunc.lsp"
    bad.write_bytes(b"LSP1\x01\x00")
    out = tmp_path / "never.pgm"
    rc = run([
        "decrypt", str(bad),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--priv", str(keys) + ".priv",
        "--out", str(out),
    ])
    assert rc == EXIT_FORMAT
    assert not out.exists()


def test_encrypt_missing_image(tmp_path, keys, dct_model_path):
    rc = run([
        "encrypt", str(tmp_path / "nope.pgm"),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--out", str(tmp_path / "o.lsp"),
    ])
    assert rc == EXIT_IO


def test_make_dataset_and_evaluate(tmp_path, keys, capsys):
    data_dir = tmp_path / "data"
    assert run(["make-dataset", str(data_dir), "--count", "4", "--size", "16", "--seed", "1"]) == EXIT_OK
    model = tmp_path / "full.lscm"
    run(["make-model", str(model), "--m", "256"])  # full rank at 16x16: lossless
    report = tmp_path / "report.csv"
    rc = run([
        "evaluate", str(data_dir),
        "--model", str(model),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--priv", str(keys) + ".priv",
        "--out", str(report),
    ])
    assert rc == EXIT_OK
    lines = report.read_text().strip().split("\n")
    assert lines[0] == "ssim,psnr_db,mse,encrypt_s,decrypt_s"
    assert len(lines) == 5
    for row in lines[1:]:
        ssim_val, psnr_val, mse_val = row.split(",")[:3]
        assert float(ssim_val) == 1.0
        assert psnr_val == "inf"
        assert float(mse_val) == 0.0


def test_evaluate_empty_dir(tmp_path, keys, dct_model_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    report = tmp_path / "r.csv"
    rc = run([
        "evaluate", str(empty),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--priv", str(keys) + ".priv",
        "--out", str(report),
    ])
    assert rc == EXIT_OK
    assert report.read_text() == "ssim,psnr_db,mse,encrypt_s,decrypt_s\n"


def test_henon_plot(tmp_path, keys):
    out = tmp_path / "traj.csv"
    assert run(["henon-plot", "--sym", str(keys) + ".sym", "--n", "10000", "--out", str(out)]) == EXIT_OK
    rows = out.read_text().strip().split("\n")
    assert rows[0] == "x,y"
    pts = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert pts.shape == (10000, 2)
    assert np.abs(pts[:, 0]).max() <= 1.5
    assert np.abs(pts[:, 1]).max() <= 0.45
    out2 = tmp_path / "traj2.csv"
    run(["henon-plot", "--sym", str(keys) + ".sym", "--n", "10000", "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_henon_plot_zero_points(tmp_path, keys):
    out = tmp_path / "empty.csv"
    assert run(["henon-plot", "--sym", str(keys) + ".sym", "--n", "0", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == "x,y\n"


def test_train_and_use_neural_model(tmp_path, keys):
    data_dir = tmp_path / "data"
    run(["make-dataset", str(data_dir), "--count", "6", "--size", "8", "--seed", "3"])
    model = tmp_path / "nn.lscm"
    rc = run([
        "train", str(data_dir), str(model),
        "--m", "6", "--hidden", "16", "--epochs", "20", "--seed", "1", "--batch-size", "2",
    ])
    assert rc == EXIT_OK
    img = tmp_path / "data" / "img_0000.pgm"
    payload = tmp_path / "p.lsp"
    assert run([
        "encrypt", str(img),
        "--model", str(model),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--out", str(payload),
    ]) == EXIT_OK
    recon = tmp_path / "r.pgm"
    assert run([
        "decrypt", str(payload),
        "--model", str(model),
        "--sym", str(keys) + ".sym",
        "--priv", str(keys) + ".priv",
        "--out", str(recon),
    ]) == EXIT_OK
    assert images.read_image(recon).shape == (8, 8)


def test_send_recv_cli(tmp_path, keys, dct_model_path, test_image):
    payload = tmp_path / "p.lsp"
    run([
        "encrypt", str(test_image),
        "--model", str(dct_model_path),
        "--sym", str(keys) + ".sym",
        "--pub", str(keys) + ".pub",
        "--out", str(payload),
    ])
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    out = tmp_path / "received.lsp"
    codes = {}

    def receiver():
        codes["recv"] = run(["recv", str(port), "--out", str(out), "--timeout", "10"])

    t = threading.Thread(target=receiver)
    t.start()
    time.sleep(0.1)
    assert run(["send", str(payload), f"127.0.0.1:{port}"]) == EXIT_OK
    t.join(timeout=10)
    assert codes["recv"] == EXIT_OK
    assert out.read_bytes() == payload.read_bytes()


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["encrypt"])  # missing required flags
    assert exc.value.code == 2
