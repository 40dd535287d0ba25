"""Command-line interface.

Exit codes: 0 ok, 2 usage, 3 io, 4 crypto-auth, 5 format, 6 divergence.
All output files are written to a temp name and renamed on success, so
no error path leaves a partial file behind.
"""

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import codec, ecies, henon, images, pipeline, train, transfer
from .errors import (
    AuthFailureError,
    BadHeaderError,
    DivergenceError,
    FrameTooLargeError,
    InvalidPointError,
    IoError,
    LatentSealError,
    MTooLargeError,
    ShapeMismatchError,
)
from .metrics import QualityReport, SsimParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_AUTH = 4
EXIT_FORMAT = 5
EXIT_DIVERGENCE = 6

_EXIT_CODES = [
    ((AuthFailureError, InvalidPointError), EXIT_AUTH),
    ((DivergenceError,), EXIT_DIVERGENCE),
    ((BadHeaderError, FrameTooLargeError, MTooLargeError, ShapeMismatchError), EXIT_FORMAT),
    ((IoError, OSError), EXIT_IO),
]


def _atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_keygen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.seed is None:
        kp = ecies.keygen()
    else:
        kp = ecies.keygen(rng.bytes(32))
    sym = henon.random_sym_key(rng)
    prefix = Path(args.out_prefix)
    _atomic_write(prefix.with_suffix(".priv"), (kp.private_scalar.to_bytes(32, "big").hex() + "\n").encode())
    _atomic_write(prefix.with_suffix(".pub"), (kp.public_bytes.hex() + "\n").encode())
    buf = f"{sym.x0!r} {sym.y0!r}\n{sym.params.a!r} {sym.params.b!r}\n{sym.burn_in}\n"
    _atomic_write(prefix.with_suffix(".sym"), buf.encode())
    print(f"wrote {prefix}.priv {prefix}.pub {prefix}.sym")
    return EXIT_OK


def _atomic_save_model(model, path) -> None:
    fd, tmp = tempfile.mkstemp(dir=Path(path).parent or Path("."))
    os.close(fd)
    try:
        codec.save_model(model, tmp)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_make_model(args) -> int:
    _atomic_save_model(codec.dct_model(args.m), args.out)
    print(f"wrote dct model (m={args.m}) to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    paths = sorted(Path(args.dataset_dir).glob("*.pgm"))
    if not paths:
        raise IoError(f"no .pgm images in {args.dataset_dir}")
    dataset = [images.read_image(p) for p in paths]
    config = train.TrainConfig(
        m=args.m,
        hidden=tuple(args.hidden),
        lr=args.lr,
        epochs=args.epochs,
        seed=args.seed,
        batch_size=args.batch_size,
        lam=args.lam,
    )
    if args.lam > 0:
        result = train.train_adversarial(dataset, config)
        model, trace = result.model, result.ae_losses
    else:
        model, trace = train.train_autoencoder(dataset, config)
    _atomic_save_model(model, args.out)
    final = trace[-1] if trace else float("nan")
    print(f"trained {args.epochs} epochs, final loss {final:.6g}, wrote {args.out}")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    img = images.read_image(args.image)
    model = codec.load_model(args.model)
    sym = henon.load_sym_key(args.sym)
    pub = ecies.load_public_key(args.pub)
    payload, seconds = pipeline.compress_encrypt(img, model, sym, pub)
    _atomic_write(args.out, payload.serialize())
    print(f"encrypt_s={seconds:.6g}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    try:
        data = Path(args.payload).read_bytes()
    except OSError as e:
        raise IoError(str(e)) from e
    payload = pipeline.EncryptedPayload.parse(data)
    model = codec.load_model(args.model)
    sym = henon.load_sym_key(args.sym)
    priv = ecies.load_private_key(args.priv)
    img, seconds = pipeline.decrypt_reconstruct(payload, model, sym, priv)
    raster = b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]) + img.tobytes()
    _atomic_write(args.out, raster)
    print(f"decrypt_s={seconds:.6g}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = codec.load_model(args.model)
    sym = henon.load_sym_key(args.sym)
    pub = ecies.load_public_key(args.pub)
    priv = ecies.load_private_key(args.priv)
    params = SsimParams(window=args.window)
    paths = sorted(Path(args.image_dir).glob("*.pgm"))
    rows = [QualityReport.CSV_HEADER]
    failures = 0
    for path in paths:
        try:
            img = images.read_image(path)
            report = pipeline.evaluate(img, model, sym, pub, priv, params)
            rows.append(report.csv_row())
        except LatentSealError as e:
            failures += 1
            print(f"error: {path}: {e}", file=sys.stderr)
    _atomic_write(args.out, ("\n".join(rows) + "\n").encode())
    print(f"wrote {len(rows) - 1} rows to {args.out}")
    return EXIT_IO if failures else EXIT_OK


def cmd_henon_plot(args) -> int:
    sym = henon.load_sym_key(args.sym)
    points = henon.henon_trajectory(sym, args.n)
    lines = ["x,y"]
    lines.extend(f"{float(x)!r},{float(y)!r}" for x, y in points)
    _atomic_write(args.out, ("\n".join(lines) + "\n").encode())
    print(f"wrote {len(points)} points to {args.out}")
    return EXIT_OK


def cmd_send(args) -> int:
    host, _, port = args.dest.rpartition(":")
    if not host or not port.isdigit():
        raise IoError(f"destination must be host:port, got {args.dest!r}")
    transfer.send_file(args.payload, host, int(port), args.throttle)
    print("sent")
    return EXIT_OK


def cmd_recv(args) -> int:
    n = transfer.recv_file(args.port, args.out, timeout=args.timeout)
    print(f"received {n} bytes to {args.out}")
    return EXIT_OK


def cmd_make_dataset(args) -> int:
    paths = images.make_dataset(args.out_dir, args.count, args.size, args.seed)
    print(f"wrote {len(paths)} images to {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentseal")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate .priv/.pub/.sym key files")
    p.add_argument("out_prefix")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("make-model", help="write a deterministic DCT codec model")
    p.add_argument("out")
    p.add_argument("--m", type=int, default=100)
    p.set_defaults(func=cmd_make_model)

    p = sub.add_parser("train", help="train a neural codec on a .pgm directory")
    p.add_argument("dataset_dir")
    p.add_argument("out")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--hidden", type=int, nargs="+", default=[128])
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lam", type=float, default=0.0, help="adversarial loss weight")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("encrypt", help="compress and encrypt an image")
    p.add_argument("image")
    p.add_argument("--model", required=True)
    p.add_argument("--sym", required=True)
    p.add_argument("--pub", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt and reconstruct an image")
    p.add_argument("payload")
    p.add_argument("--model", required=True)
    p.add_argument("--sym", required=True)
    p.add_argument("--priv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("evaluate", help="quality/timing CSV over an image directory")
    p.add_argument("image_dir")
    p.add_argument("--model", required=True)
    p.add_argument("--sym", required=True)
    p.add_argument("--pub", required=True)
    p.add_argument("--priv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=None, help="SSIM window side (default global)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("henon-plot", help="export orbit points as CSV")
    p.add_argument("--sym", required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_henon_plot)

    p = sub.add_parser("send", help="send a payload file over TCP")
    p.add_argument("payload")
    p.add_argument("dest", help="host:port")
    p.add_argument("--throttle", type=float, default=None, help="bytes per second")
    p.set_defaults(func=cmd_send)

    p = sub.add_parser("recv", help="receive one payload over TCP")
    p.add_argument("port", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_recv)

    p = sub.add_parser("make-dataset", help="generate synthetic training images")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=32)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_dataset)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LatentSealError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        for excs, code in _EXIT_CODES:
            if isinstance(e, excs):
                return code
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
