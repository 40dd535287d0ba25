"""One-shot framed TCP transfer for encrypted payloads.

Wire format: 4-byte big-endian length prefix followed by the payload
bytes.  Frames above 16 MiB are refused; the receiver checks the
payload magic before writing anything to disk.
"""

import socket
import struct
import time
from pathlib import Path

from .errors import BadHeaderError, FrameTooLargeError, IoError
from .pipeline import PAYLOAD_MAGIC

FRAME_CAP = 16 * 1024 * 1024
CHUNK = 4096


def send_bytes(data: bytes, host: str, port: int, throttle: float | None = None) -> None:
    """Connect and send one frame; throttle is bytes per second."""
    if len(data) > FRAME_CAP:
        raise FrameTooLargeError(f"{len(data)} bytes exceeds {FRAME_CAP}")
    with socket.create_connection((host, port)) as sock:
        sock.sendall(struct.pack(">I", len(data)))
        if throttle is None:
            sock.sendall(data)
            return
        start = time.monotonic()
        sent = 0
        for off in range(0, len(data), CHUNK):
            sock.sendall(data[off : off + CHUNK])
            sent += min(CHUNK, len(data) - off)
            # sleep until the pacing schedule catches up
            due = sent / throttle
            elapsed = time.monotonic() - start
            if due > elapsed:
                time.sleep(due - elapsed)


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(min(CHUNK, n - len(buf)))
        if not chunk:
            raise IoError(f"connection closed after {len(buf)}/{n} bytes")
        buf.extend(chunk)
    return bytes(buf)


def recv_bytes(port: int, host: str = "", timeout: float | None = 30.0) -> bytes:
    """Accept one connection, read one frame, validate the payload magic."""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as srv:
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind((host, port))
        srv.listen(1)
        srv.settimeout(timeout)
        conn, _ = srv.accept()
        with conn:
            conn.settimeout(timeout)
            (length,) = struct.unpack(">I", _recv_exact(conn, 4))
            if length > FRAME_CAP:
                raise FrameTooLargeError(f"announced frame of {length} bytes")
            data = _recv_exact(conn, length)
    if data[:4] != PAYLOAD_MAGIC:
        raise BadHeaderError("received frame lacks payload magic")
    return data


def send_file(path, host: str, port: int, throttle: float | None = None) -> None:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IoError(str(e)) from e
    send_bytes(data, host, port, throttle)


def recv_file(port: int, out_path, host: str = "", timeout: float | None = 30.0) -> int:
    data = recv_bytes(port, host, timeout)
    out = Path(out_path)
    tmp = out.with_name(out.name + ".tmp")
    try:
        tmp.write_bytes(data)
        tmp.rename(out)
    except OSError as e:
        raise IoError(str(e)) from e
    return len(data)
