"""Value oracle backed by an external process speaking line-delimited JSON.

Each request is one line ``{"id": int, "masks": [int, ...], "x": [...], "r": [...]}``
and the process must answer with one line ``{"id": int, "values": [float, ...]}``
holding v(x_S) for the masks in order.  Any mismatch, malformed line, or process
exit aborts with :class:`~aog_explainer.errors.OracleError`.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import threading
from typing import Sequence

import numpy as np

from ..errors import ConfigError, OracleError
from .masking import DEFAULT_BATCH, BaselineVector, Sample, ValueOracle


class SubprocessBackend:
    """A spawned worker process; one request in flight at a time."""

    def __init__(self, command: str | Sequence[str], timeout: float | None = 60.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ConfigError("empty subprocess command")
        self.timeout = timeout
        self._lock = threading.Lock()
        self._next_id = 0
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ConfigError(f"cannot start oracle process {self.command[0]!r}: {exc}") from exc

    def _fail(self, message: str, mask: int | None) -> OracleError:
        try:
            # stdout can close a moment before the exit status is visible
            code = self._proc.wait(timeout=1.0)
        except subprocess.TimeoutExpired:
            code = None
        if code is not None:
            err = (self._proc.stderr.read() or "").strip() if self._proc.stderr else ""
            message = f"{message}; process exited with code {code}" + (f": {err[-500:]}" if err else "")
        return OracleError(message, mask)

    def query(self, masks: Sequence[int], x: np.ndarray, r: np.ndarray) -> np.ndarray:
        masks = [int(m) for m in masks]
        first = masks[0] if masks else None
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
            line = json.dumps({"id": req_id, "masks": masks, "x": list(map(float, x)), "r": list(map(float, r))})
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise self._fail(f"cannot write to oracle process: {exc}", first) from exc
            reply = self._read_line()
        if not reply:
            raise self._fail("oracle process closed its output", first)
        try:
            msg = json.loads(reply)
        except json.JSONDecodeError:
            raise self._fail(f"malformed response line {reply[:200]!r}", first) from None
        if not isinstance(msg, dict) or msg.get("id") != req_id:
            raise self._fail(f"response id {msg.get('id') if isinstance(msg, dict) else None!r} does not match request {req_id}", first)
        values = msg.get("values")
        if not isinstance(values, list) or len(values) != len(masks):
            raise self._fail(f"expected {len(masks)} values in response {req_id}", first)
        out = np.empty(len(values))
        for k, val in enumerate(values):
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
                raise self._fail(f"invalid value {val!r}", masks[k])
            out[k] = val
        return out

    def _read_line(self) -> str:
        if self.timeout is None:
            return self._proc.stdout.readline()
        box: list[str] = []
        reader = threading.Thread(target=lambda: box.append(self._proc.stdout.readline()), daemon=True)
        reader.start()
        reader.join(self.timeout)
        if reader.is_alive():
            self.close()
            raise OracleError(f"oracle process did not answer within {self.timeout}s")
        return box[0]

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        for stream in (self._proc.stdout, self._proc.stderr):
            if stream:
                stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SubprocessOracle(ValueOracle):
    """v(x_S) from a :class:`SubprocessBackend`; single-flight, batched."""

    concurrent = False

    def __init__(
        self,
        backend: SubprocessBackend,
        sample: Sample,
        baseline: BaselineVector,
        batch_size: int = DEFAULT_BATCH,
    ):
        super().__init__(sample, baseline)
        self.backend = backend
        self.batch_size = batch_size
        self.oracle_id = "subprocess:" + " ".join(backend.command)

    def evaluate(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        out = np.empty(masks.shape[0])
        for start in range(0, masks.shape[0], self.batch_size):
            chunk = masks[start : start + self.batch_size]
            out[start : start + chunk.shape[0]] = self.backend.query(chunk.tolist(), self.sample.x, self.baseline.r)
        return out
