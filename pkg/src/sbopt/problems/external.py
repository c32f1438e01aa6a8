"""Adapter for objectives computed by an external program.

The command template must contain ``{x}``; it is replaced by the point as
space-separated integers. The last non-empty line of standard output must
hold a single real number.
"""

import shlex
import subprocess
import threading
import time

import numpy as np

from ..core import Bounds
from ..exceptions import ConfigError, EvaluationFailure
from .base import Problem

PLACEHOLDER = "{x}"

_locks = {}
_locks_guard = threading.Lock()


def _semaphore(template, max_parallel):
    with _locks_guard:
        key = (template, max_parallel)
        if key not in _locks:
            _locks[key] = threading.BoundedSemaphore(max_parallel)
        return _locks[key]


def build_command(template, point):
    if PLACEHOLDER not in template:
        raise ConfigError(f"command template must contain {PLACEHOLDER}")
    args = " ".join(str(int(v)) for v in np.asarray(point).ravel())
    return shlex.split(template.replace(PLACEHOLDER, args))


def parse_output(stdout):
    lines = [ln.strip() for ln in stdout.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("no output")
    value = float(lines[-1])
    if not np.isfinite(value):
        raise ValueError(f"non-finite value {lines[-1]!r}")
    return value


def external_eval(template, point, timeout=None):
    """Run the command for ``point`` and return ``(value, seconds)``."""
    cmd = build_command(template, point)
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired as exc:
        out = (exc.stdout or b"")
        out = out.decode(errors="replace") if isinstance(out, bytes) else out
        raise EvaluationFailure(f"command timed out after {timeout}s: {cmd!r}", output=out) from exc
    except OSError as exc:
        raise EvaluationFailure(f"could not start {cmd!r}: {exc}") from exc
    elapsed = time.perf_counter() - t0
    captured = proc.stdout + proc.stderr
    if proc.returncode != 0:
        raise EvaluationFailure(
            f"command exited with status {proc.returncode}: {cmd!r}", output=captured
        )
    try:
        return parse_output(proc.stdout), elapsed
    except ValueError as exc:
        raise EvaluationFailure(f"unparseable output ({exc}): {cmd!r}", output=captured) from exc


class ExternalCommand(Problem):
    """Objective delegated to a subprocess; noise is whatever the program adds.

    Defaults to 49 variables in ``0..7``, the layout of the gas-distribution
    plate configuration benchmark.
    """

    name = "external"

    def __init__(self, template, bounds=None, timeout=None, max_parallel=1):
        build_command(template, [0])
        self.template = template
        self.bounds = bounds if bounds is not None else Bounds.uniform(49, 0, 7)
        self.timeout = timeout
        self.max_parallel = max_parallel
        self.last_eval_time = None

    def evaluate(self, x, rng=None):
        x = self._check(x)
        with _semaphore(self.template, self.max_parallel):
            value, self.last_eval_time = external_eval(self.template, x, self.timeout)
        return value
