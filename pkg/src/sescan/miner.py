"""Brute-force search for a function name whose selector hits a target.

Candidate names are enumerated length-ascending, then lexicographically in
alphabet order.  Each candidate has a global index in that order, so the
space can be cut into contiguous ranges for workers while the earliest
match still wins.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Tuple

from Crypto.Hash import keccak as _keccak

from sescan.primitives import FunctionHeader, Selector, compute_selector

IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$")
DEFAULT_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
CHUNK = 1 << 15


@dataclass(frozen=True)
class MiningTask:
    target: Selector
    match_bits: int = 32
    alphabet: str = DEFAULT_ALPHABET
    name_length_max: int = 4
    arg_signature: str = "()"
    budget: Optional[int] = None  # None means the whole space

    def __post_init__(self):
        if not 1 <= self.match_bits <= 32:
            raise ValueError("match_bits must be in [1, 32]")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0")
        if not self.alphabet:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has repeated characters")
        bad = set(self.alphabet) - IDENT_CHARS
        if bad:
            raise ValueError(f"alphabet has non-identifier characters: {''.join(sorted(bad))!r}")
        if self.name_length_max < 1:
            raise ValueError("name_length_max must be positive")
        # validates the argument list; names are checked per candidate anyway
        FunctionHeader.parse("x" + self.arg_signature)

    @property
    def first_chars(self) -> str:
        return "".join(c for c in self.alphabet if not c.isdigit())

    def space_size(self) -> int:
        f, a = len(self.first_chars), len(self.alphabet)
        return sum(f * a ** (n - 1) for n in range(1, self.name_length_max + 1))

    def limit(self) -> int:
        size = self.space_size()
        return size if self.budget is None else min(size, self.budget)


@dataclass
class MiningResult:
    found: Optional[FunctionHeader]
    candidates_tried: int
    elapsed: float

    @property
    def selector(self) -> Optional[Selector]:
        if self.found is None:
            return None
        return compute_selector(self.found)


def name_at(task: MiningTask, index: int) -> str:
    """Inverse of the enumeration order: the candidate name at ``index``."""
    first, alpha = task.first_chars, task.alphabet
    for n in range(1, task.name_length_max + 1):
        count = len(first) * len(alpha) ** (n - 1)
        if index < count:
            rest = []
            for _ in range(n - 1):
                index, r = divmod(index, len(alpha))
                rest.append(alpha[r])
            return first[index] + "".join(reversed(rest))
        index -= count
    raise IndexError("index outside the search space")


def iter_names(task: MiningTask, start: int = 0, stop: Optional[int] = None) -> Iterator[str]:
    """Yield names for indices ``[start, stop)`` in enumeration order."""
    stop = task.space_size() if stop is None else stop
    first, alpha = task.first_chars, task.alphabet
    base = 0
    for n in range(1, task.name_length_max + 1):
        count = len(first) * len(alpha) ** (n - 1)
        lo, hi = max(start, base), min(stop, base + count)
        if lo < hi:
            # seek to lo: head is a full prefix, tail cycles through product()
            k = min(n - 1, 3)
            tail_count = len(alpha) ** k
            pos = lo - base
            head_idx, skip = divmod(pos, tail_count)
            remaining = hi - lo
            while remaining > 0:
                head = name_at(task, base + head_idx * tail_count)[: n - k]
                tails = itertools.product(alpha, repeat=k)
                for t in itertools.islice(tails, skip, skip + remaining):
                    yield head + "".join(t)
                remaining -= min(tail_count - skip, remaining)
                skip = 0
                head_idx += 1
        base += count
        if base >= stop:
            return


def _scan_range(task: MiningTask, start: int, stop: int) -> Optional[Tuple[int, str]]:
    shift = 32 - task.match_bits
    want = int(task.target) >> shift
    suffix = task.arg_signature.encode("ascii")
    new = _keccak.new
    for i, name in enumerate(iter_names(task, start, stop), start):
        digest = new(data=name.encode("ascii") + suffix, digest_bits=256).digest()
        if int.from_bytes(digest[:4], "big") >> shift == want:
            return i, name
    return None


def mine(
    task: MiningTask,
    workers: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> MiningResult:
    """Return the first candidate (in enumeration order) matching the target.

    Work proceeds in waves of ``workers`` contiguous chunks; a wave is
    merged by smallest index, so the answer and ``candidates_tried`` do not
    depend on the worker count.
    """
    t0 = time.perf_counter()
    limit = task.limit()
    done = 0
    hit = None
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while done < limit and hit is None:
            bounds = []
            lo = done
            for _ in range(max(workers, 1)):
                if lo >= limit:
                    break
                bounds.append((lo, min(lo + CHUNK, limit)))
                lo = bounds[-1][1]
            if pool is None:
                results = [_scan_range(task, a, b) for a, b in bounds]
            else:
                futs = [pool.submit(_scan_range, task, a, b) for a, b in bounds]
                results = [f.result() for f in futs]
            matches = [r for r in results if r is not None]
            if matches:
                hit = min(matches)
            done = lo
            if progress is not None:
                progress(min(done, limit), limit)
    finally:
        if pool is not None:
            pool.shutdown()
    elapsed = time.perf_counter() - t0
    if hit is None:
        return MiningResult(None, limit, elapsed)
    index, name = hit
    return MiningResult(FunctionHeader.parse(name + task.arg_signature), index + 1, elapsed)


@dataclass
class BenchResult:
    candidates: int
    elapsed: float

    @property
    def rate(self) -> float:
        return self.candidates / self.elapsed if self.elapsed > 0 else 0.0

    def expected_seconds(self, match_bits: int = 32) -> float:
        """Expected wall time for a ``match_bits`` search at this rate."""
        return 2**match_bits / self.rate


def throughput_bench(seconds: float = 1.0) -> BenchResult:
    """Evaluate selectors on a fixed synthetic stream for about ``seconds``."""
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    task = MiningTask(Selector(b"\x00\x00\x00\x00"), 32, DEFAULT_ALPHABET, 6, "(uint256)")
    suffix = task.arg_signature.encode("ascii")
    new = _keccak.new
    n = 0
    t0 = time.perf_counter()
    deadline = t0 + seconds
    names = iter_names(task)
    while True:
        for name in itertools.islice(names, 1024):
            new(data=name.encode("ascii") + suffix, digest_bits=256).digest()
        n += 1024
        now = time.perf_counter()
        if now >= deadline:
            return BenchResult(n, now - t0)


def default_workers() -> int:
    return os.cpu_count() or 1
