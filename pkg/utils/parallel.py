# utils/parallel.py

from concurrent.futures import ThreadPoolExecutor
from itertools import islice
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from app_config import settings

T = TypeVar("T")
R = TypeVar("R")

CHUNK = 256


def _chunks(items: Iterable[T], size: int):
    it = iter(items)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1,
                 desc: Optional[str] = None, total: Optional[int] = None) -> List[R]:
    """
    Map fn over items on a thread pool; results come back in input order
    for every job count.
    """
    bar = tqdm(total=total, desc=desc, leave=False) if desc and settings().progress else None
    results: List[R] = []
    try:
        if jobs <= 1:
            for item in items:
                results.append(fn(item))
                if bar is not None:
                    bar.update(1)
            return results
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for chunk in _chunks(items, CHUNK):
                results.extend(pool.map(fn, chunk))
                if bar is not None:
                    bar.update(len(chunk))
        return results
    finally:
        if bar is not None:
            bar.close()
