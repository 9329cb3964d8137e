"""
Map paralelo com ordem determinística, limitado por STL_THREADS.

Os resultados voltam sempre na ordem de submissão, de modo que a saída de
qualquer comando é idêntica byte a byte para 1 ou N threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def max_workers() -> int:
    """Número de threads efetivo (STL_THREADS ou CPU count; mínimo 1)."""
    raw = (os.getenv("STL_THREADS") or "").strip()
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """
    Aplica `fn` a cada item, possivelmente em paralelo, preservando a ordem.

    Parameters
    ----------
    fn : Callable
        Função pura (sem estado compartilhado mutável).
    items : Iterable
        Entradas.

    Returns
    -------
    list
        Resultados na mesma ordem de `items`.
    """
    seq = list(items)
    workers = min(max_workers(), len(seq))
    if workers <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
