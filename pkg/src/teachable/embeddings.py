"""Word-vector store, cosine similarity, and keyword matching.

Two interchangeable encodings are supported:

* text: first line ``<word_count> <dimension>``, then ``word v1 ... vD``
  per line, space-separated;
* binary: the same ASCII header terminated by ``\\n``, then repeated records
  of the word's UTF-8 bytes, one space, and D little-endian float32 values.

Vectors are held as float32 (matching common pretrained distributions);
cosine accumulates in float64.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class EmbeddingError(Exception):
    """Malformed embedding file."""


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable word → vector map; every vector has the same dimension."""

    dimension: int = 300
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word)

    def __len__(self) -> int:
        return len(self.vectors)


DEFAULT_TAU = 0.2


def validate_tau(tau: float) -> float:
    if not -1.0 <= tau <= 1.0:
        raise ValueError(f"similarity threshold must be in [-1, 1], got {tau}")
    return tau


def _validate_vector(word: str, vec: np.ndarray, dimension: int, where: str) -> None:
    if vec.shape != (dimension,):
        raise EmbeddingError(f"{where}: vector for {word!r} has {vec.shape[0]} components, expected {dimension}")
    if not np.any(vec):
        raise EmbeddingError(f"{where}: vector for {word!r} is all-zero")


def _parse_header(line: str, where: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise EmbeddingError(f"{where}: header must be '<word_count> <dimension>'")
    try:
        count, dimension = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingError(f"{where}: non-numeric header {line!r}") from None
    if count < 0 or dimension <= 0:
        raise EmbeddingError(f"{where}: invalid header counts {line!r}")
    return count, dimension


def load_text_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse the whitespace text format; duplicate words keep the last vector."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise EmbeddingError(f"{path}:1: missing header line")
        count, dimension = _parse_header(header, f"{path}:1")
        n_lines = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            n_lines += 1
            parts = line.split()
            word = parts[0]
            if len(parts) - 1 != dimension:
                raise EmbeddingError(
                    f"{path}:{lineno}: {len(parts) - 1} components for {word!r}, expected {dimension}"
                )
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float32)
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric component") from None
            _validate_vector(word, vec, dimension, f"{path}:{lineno}")
            vectors[word] = vec
    if n_lines != count:
        raise EmbeddingError(f"{path}: header declares {count} words but file has {n_lines}")
    return EmbeddingStore(dimension=dimension, vectors=vectors)


def save_text_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(store.vectors)} {store.dimension}\n")
        for word, vec in store.vectors.items():
            comps = " ".join(repr(float(x)) for x in vec)
            fh.write(f"{word} {comps}\n")


def load_binary_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse the binary format; same store semantics as the text loader."""
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise EmbeddingError(f"{path}: missing header line")
    count, dimension = _parse_header(data[:nl].decode("ascii", errors="replace"), f"{path}: header")
    vec_bytes = 4 * dimension
    vectors: dict[str, np.ndarray] = {}
    pos = nl + 1
    for i in range(count):
        sp = data.find(b" ", pos)
        if sp < 0:
            raise EmbeddingError(f"{path}: truncated at record {i} (no word terminator)")
        word = data[pos:sp].decode("utf-8")
        start = sp + 1
        end = start + vec_bytes
        if end > len(data):
            raise EmbeddingError(f"{path}: truncated at record {i} ({word!r})")
        vec = np.frombuffer(data[start:end], dtype="<f4").astype(np.float32)
        _validate_vector(word, vec, dimension, f"{path}: record {i}")
        vectors[word] = vec
        pos = end
    if pos != len(data):
        raise EmbeddingError(f"{path}: {len(data) - pos} trailing bytes after {count} records")
    return EmbeddingStore(dimension=dimension, vectors=vectors)


def save_binary_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(f"{len(store.vectors)} {store.dimension}\n".encode("ascii"))
        for word, vec in store.vectors.items():
            fh.write(word.encode("utf-8") + b" ")
            fh.write(struct.pack(f"<{store.dimension}f", *(float(x) for x in vec)))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a,b) / (|a||b|) in float64, clamped to [-1, 1]."""
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    if a64.shape != b64.shape:
        raise ValueError(f"dimension mismatch: {a64.shape} vs {b64.shape}")
    na = float(np.linalg.norm(a64))
    nb = float(np.linalg.norm(b64))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.clip(float(np.dot(a64, b64)) / (na * nb), -1.0, 1.0))


def similar_count(word: str, keywords: set[str] | frozenset[str], store: EmbeddingStore, tau: float) -> int:
    """Number of keywords whose similarity to ``word`` reaches ``tau``.

    A keyword equal to the word always counts (similarity 1 by definition),
    embedding or not; any other pairing needs vectors on both sides.
    """
    tau = min(tau, 1.0)
    vec = store.get(word)
    n = 0
    for kw in keywords:
        if kw == word:
            n += 1
            continue
        if vec is None:
            continue
        kvec = store.get(kw)
        if kvec is None:
            continue
        if cosine(vec, kvec) >= tau:
            n += 1
    return n
