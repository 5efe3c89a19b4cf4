"""Embedding persistence.

Two formats:

* Native (magic ``STVEMB01``): version byte, flags, JSON metadata block
  (beta, seed, fingerprints, ...), vocabulary with counts, then the input
  matrix as little-endian float32 rows, optionally followed by the output
  matrix. Round-trips bit-exactly and carries full provenance.
* Interoperable binary format used by common word2vec tooling:
  ``V N\\n`` header, then per word the token, a space, N little-endian
  float32 values, and a newline. Carries no counts or metadata.
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .cbow.model import Embedding

EMB_MAGIC = b"STVEMB01"
EMB_VERSION = 1

_FLAG_HAS_OUTPUT = 1


class EmbeddingIntegrityError(ValueError):
    """Raised when an embedding file is corrupt, truncated, or inconsistent."""


def save_embedding(
    embedding: Embedding, path: str | Path, include_output: bool = True
) -> None:
    """Write the native format. Bit-exact round trip with load_embedding."""
    syn0 = np.ascontiguousarray(embedding.input_vectors, dtype="<f4")
    syn1 = embedding.output_vectors
    has_output = include_output and syn1 is not None
    v, n = syn0.shape
    meta_blob = json.dumps(embedding.meta, sort_keys=True).encode()
    try:
        with open(path, "wb") as f:
            f.write(EMB_MAGIC)
            f.write(struct.pack("<BB", EMB_VERSION, _FLAG_HAS_OUTPUT if has_output else 0))
            f.write(struct.pack("<I", len(meta_blob)))
            f.write(meta_blob)
            f.write(struct.pack("<II", v, n))
            for w, c in zip(embedding.vocab.words, embedding.vocab.counts):
                wb = w.encode()
                f.write(struct.pack("<H", len(wb)))
                f.write(wb)
                f.write(struct.pack("<q", int(c)))
            f.write(syn0.tobytes())
            if has_output:
                f.write(np.ascontiguousarray(syn1, dtype="<f4").tobytes())
    except OSError as e:
        raise OSError(f"failed writing embedding to {path}: {e}") from e


def load_embedding(path: str | Path) -> Embedding:
    """Read the native format, validating structure and finiteness."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise OSError(f"failed reading embedding from {path}: {e}") from e
    buf = io.BytesIO(data)

    def take(nbytes: int) -> bytes:
        b = buf.read(nbytes)
        if len(b) != nbytes:
            raise EmbeddingIntegrityError(f"{path}: truncated embedding file")
        return b

    if take(8) != EMB_MAGIC:
        raise EmbeddingIntegrityError(f"{path}: not a native embedding file")
    version, flags = struct.unpack("<BB", take(2))
    if version != EMB_VERSION:
        raise EmbeddingIntegrityError(f"{path}: unsupported version {version}")
    (meta_len,) = struct.unpack("<I", take(4))
    meta = json.loads(take(meta_len))
    v, n = struct.unpack("<II", take(8))
    words: list[str] = []
    counts = np.empty(v, dtype=np.int64)
    for i in range(v):
        (wlen,) = struct.unpack("<H", take(2))
        words.append(take(wlen).decode())
        (counts[i],) = struct.unpack("<q", take(8))
    if meta.get("dim") is not None and meta["dim"] != n:
        raise EmbeddingIntegrityError(
            f"{path}: header dim {n} does not match metadata dim {meta['dim']}"
        )
    syn0 = np.frombuffer(take(v * n * 4), dtype="<f4").reshape(v, n).copy()
    syn1 = None
    if flags & _FLAG_HAS_OUTPUT:
        syn1 = np.frombuffer(take(v * n * 4), dtype="<f4").reshape(v, n).copy()
    if buf.read(1):
        raise EmbeddingIntegrityError(f"{path}: trailing bytes after embedding data")
    vocab = Vocabulary(
        words=words,
        counts=counts,
        index={w: i for i, w in enumerate(words)},
        total_tokens=int(counts.sum()),
    )
    emb = Embedding(vocab=vocab, input_vectors=syn0, output_vectors=syn1, meta=meta)
    emb.validate()
    return emb


def export_reference(embedding: Embedding, path: str | Path) -> None:
    """Write the interoperable binary format (input vectors only)."""
    syn0 = np.ascontiguousarray(embedding.input_vectors, dtype="<f4")
    v, n = syn0.shape
    with open(path, "wb") as f:
        f.write(f"{v} {n}\n".encode())
        for i, w in enumerate(embedding.vocab.words):
            f.write(w.encode() + b" ")
            f.write(syn0[i].tobytes())
            f.write(b"\n")


def import_reference(path: str | Path) -> Embedding:
    """Read the interoperable binary format; counts and metadata are unknown."""
    with open(path, "rb") as f:
        header = f.readline()
        try:
            v, n = (int(x) for x in header.split())
        except ValueError as e:
            raise EmbeddingIntegrityError(f"{path}: bad header {header!r}") from e
        words: list[str] = []
        syn0 = np.empty((v, n), dtype=np.float32)
        for i in range(v):
            wb = bytearray()
            while True:
                ch = f.read(1)
                if not ch:
                    raise EmbeddingIntegrityError(f"{path}: truncated at word {i}")
                if ch == b" ":
                    break
                wb.extend(ch)
            vec = f.read(4 * n)
            if len(vec) != 4 * n:
                raise EmbeddingIntegrityError(f"{path}: truncated vector for word {i}")
            syn0[i] = np.frombuffer(vec, dtype="<f4")
            nl = f.read(1)
            if nl not in (b"\n", b""):
                raise EmbeddingIntegrityError(f"{path}: missing newline after word {i}")
            words.append(wb.decode().strip("\n"))
    vocab = Vocabulary(
        words=words,
        counts=np.ones(v, dtype=np.int64),
        index={w: i for i, w in enumerate(words)},
        total_tokens=v,
    )
    emb = Embedding(
        vocab=vocab,
        input_vectors=syn0,
        output_vectors=None,
        meta={"beta": None, "seed": None, "source": "reference-format", "counts_known": False},
    )
    emb.validate()
    return emb
