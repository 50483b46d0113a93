"""Per-quality modulation vector banks.

A bank holds one channel-gain vector per integer quality parameter; linear
interpolation between the two bracketing vectors yields a vector for any
real-valued quality parameter, which downstream code multiplies
channel-wise into codec latents. Four banks (encoder, decoder,
reconstruction, feature extractor) travel together in a binary container.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from .qpa import QualityMap

__all__ = [
    "VectorBank",
    "VectorBankSet",
    "BankFormatError",
    "BadMagicError",
    "TruncatedFileError",
    "BankShapeError",
    "NonFiniteError",
    "BANK_ORDER",
    "interpolate",
    "row_modulation_matrix",
    "save_bank_set",
    "load_bank_set",
]

_MAGIC = b"VBANKSET"
_VERSION = 1

# Fixed record order inside the container.
BANK_ORDER = ("encoder", "decoder", "reconstruction", "feature")


class BankFormatError(ValueError):
    """Malformed bank container."""


class BadMagicError(BankFormatError):
    """File does not start with the container magic."""


class TruncatedFileError(BankFormatError):
    """File ends before the declared payload is complete."""


class BankShapeError(BankFormatError):
    """Inconsistent or out-of-range bank dimensions."""


class NonFiniteError(BankFormatError):
    """Bank payload contains NaN or infinite entries."""


@dataclass(frozen=True)
class VectorBank:
    """q_num x channels matrix of per-quality modulation vectors.

    Vectors are kept in the dtype they were supplied in (float32 when
    loaded from a container); interpolation always computes in float64.
    """

    vectors: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.vectors)
        if arr.dtype != np.float32:
            arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise BankShapeError(f"bank must be 2-D (q_num x channels), got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise BankShapeError(f"bank needs at least 2 quality steps, got {arr.shape[0]}")
        if arr.shape[1] < 1:
            raise BankShapeError("bank needs at least 1 channel")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("bank contains non-finite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "vectors", arr)

    @property
    def q_num(self):
        return self.vectors.shape[0]

    @property
    def channels(self):
        return self.vectors.shape[1]


@dataclass(frozen=True)
class VectorBankSet:
    """The four modulation banks of one model, sharing a quality-step count."""

    encoder: VectorBank
    decoder: VectorBank
    reconstruction: VectorBank
    feature: VectorBank

    def __post_init__(self):
        q_nums = {name: getattr(self, name).q_num for name in BANK_ORDER}
        if len(set(q_nums.values())) != 1:
            raise BankShapeError(f"banks disagree on q_num: {q_nums}")

    @property
    def q_num(self):
        return self.encoder.q_num


def interpolate(bank, q_tilde):
    """Modulation vector for a real-valued quality parameter.

    Linear blend of the two bracketing per-quality vectors; an integer
    q_tilde returns the stored vector itself (the blend formula degenerates
    to zero weight on both sides when floor and ceiling coincide). Result
    is float64 regardless of storage dtype.
    """
    if not 0 <= q_tilde <= bank.q_num - 1:
        raise ValueError(
            f"q_tilde {q_tilde} outside bank range [0, {bank.q_num - 1}]"
        )
    lo = math.floor(q_tilde)
    hi = math.ceil(q_tilde)
    if lo == hi:
        return bank.vectors[lo].astype(np.float64)
    w_lo = hi - q_tilde
    w_hi = q_tilde - lo
    return w_lo * bank.vectors[lo].astype(np.float64) + w_hi * bank.vectors[hi].astype(np.float64)


def row_modulation_matrix(bank, qmap):
    """rows x channels matrix with row r holding the vector for q_tilde(r).

    Consumers broadcast-multiply it channel-wise across the latent width.
    Accepts a QualityMap or any sequence of quality values; values must
    already lie inside the bank range (build maps with clamping on).
    """
    values = qmap.q_tilde if isinstance(qmap, QualityMap) else np.asarray(qmap, dtype=np.float64)
    out = np.empty((len(values), bank.channels), dtype=np.float64)
    for r, q in enumerate(values):
        try:
            out[r] = interpolate(bank, q)
        except ValueError as e:
            raise ValueError(f"row {r}: {e}") from e
    return out


def save_bank_set(bank_set, path):
    """Write a VectorBankSet to the binary container format.

    Layout: 8-byte magic, then little-endian u16 version, u16 q_num, and
    four records in fixed order (encoder, decoder, reconstruction,
    feature), each a u32 channel count followed by q_num * channels
    float32 values in quality-major order.
    """
    q_num = bank_set.q_num
    if q_num > 0xFFFF:
        raise BankShapeError(f"q_num {q_num} exceeds container limit 65535")
    chunks = [_MAGIC, struct.pack("<HH", _VERSION, q_num)]
    for name in BANK_ORDER:
        bank = getattr(bank_set, name)
        payload = np.ascontiguousarray(bank.vectors, dtype="<f4")
        if not np.all(np.isfinite(payload)):
            raise NonFiniteError(f"{name} bank overflows float32 container precision")
        chunks.append(struct.pack("<I", bank.channels))
        chunks.append(payload.tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(chunks))


def load_bank_set(path):
    """Read a bank container written by save_bank_set, validating throughout."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < len(_MAGIC):
        raise TruncatedFileError(f"file is only {len(data)} bytes, no room for magic")
    if data[: len(_MAGIC)] != _MAGIC:
        raise BadMagicError(f"bad magic {data[:len(_MAGIC)]!r}")
    off = len(_MAGIC)
    if len(data) < off + 4:
        raise TruncatedFileError("file ends inside the header")
    version, q_num = struct.unpack_from("<HH", data, off)
    off += 4
    if version != _VERSION:
        raise BankFormatError(f"unsupported container version {version}")
    if q_num < 2:
        raise BankShapeError(f"container declares q_num {q_num}, need >= 2")

    banks = {}
    for name in BANK_ORDER:
        if len(data) < off + 4:
            raise TruncatedFileError(f"file ends before the {name} bank header")
        (channels,) = struct.unpack_from("<I", data, off)
        off += 4
        if channels < 1:
            raise BankShapeError(f"{name} bank declares 0 channels")
        nbytes = q_num * channels * 4
        if len(data) < off + nbytes:
            raise TruncatedFileError(
                f"{name} bank payload truncated: need {nbytes} bytes, "
                f"have {len(data) - off}"
            )
        flat = np.frombuffer(data, dtype="<f4", count=q_num * channels, offset=off)
        off += nbytes
        if not np.all(np.isfinite(flat)):
            raise NonFiniteError(f"{name} bank contains non-finite entries")
        banks[name] = VectorBank(flat.reshape(q_num, channels).astype(np.float32))
    if off != len(data):
        raise BankFormatError(f"{len(data) - off} trailing bytes after the last bank")
    return VectorBankSet(**banks)
