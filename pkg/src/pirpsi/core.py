"""Shared scheme primitives: parameters, field symbols, messages, queries.

Everything the protocol, the auditor, and the CLI agree on lives here:
validated parameter tuples, additive arithmetic over GF(q) symbols,
message/sub-packet slicing, and the on-disk message store format.

Only the additive group of GF(q) is used anywhere in the scheme (answers
are sums of sub-packets, decoding is differencing), so symbols for
q = p^e are modeled as e-vectors of residues mod p packed into a single
integer base p. Full extension-field multiplication is out of scope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

STORE_MAGIC = "PIRDB v1"

# Type aliases. A query vector has one entry per message, each in [0:N-1],
# naming the sub-packet of that message to include (0 = none). A sub-packet
# is a tuple of packed field symbols.
QueryVector = tuple

SubPacket = tuple


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e and p prime, or raise ValueError."""
    if q < 2:
        raise ValueError("q must be a prime power >= 2, got %d" % q)
    p = None
    n = q
    for cand in range(2, q + 1):
        if cand * cand > q:
            break
        if n % cand == 0:
            p = cand
            break
    if p is None:
        return q, 1  # q itself is prime
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise ValueError("q must be a prime power >= 2, got %d" % q)
    return p, e


class Field:
    """Additive arithmetic for GF(q) symbols, q = p^e.

    A symbol is an integer in [0, q) packing the residue vector
    (r_0, ..., r_{e-1}) as sum(r_t * p^t). Addition and negation act
    component-wise mod p. For prime q this reduces to plain mod-p math.
    """

    __slots__ = ("q", "p", "e", "add", "neg")

    def __init__(self, q: int):
        p, e = factor_prime_power(q)
        self.q = q
        self.p = p
        self.e = e
        if e == 1:
            self.add = lambda a, b, _p=p: (a + b) % _p
            self.neg = lambda a, _p=p: (-a) % _p
        else:
            add_table = tuple(
                tuple(self._vec_add(a, b) for b in range(q)) for a in range(q)
            )
            neg_table = tuple(self._vec_neg(a) for a in range(q))
            self.add = lambda a, b, _t=add_table: _t[a][b]
            self.neg = lambda a, _t=neg_table: _t[a]

    def _vec_add(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        out = 0
        mult = 1
        for _ in range(e):
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def _vec_neg(self, a: int) -> int:
        p, e = self.p, self.e
        out = 0
        mult = 1
        for _ in range(e):
            out += ((-(a % p)) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def to_residues(self, a: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.e):
            out.append(a % p)
            a //= p
        return tuple(out)

    def from_residues(self, residues: Sequence[int]) -> int:
        if len(residues) != self.e:
            raise ValueError("expected %d residues, got %d" % (self.e, len(residues)))
        out = 0
        mult = 1
        for r in residues:
            if not 0 <= r < self.p:
                raise ValueError("residue %d out of range [0, %d)" % (r, self.p))
            out += r * mult
            mult *= self.p
        return out

    def __repr__(self) -> str:
        return "Field(q=%d)" % self.q


@lru_cache(maxsize=None)
def field_for(q: int) -> Field:
    return Field(q)


@dataclass(frozen=True)
class SchemeParams:
    """The scheme's parameter tuple (N, K, M, L, q).

    N servers each store identical copies of K messages of L symbols over
    GF(q); the user holds M of the messages as side information. Validity
    requires N >= M + 1, 1 <= M <= K - 1, (N - 1) | L, and q a prime power.
    """

    N: int
    K: int
    M: int
    L: int
    q: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N >= 2 violated: N=%d" % self.N)
        if self.K < 2:
            raise ValueError("K >= 2 violated: K=%d" % self.K)
        if not 1 <= self.M <= self.K - 1:
            raise ValueError("1 <= M <= K-1 violated: M=%d, K=%d" % (self.M, self.K))
        if self.N < self.M + 1:
            raise ValueError("N >= M+1 violated: N=%d, M=%d" % (self.N, self.M))
        if self.L < 1 or self.L % (self.N - 1) != 0:
            raise ValueError("(N-1) | L violated: N=%d, L=%d" % (self.N, self.L))
        factor_prime_power(self.q)  # raises if q is not a prime power

    @property
    def subpacket_len(self) -> int:
        return self.L // (self.N - 1)

    @property
    def num_subpackets(self) -> int:
        return self.N - 1

    def field(self) -> Field:
        return field_for(self.q)

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.N, self.K, self.M, self.L, self.q)


def validate_params(N: int, K: int, M: int, L: int, q: int) -> SchemeParams:
    """Validate the five raw integers and return a SchemeParams.

    Raises ValueError naming the violated constraint.
    """
    return SchemeParams(N, K, M, L, q)


@dataclass(frozen=True)
class DemandSideInfo:
    """A demand index W in [1:K] together with the side information set S.

    S is stored as a sorted tuple of M distinct message indices, none of
    which equals W.
    """

    W: int
    S: tuple

    def __post_init__(self):
        s = tuple(sorted(self.S))
        object.__setattr__(self, "S", s)
        if len(set(s)) != len(s):
            raise ValueError("S has repeated indices: %s" % (s,))
        if self.W in s:
            raise ValueError("W must not be in S: W=%d, S=%s" % (self.W, s))

    def check(self, params: SchemeParams) -> None:
        if not 1 <= self.W <= params.K:
            raise ValueError("W out of range [1:%d]: W=%d" % (params.K, self.W))
        if len(self.S) != params.M:
            raise ValueError("|S| must equal M=%d, got %d" % (params.M, len(self.S)))
        for i in self.S:
            if not 1 <= i <= params.K:
                raise ValueError("side information index %d out of range [1:%d]" % (i, params.K))

    def interference(self, params: SchemeParams) -> tuple:
        """The K - M - 1 message indices that are neither demand nor side info."""
        excluded = set(self.S) | {self.W}
        return tuple(i for i in range(1, params.K + 1) if i not in excluded)


@dataclass(frozen=True)
class Message:
    """One stored message: an index in [1:K] and a tuple of L packed symbols."""

    index: int
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))


def get_subpacket(message: Message, j: int, params: SchemeParams) -> SubPacket:
    """Sub-packet j of a message; j = 0 is the all-zero degenerate sub-packet."""
    if not 0 <= j <= params.N - 1:
        raise ValueError("sub-packet index %d out of range [0:%d]" % (j, params.N - 1))
    plen = params.subpacket_len
    if j == 0:
        return (0,) * plen
    return message.symbols[(j - 1) * plen : j * plen]


def subpacket_add(a: SubPacket, b: SubPacket, field: Field) -> SubPacket:
    """Component-wise sum of two sub-packets in the additive group of GF(q)."""
    if len(a) != len(b):
        raise ValueError("sub-packet length mismatch: %d vs %d" % (len(a), len(b)))
    add = field.add
    return tuple(add(x, y) for x, y in zip(a, b))


def subpacket_sub(a: SubPacket, b: SubPacket, field: Field) -> SubPacket:
    if len(a) != len(b):
        raise ValueError("sub-packet length mismatch: %d vs %d" % (len(a), len(b)))
    add, neg = field.add, field.neg
    return tuple(add(x, neg(y)) for x, y in zip(a, b))


def support(v: QueryVector) -> tuple:
    """1-based indices of the nonzero entries of a query vector."""
    return tuple(i + 1 for i, x in enumerate(v) if x)


def support_size(v: QueryVector) -> int:
    return sum(1 for x in v if x)


class MessageStore:
    """K messages shared read-only by all simulated servers.

    The store is immutable after construction; every server reads the same
    object, mirroring replicated storage.
    """

    def __init__(self, params: SchemeParams, messages: Iterable[Message]):
        self.params = params
        msgs = tuple(messages)
        if len(msgs) != params.K:
            raise ValueError("store must hold exactly K=%d messages, got %d" % (params.K, len(msgs)))
        for want, msg in enumerate(msgs, start=1):
            if msg.index != want:
                raise ValueError("message %d out of order (index %d)" % (want, msg.index))
            if len(msg.symbols) != params.L:
                raise ValueError("message %d has %d symbols, expected L=%d" % (want, len(msg.symbols), params.L))
            for sym in msg.symbols:
                if not 0 <= sym < params.q:
                    raise ValueError("message %d holds symbol %d outside [0, %d)" % (want, sym, params.q))
        self.messages = msgs

    def __getitem__(self, index: int) -> Message:
        if not 1 <= index <= self.params.K:
            raise KeyError(index)
        return self.messages[index - 1]

    @classmethod
    def random(cls, params: SchemeParams, seed: int) -> "MessageStore":
        rng = random.Random(seed)
        msgs = [
            Message(i, tuple(rng.randrange(params.q) for _ in range(params.L)))
            for i in range(1, params.K + 1)
        ]
        return cls(params, msgs)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    def to_bytes(self) -> bytes:
        p = self.params
        lines = ["%s %d %d %d %d %d" % (STORE_MAGIC, p.N, p.K, p.M, p.L, p.q)]
        for msg in self.messages:
            lines.append(" ".join(str(s) for s in msg.symbols))
        return ("\n".join(lines) + "\n").encode("ascii")

    @classmethod
    def load(cls, path) -> "MessageStore":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    @classmethod
    def from_bytes(cls, data: bytes) -> "MessageStore":
        lines = data.decode("ascii").splitlines()
        if not lines:
            raise ValueError("empty store file")
        head = lines[0].split()
        if len(head) != 7 or " ".join(head[:2]) != STORE_MAGIC:
            raise ValueError("bad store header: %r" % lines[0])
        n, k, m, l, q = (int(x) for x in head[2:])
        params = SchemeParams(n, k, m, l, q)
        if len(lines) != 1 + k:
            raise ValueError("expected %d message lines, got %d" % (k, len(lines) - 1))
        msgs = []
        for i, line in enumerate(lines[1:], start=1):
            msgs.append(Message(i, tuple(int(x) for x in line.split())))
        return cls(params, msgs)
