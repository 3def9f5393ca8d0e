"""The retrieval scheme: query generation, server answers, and decoding.

One session retrieves the demand message while hiding both the demand index
and the side-information index set from every individual server. The client
builds one query vector per server; each vector selects at most one
sub-packet per message (entry 0 selects the degenerate zero sub-packet) and
each responding server returns the sum of the selected sub-packets.

Query assembly, in canonical draw order:

  1. a permutation assigning one demand sub-packet to each of the N-1
     non-baseline equations (subpacket_order),
  2. a side-information mask with uniform nonzero entries on S (side_vector),
  3. a weighted size pair (kept_size, interference_size),
  4. a kept subset of S of size kept_size; the baseline equation carries the
     mask restricted to that subset (base_vector),
  5. when kept_size > 0, a random ordering of the drop-one subsets of the
     kept set, one per dropout equation (dropout_vectors),
  6. an interference subset of the remaining messages plus a uniform nonzero
     mask on it (interference_vector),
  7. a bit choosing between uniform equations and dropout equations,
  8. a permutation assigning equations to servers (server_shuffle).

Every equation vector is the entrywise union of constituents with disjoint
supports, so vector addition is plain assignment. The decoder inverts the
server shuffle, subtracts the side-information sums it can compute locally,
and reassembles the demand message sub-packet by sub-packet.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

from .core import (
    DemandSideInfo,
    Field,
    Message,
    MessageStore,
    QueryVector,
    SchemeParams,
    SubPacket,
    get_subpacket,
    subpacket_add,
    subpacket_sub,
)
from .distributions import PijTable, p_theta_zero
from .randomness import RandomSource, RandomTape, _subsets

QUERY_MAGIC = "PIRQ v1"
_QUERY_HEADER = struct.Struct(">HHI")


@dataclass(frozen=True)
class SessionState:
    """Everything the client retains from query generation to decode time.

    kept_size and interference_size are the drawn size pair; kept_support
    (subset of S) and interference_support are the drawn index sets. The
    side_vector carries the full side-information mask, base_vector its
    restriction to kept_support, and dropout_vectors (one per dropout
    equation, present when kept_size > 0) each drop one further element.
    dropout is the drawn bit: 1 means the first kept_size equations used
    the dropout vectors instead of the full mask.
    """

    ws: DemandSideInfo
    params: SchemeParams
    subpacket_order: tuple
    server_shuffle: tuple
    kept_size: int
    interference_size: int
    dropout: int
    side_vector: QueryVector
    base_vector: QueryVector
    dropout_vectors: tuple
    interference_vector: QueryVector
    kept_support: tuple
    interference_support: tuple


@dataclass(frozen=True)
class Answer:
    """One server's reply: a sub-packet sum, or Empty for an all-zero query."""

    payload: Optional[SubPacket]

    @property
    def empty(self) -> bool:
        return self.payload is None

    @classmethod
    def none(cls) -> "Answer":
        return cls(None)


@dataclass(frozen=True)
class SessionResult:
    """Outcome of one full client-servers round trip."""

    recovered: Message
    downloaded_symbols: int
    tape: RandomTape
    queries: tuple
    answers: tuple
    state: SessionState


def path_denominator(params: SchemeParams) -> int:
    """Common denominator covering every draw path of one session.

    The product of the branch-count bound of each draw site in canonical
    order, so the enumerator's stepwise integer divisions are always exact:
    permutation and shuffle factorials, per-entry mask choices, the pair
    table's denominator, subset and ordering counts (covered by factorials),
    and every possible dropout-bit denominator (covered by the lcm).
    """
    N, K, M = params.N, params.K, params.M
    return (
        math.factorial(N - 1)
        * (N - 1) ** M
        * N ** (K - M - 1)
        * math.factorial(M)
        * math.lcm(*range(1, M + 2))
        * math.factorial(K - M - 1)
        * (N - 1) ** (K - M - 1)
        * math.factorial(N)
    )


@lru_cache(maxsize=None)
def _session_context(ws: DemandSideInfo, params: SchemeParams) -> tuple:
    ws.check(params)
    side = ws.S
    interference = ws.interference(params)
    table = PijTable.compute(params)
    theta_ps = tuple(p_theta_zero(i, params) for i in range(params.M + 1))
    return side, interference, ws.W - 1, table, theta_ps


def _raw_session(ws: DemandSideInfo, params: SchemeParams, rng: RandomSource) -> tuple:
    """Draw one session and assemble the N query vectors.

    Returns (queries, draws) where draws is the flat tuple of drawn values
    in canonical order; generate_queries packages draws into a SessionState.
    This split keeps the exhaustive audits, which only consume the queries,
    off the state-assembly cost.
    """
    return _assemble(_session_context(ws, params), params, rng)


def _assemble(ctx: tuple, params: SchemeParams, rng: RandomSource) -> tuple:
    side, interference, w, table, theta_ps = ctx
    N = params.N
    K = params.K
    high = N - 1

    perm0 = rng.draw_permutation(high)
    side_vals = rng.draw_nonzero_vector(side, high)
    kept_n, mix_n = rng.draw_weighted_pair(table)
    kept = rng.draw_subset(side, kept_n)
    if kept_n:
        drop_sets = rng.draw_ordering(_subsets(kept, kept_n - 1))
    else:
        drop_sets = ()
    mix = rng.draw_subset(interference, mix_n)
    if mix_n:
        mix_vals = rng.draw_nonzero_vector(mix, high)
    else:
        mix_vals = ()
    theta = rng.draw_bernoulli(theta_ps[kept_n])
    shuffle = rng.draw_permutation(N)

    base = [0] * K
    for idx, val in zip(mix, mix_vals):
        base[idx - 1] = val
    u1 = base.copy()
    for idx, val in zip(side, side_vals):
        base[idx - 1] = val
        if idx in kept:
            u1[idx - 1] = val

    u = [u1] + [None] * (N - 1)
    if theta and kept_n:
        for m in range(1, kept_n + 1):
            eq = u1.copy()
            eq[w] = perm0[m - 1] + 1
            drop_set = drop_sets[m - 1]
            for idx in kept:
                if idx not in drop_set:
                    eq[idx - 1] = 0
                    break
            u[m] = eq
        lo = kept_n + 1
    else:
        lo = 1
    for m in range(lo, N):
        eq = base.copy()
        eq[w] = perm0[m - 1] + 1
        u[m] = eq

    queries = tuple(tuple(u[shuffle[n]]) for n in range(N))
    draws = (perm0, side_vals, kept_n, mix_n, kept, drop_sets, mix, mix_vals, theta, shuffle)
    return queries, draws


def generate_queries(
    ws: DemandSideInfo, params: SchemeParams, rng: RandomSource
) -> tuple:
    """Generate the N per-server query vectors and the decoding state."""
    queries, draws = _raw_session(ws, params, rng)
    perm0, side_vals, kept_n, mix_n, kept, drop_sets, mix, mix_vals, theta, shuffle = draws
    K = params.K

    side_vector = [0] * K
    for idx, val in zip(ws.S, side_vals):
        side_vector[idx - 1] = val
    base_vector = [0] * K
    for idx in kept:
        base_vector[idx - 1] = side_vector[idx - 1]
    dropout_vectors = []
    for drop_set in drop_sets:
        vec = [0] * K
        for idx in drop_set:
            vec[idx - 1] = side_vector[idx - 1]
        dropout_vectors.append(tuple(vec))
    interference_vector = [0] * K
    for idx, val in zip(mix, mix_vals):
        interference_vector[idx - 1] = val

    state = SessionState(
        ws=ws,
        params=params,
        subpacket_order=tuple(p + 1 for p in perm0),
        server_shuffle=shuffle,
        kept_size=kept_n,
        interference_size=mix_n,
        dropout=theta,
        side_vector=tuple(side_vector),
        base_vector=tuple(base_vector),
        dropout_vectors=tuple(dropout_vectors),
        interference_vector=tuple(interference_vector),
        kept_support=kept,
        interference_support=mix,
    )
    return queries, state


def answer_query(v: QueryVector, store: MessageStore) -> Answer:
    """One server's reply to one query vector: the selected sub-packet sum."""
    params = store.params
    if len(v) != params.K:
        raise ValueError("query length %d does not match K=%d" % (len(v), params.K))
    acc = None
    field = params.field()
    for i, sel in enumerate(v):
        if not 0 <= sel <= params.N - 1:
            raise ValueError("query entry %d out of range [0:%d]" % (sel, params.N - 1))
        if sel:
            sp = get_subpacket(store[i + 1], sel, params)
            acc = sp if acc is None else subpacket_add(acc, sp, field)
    if acc is None:
        return Answer.none()
    return Answer(acc)


def _known_sum(
    vec: QueryVector,
    side_info: Mapping[int, Message],
    params: SchemeParams,
    field: Field,
) -> SubPacket:
    acc = (0,) * params.subpacket_len
    for idx in range(params.K):
        sel = vec[idx]
        if sel:
            acc = subpacket_add(acc, get_subpacket(side_info[idx + 1], sel, params), field)
    return acc


def decode(
    answers: tuple, state: SessionState, side_info: Mapping[int, Message]
) -> Message:
    """Recover the demand message from positionally aligned server answers.

    side_info must map each side-information index in state.ws.S to the
    corresponding message. The decoder inverts the server shuffle, then for
    each non-baseline equation subtracts the baseline answer and the
    locally computable side-information sum for that equation, leaving one
    demand sub-packet, which is placed at its assigned sub-packet slot.
    """
    params = state.params
    N = params.N
    if len(answers) != N:
        raise ValueError("expected %d answers, got %d" % (N, len(answers)))
    missing = [idx for idx in state.ws.S if idx not in side_info]
    if missing:
        raise ValueError("side_info is missing message(s) %s" % missing)
    field = params.field()
    ell = params.subpacket_len
    zero = (0,) * ell

    inv_shuffle = [0] * N
    for server, eq in enumerate(state.server_shuffle):
        inv_shuffle[eq] = server
    z = [
        zero if answers[inv_shuffle[m]].empty else answers[inv_shuffle[m]].payload
        for m in range(N)
    ]

    base_sum = _known_sum(state.base_vector, side_info, params, field)
    full_sum = _known_sum(state.side_vector, side_info, params, field)
    slots = [None] * N
    for m in range(1, N):
        if state.dropout and m <= state.kept_size:
            known = _known_sum(state.dropout_vectors[m - 1], side_info, params, field)
        else:
            known = full_sum
        sp = subpacket_sub(z[m], z[0], field)
        sp = subpacket_sub(sp, known, field)
        sp = subpacket_add(sp, base_sum, field)
        slots[state.subpacket_order[m - 1]] = sp

    symbols = []
    for j in range(1, N):
        symbols.extend(slots[j])
    return Message(state.ws.W, tuple(symbols))


def run_session(
    ws: DemandSideInfo,
    params: SchemeParams,
    store: MessageStore,
    rng: RandomSource,
) -> SessionResult:
    """One full round trip: queries out, answers back, demand decoded."""
    if store.params != params:
        raise ValueError("store parameters %s do not match %s" % (store.params, params))
    rng.reset_tape()
    queries, state = generate_queries(ws, params, rng)
    answers = tuple(answer_query(v, store) for v in queries)
    side_info = {idx: store[idx] for idx in ws.S}
    recovered = decode(answers, state, side_info)
    downloaded = sum(1 for a in answers if not a.empty) * params.subpacket_len
    return SessionResult(recovered, downloaded, rng.tape(), queries, answers, state)


def encode_query(v: QueryVector, params: SchemeParams) -> bytes:
    """Byte encoding of one query vector: magic, (N, K, q), one byte per entry."""
    if params.N > 256:
        raise ValueError("query wire format supports N <= 256, got N=%d" % params.N)
    if len(v) != params.K:
        raise ValueError("query length %d does not match K=%d" % (len(v), params.K))
    for entry in v:
        if not 0 <= entry <= params.N - 1:
            raise ValueError("query entry %d out of range [0:%d]" % (entry, params.N - 1))
    header = QUERY_MAGIC.encode("ascii") + b"\n"
    header += _QUERY_HEADER.pack(params.N, params.K, params.q)
    return header + bytes(v)


def decode_query(data: bytes) -> tuple:
    """Inverse of encode_query: returns (vector, (N, K, q))."""
    magic = QUERY_MAGIC.encode("ascii") + b"\n"
    if not data.startswith(magic):
        raise ValueError("bad query magic; expected %r" % QUERY_MAGIC)
    off = len(magic)
    if len(data) < off + _QUERY_HEADER.size:
        raise ValueError("truncated query header")
    n, k, q = _QUERY_HEADER.unpack_from(data, off)
    body = data[off + _QUERY_HEADER.size :]
    if len(body) != k:
        raise ValueError("query body holds %d entries, expected %d" % (len(body), k))
    v = tuple(body)
    for entry in v:
        if entry > n - 1:
            raise ValueError("query entry %d out of range [0:%d]" % (entry, n - 1))
    return v, (n, k, q)


def _symbol_width(q: int) -> int:
    if q <= 256:
        return 1
    if q <= 65536:
        return 2
    raise ValueError("answer wire format supports q <= 65536, got q=%d" % q)


def encode_answer(answer: Answer, params: SchemeParams) -> bytes:
    """Byte encoding of one answer: flag byte, then the packed payload."""
    if answer.empty:
        return b"\x00"
    width = _symbol_width(params.q)
    out = bytearray(b"\x01")
    for sym in answer.payload:
        out += sym.to_bytes(width, "big")
    return bytes(out)


def decode_answer(data: bytes, params: SchemeParams) -> Answer:
    """Inverse of encode_answer for the given parameters."""
    if not data:
        raise ValueError("empty answer encoding")
    flag = data[0]
    if flag == 0:
        if len(data) != 1:
            raise ValueError("empty answer carries %d trailing bytes" % (len(data) - 1))
        return Answer.none()
    if flag != 1:
        raise ValueError("bad answer flag byte %d" % flag)
    width = _symbol_width(params.q)
    body = data[1:]
    ell = params.subpacket_len
    if len(body) != ell * width:
        raise ValueError(
            "answer payload is %d bytes, expected %d" % (len(body), ell * width)
        )
    symbols = tuple(
        int.from_bytes(body[i * width : (i + 1) * width], "big") for i in range(ell)
    )
    for sym in symbols:
        if sym >= params.q:
            raise ValueError("answer symbol %d out of range [0:%d)" % (sym, params.q))
    return Answer(symbols)
