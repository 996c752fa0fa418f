"""Continuous-electorate tabulation of plurality and IRV on [0, 1].

A continuum of voters distributed as F assigns each candidate the F-mass
between the midpoints to its neighbors. IRV repeatedly eliminates the
candidate with the smallest share and recomputes shares from the survivors.
A discrete sampled-ballot tabulator is included as an independent oracle.

All operations are pure functions of immutable inputs and are thread-safe.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .dist import Uniform, VoterDistribution
from .errors import InvalidProfileError, TieError

__all__ = [
    "Rule",
    "TieRule",
    "Profile",
    "Round",
    "TabulationOutcome",
    "vote_shares",
    "plurality_winner",
    "irv_winner",
    "sample_ballots",
    "irv_discrete",
    "sample_sorted_positions",
    "shares_batch",
    "plurality_batch",
    "irv_batch",
]


class Rule(enum.Enum):
    PLURALITY = "plurality"
    IRV = "irv"


class TieRule(enum.Enum):
    """Deterministic tie policies; ties are measure-zero under continuous draws."""

    ELIMINATE_LEFTMOST = "eliminate-leftmost"
    ELIMINATE_RIGHTMOST = "eliminate-rightmost"
    ERROR = "error"


class Profile:
    """Strictly sorted candidate positions in [0, 1].

    Positions may be given in any order; the sort permutation is kept so that
    winner indices refer to the caller's original labeling.
    """

    def __init__(self, positions):
        pos = np.asarray(list(positions), dtype=float)
        if pos.ndim != 1 or pos.size < 1:
            raise InvalidProfileError("need at least one candidate position")
        if np.any(pos < 0.0) or np.any(pos > 1.0):
            raise InvalidProfileError("candidate positions must lie in [0, 1]")
        order = np.argsort(pos, kind="stable")
        srt = pos[order]
        if np.any(np.diff(srt) == 0.0):
            raise InvalidProfileError("duplicate candidate positions")
        self._sorted = srt
        self._order = order  # order[j] = original index of j-th sorted candidate
        self._sorted.setflags(write=False)
        self._order.setflags(write=False)

    @property
    def k(self) -> int:
        return self._sorted.size

    @property
    def sorted_positions(self):
        return self._sorted

    @property
    def sort_order(self):
        return self._order

    def position(self, original_index: int) -> float:
        j = int(np.nonzero(self._order == original_index)[0][0])
        return float(self._sorted[j])

    def __len__(self):
        return self.k

    def __repr__(self):
        return f"Profile({list(self._sorted)})"


@dataclass(frozen=True)
class Round:
    active: tuple  # original candidate indices, in left-right order
    shares: tuple  # vote shares, same order; sum to 1


@dataclass(frozen=True)
class TabulationOutcome:
    rounds: tuple
    elimination_order: tuple  # original indices, in elimination order
    winner_index: int  # original labeling
    winner_position: float
    tie_events: tuple = field(default_factory=tuple)  # (round_index, tied originals)

    def to_json(self) -> dict:
        return {
            "rounds": [
                {"active": list(r.active), "shares": list(r.shares)} for r in self.rounds
            ],
            "elimination_order": list(self.elimination_order),
            "winner_position": self.winner_position,
            "ties": [
                {"round": ri, "tied": list(tied)} for ri, tied in self.tie_events
            ],
        }


def _shares_sorted(srt: np.ndarray, d: VoterDistribution) -> np.ndarray:
    """Shares for already-sorted positions: F-mass between adjacent midpoints."""
    if srt.size == 1:
        return np.array([1.0])
    mids = 0.5 * (srt[:-1] + srt[1:])
    f = np.asarray(d.cdf(mids))
    cuts = np.concatenate(([0.0], f, [1.0]))
    return np.diff(cuts)


def vote_shares(p: Profile, d: VoterDistribution) -> np.ndarray:
    """Vote shares for the sorted candidates of `p` under voter distribution `d`."""
    return _shares_sorted(p.sorted_positions, d)


def _resolve_tie(tied_sorted_idx, tie_rule, round_index, originals):
    """Pick the sorted index to eliminate among exact-minimum ties."""
    if len(tied_sorted_idx) > 1 and tie_rule is TieRule.ERROR:
        raise TieError(round_index, [originals[j] for j in tied_sorted_idx])
    if tie_rule is TieRule.ELIMINATE_RIGHTMOST:
        return tied_sorted_idx[-1]
    return tied_sorted_idx[0]


def plurality_winner(p: Profile, d: VoterDistribution, tie_rule=TieRule.ELIMINATE_LEFTMOST):
    """Single-round winner: argmax of vote shares, ties resolved by `tie_rule`."""
    shares = vote_shares(p, d)
    originals = p.sort_order
    top = shares.max()
    tied = np.nonzero(shares == top)[0]
    tie_events = ()
    if tied.size > 1:
        if tie_rule is TieRule.ERROR:
            raise TieError(0, [int(originals[j]) for j in tied])
        tie_events = ((0, tuple(int(originals[j]) for j in tied)),)
    # Eliminating leftmost among ties leaves the rightmost tied candidate as winner.
    j = tied[-1] if tie_rule is not TieRule.ELIMINATE_RIGHTMOST else tied[0]
    return TabulationOutcome(
        rounds=(Round(tuple(int(i) for i in originals), tuple(shares)),),
        elimination_order=(),
        winner_index=int(originals[j]),
        winner_position=float(p.sorted_positions[j]),
        tie_events=tie_events,
    )


def irv_winner(p: Profile, d: VoterDistribution, tie_rule=TieRule.ELIMINATE_LEFTMOST):
    """Eliminate the smallest-share candidate until one remains; k-1 rounds."""
    srt = p.sorted_positions.copy()
    originals = list(int(i) for i in p.sort_order)
    rounds = []
    elim = []
    ties = []
    ri = 0
    while srt.size > 1:
        shares = _shares_sorted(srt, d)
        rounds.append(Round(tuple(originals), tuple(shares)))
        low = shares.min()
        tied = np.nonzero(shares == low)[0]
        if tied.size > 1:
            if tie_rule is TieRule.ERROR:
                raise TieError(ri, [originals[j] for j in tied])
            ties.append((ri, tuple(originals[j] for j in tied)))
        j = int(tied[-1] if tie_rule is TieRule.ELIMINATE_RIGHTMOST else tied[0])
        elim.append(originals[j])
        srt = np.delete(srt, j)
        del originals[j]
        ri += 1
    if not rounds:  # k == 1
        rounds.append(Round((originals[0],), (1.0,)))
    return TabulationOutcome(
        rounds=tuple(rounds),
        elimination_order=tuple(elim),
        winner_index=originals[0],
        winner_position=float(srt[0]),
        tie_events=tuple(ties),
    )


def sample_ballots(p: Profile, d: VoterDistribution, n_voters: int, rng) -> Counter:
    """Sample voters from `d` and return a multiset of proximity rankings.

    Each ballot is a tuple of original candidate indices sorted by increasing
    distance from the voter; equidistant pairs break toward the left candidate.
    Returned as a Counter keyed by ranking tuple. The ranking is constant
    between consecutive pairwise bisectors, so voters are bucketed by region
    rather than ranked individually.
    """
    if n_voters < 1:
        raise InvalidProfileError("n_voters must be >= 1")
    srt = p.sorted_positions
    originals = p.sort_order
    k = srt.size
    voters = np.atleast_1d(d.sample(rng, n_voters))
    if k == 1:
        return Counter({(int(originals[0]),): n_voters})
    # Bisectors of all candidate pairs partition [0, 1] into constant-ranking regions.
    bounds = np.unique((srt[:, None] + srt[None, :])[np.triu_indices(k, 1)] / 2.0)
    # A voter exactly on a bisector prefers the left candidate, i.e. belongs
    # with the region on the left.
    region = np.searchsorted(bounds, voters, side="left")
    counts = np.bincount(region, minlength=bounds.size + 1)
    edges = np.concatenate(([0.0], bounds, [1.0]))
    ballots = Counter()
    for r in np.nonzero(counts)[0]:
        rep = 0.5 * (edges[r] + edges[r + 1])
        ranking = np.argsort(np.abs(rep - srt), kind="stable")
        key = tuple(int(originals[j]) for j in ranking)
        ballots[key] += int(counts[r])
    return ballots


def irv_discrete(ballots, tie_rule=TieRule.ELIMINATE_LEFTMOST, positions=None) -> int:
    """Standard IRV on a ballot multiset; returns the winning candidate index.

    `ballots` is a Counter (or iterable of ranking tuples). Tie policies that
    refer to left/right use `positions` (mapping index -> position) when given,
    falling back to index order.
    """
    if not isinstance(ballots, Counter):
        ballots = Counter(ballots)
    if not ballots:
        raise InvalidProfileError("empty ballot multiset")
    active = set()
    for ranking in ballots:
        active.update(ranking)

    def place(i):
        return positions[i] if positions is not None else i

    ri = 0
    while len(active) > 1:
        counts = {i: 0 for i in active}
        for ranking, n in ballots.items():
            for i in ranking:
                if i in active:
                    counts[i] += n
                    break
        low = min(counts.values())
        tied = sorted((i for i in active if counts[i] == low), key=place)
        if len(tied) > 1 and tie_rule is TieRule.ERROR:
            raise TieError(ri, tied)
        loser = tied[-1] if tie_rule is TieRule.ELIMINATE_RIGHTMOST else tied[0]
        active.remove(loser)
        ri += 1
    return next(iter(active))


# ---------------------------------------------------------------------------
# Vectorized batch tabulation for Monte Carlo sweeps.
# Batch elimination always uses the ELIMINATE_LEFTMOST policy; exact-equality
# ties are reported via the returned flag so callers can filter them out.
# ---------------------------------------------------------------------------


def sample_sorted_positions(d: VoterDistribution, k: int, trials: int, rng) -> np.ndarray:
    """(trials, k) array of sorted candidate draws from `d`."""
    return np.sort(d.sample(rng, (trials, k)), axis=1)


def shares_batch(sorted_pos: np.ndarray, d: VoterDistribution) -> np.ndarray:
    """Row-wise vote shares for a (trials, k) array of sorted positions."""
    n, k = sorted_pos.shape
    if k == 1:
        return np.ones((n, 1))
    mids = 0.5 * (sorted_pos[:, :-1] + sorted_pos[:, 1:])
    f = np.asarray(d.cdf(mids.ravel())).reshape(n, k - 1)
    cuts = np.empty((n, k + 1))
    cuts[:, 0] = 0.0
    cuts[:, 1:-1] = f
    cuts[:, -1] = 1.0
    return np.diff(cuts, axis=1)


def plurality_batch(sorted_pos: np.ndarray, d: VoterDistribution):
    """Winner positions, winner columns, and tie flags for each row."""
    shares = shares_batch(sorted_pos, d)
    top = shares.max(axis=1)
    tie = (shares == top[:, None]).sum(axis=1) > 1
    # Rightmost among exact ties, matching the leftmost-elimination policy.
    j = shares.shape[1] - 1 - np.argmax(shares[:, ::-1], axis=1)
    rows = np.arange(sorted_pos.shape[0])
    return sorted_pos[rows, j], j, tie


def irv_batch(sorted_pos: np.ndarray, d: VoterDistribution):
    """IRV winner positions and tie flags for each row of sorted positions."""
    pos = np.array(sorted_pos, dtype=float)
    n, k = pos.shape
    tie = np.zeros(n, dtype=bool)
    rows = np.arange(n)
    for m in range(k, 1, -1):
        shares = shares_batch(pos, d)
        j = np.argmin(shares, axis=1)  # first occurrence = leftmost tie policy
        low = shares[rows, j]
        tie |= (shares == low[:, None]).sum(axis=1) > 1
        keep = np.arange(m)[None, :] != j[:, None]
        pos = pos[keep].reshape(n, m - 1)
    return pos[:, 0], tie
