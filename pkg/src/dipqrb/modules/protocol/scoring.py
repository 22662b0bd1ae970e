"""Round scoring."""

from __future__ import annotations

from dipqrb.contracts import Outcome, Score

_BASIS = (
    (Score.AGREE_0, Score.ERROR_0, Score.CLIENT_NOCLICK_0),
    (Score.AGREE_1, Score.ERROR_1, Score.CLIENT_NOCLICK_1),
)


def score_function(
    s: int,
    x: int,
    y: int,
    z: int,
    a: Outcome | int,
    b: Outcome | int,
    c: Outcome | int,
    t: int,
) -> Score:
    """Map one round to the test-register alphabet.

    Generation rounds score ⊥. Test rounds with a server no-click (A=∅, or
    B=∅ on the local route) score ``server_noclick``; conclusive local rounds
    score the CHSH predicate; routed rounds score agreement per basis when
    x=z and ``offbasis`` otherwise.
    """
    if t == 0:
        return Score.BOT

    a, b, c = Outcome(a), Outcome(b), Outcome(c)
    if a is Outcome.VOID:
        return Score.SERVER_NOCLICK

    if s == 0:
        if b is Outcome.VOID:
            return Score.SERVER_NOCLICK
        return Score.CHSH_WIN if (int(a) ^ int(b)) == x * y else Score.CHSH_LOSS

    if x != z:
        return Score.OFFBASIS
    agree, error, noclick = _BASIS[z]
    if c is Outcome.VOID:
        return noclick
    return agree if a == c else error
