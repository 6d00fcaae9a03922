"""Exact integer arithmetic: digit expansions, q-adic valuations, binomials.

Everything here is integer-only.  The ``s`` sequence and its prefix sums
give the counting argument behind Legendre's formula for the valuation of a
factorial; carry counting gives the valuation of a binomial coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SEQUENCE_BUDGET = 10**6


class BudgetExceeded(ValueError):
    """Raised when an enumeration would exceed its configured size limit."""


class NotPrimeError(ValueError):
    pass


@dataclass(frozen=True)
class BaseQDigits:
    """Little-endian base-``q`` digits of ``m``; zero has no digits."""

    m: int
    q: int
    digits: tuple[int, ...]

    @classmethod
    def of(cls, m: int, q: int) -> "BaseQDigits":
        return cls(m, q, tuple(digits(m, q)))

    @property
    def value(self) -> int:
        return sum(d * self.q**i for i, d in enumerate(self.digits))

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError(f"base must be >= 2, got {self.q}")
        if any(not 0 <= d < self.q for d in self.digits):
            raise ValueError(f"digit out of range for base {self.q}: {self.digits}")
        if self.digits and self.digits[-1] == 0:
            raise ValueError("trailing zero digit")
        if self.value != self.m:
            raise ValueError(f"digits {self.digits} do not encode {self.m}")


def _check_base(q: int) -> None:
    if q < 2:
        raise ValueError(f"base must be >= 2, got {q}")


def digits(m: int, q: int) -> list[int]:
    _check_base(q)
    if m < 0:
        raise ValueError(f"expected a nonnegative integer, got {m}")
    out = []
    while m:
        m, r = divmod(m, q)
        out.append(r)
    return out


def digit_sum(m: int, q: int) -> int:
    return sum(digits(m, q))


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    return all(q % d for d in range(3, math.isqrt(q) + 1, 2))


def prime_factors(m: int) -> list[int]:
    """Distinct prime factors of ``m >= 1``, ascending (trial division)."""
    if m < 1:
        raise ValueError(f"expected a positive integer, got {m}")
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _check_prime(q: int) -> None:
    if not is_prime(q):
        raise NotPrimeError(f"{q} is not prime")


def s_sequence(q: int, r: int, budget: int = SEQUENCE_BUDGET) -> list[int]:
    """The depth-``r`` sequence: ``q-1`` copies of depth ``r-1``, then one more
    copy with its last term incremented.  Depth 0 is ``[1]``."""
    _check_base(q)
    if r < 0:
        raise ValueError(f"depth must be >= 0, got {r}")
    if q**r > budget:
        raise BudgetExceeded(f"sequence length {q}^{r} exceeds budget {budget}")
    seq = [1]
    for _ in range(r):
        tail = seq[:-1] + [seq[-1] + 1]
        seq = seq * (q - 1) + tail
    return seq


def s_partial_sum(q: int, m: int) -> int:
    """Sum of the first ``m`` terms of the sequence, as ``sum(m // q**i, i >= 0)``."""
    _check_base(q)
    if m < 1:
        raise ValueError(f"index must be >= 1, got {m}")
    total = 0
    while m:
        total += m
        m //= q
    return total


def valuation(q: int, m: int) -> int:
    """Exponent of the prime ``q`` in ``m``."""
    _check_prime(q)
    if m < 1:
        raise ValueError(f"valuation needs a positive integer, got {m}")
    e = 0
    while m % q == 0:
        m //= q
        e += 1
    return e


def floor_sum(m: int, q: int) -> int:
    """``sum(m // q**j for j >= 1)``."""
    _check_base(q)
    if m < 0:
        raise ValueError(f"expected a nonnegative integer, got {m}")
    total = 0
    while m:
        m //= q
        total += m
    return total


def valuation_factorial(q: int, p: int) -> int:
    """Exponent of the prime ``q`` in ``p!`` (Legendre)."""
    _check_prime(q)
    if p < 0:
        raise ValueError(f"factorial of negative {p}")
    return floor_sum(p, q)


def carries_in_addition(a: int, b: int, q: int) -> int:
    """Number of carries produced when adding ``a`` and ``b`` in base ``q``."""
    _check_base(q)
    if a < 0 or b < 0:
        raise ValueError("operands must be nonnegative")
    carries = carry = 0
    while a or b or carry:
        a, da = divmod(a, q)
        b, db = divmod(b, q)
        carry = 1 if da + db + carry >= q else 0
        carries += carry
    return carries


def borrow_positions(n: int, p: int, q: int, max_position: int | None = None) -> list[int]:
    """Positions ``j >= 1`` where ``n mod q**j < p mod q**j``.

    These are exactly the digit positions that receive a borrow when
    ``p`` is subtracted from ``n`` in base ``q``.  ``max_position`` defaults
    to the number of base-``q`` digits of ``n``, which is exhaustive.
    """
    _check_base(q)
    if max_position is None:
        max_position = len(digits(n, q))
    return [j for j in range(1, max_position + 1) if n % q**j < p % q**j]


def floor_sum_by_digits(n: int, p: int, q: int, max_position: int | None = None) -> int:
    """``floor_sum(n - p, q)`` recovered from the digits of ``n`` and ``p``.

    Uses ``((n-p) - (digit_sum(n) - digit_sum(p))) / (q-1)`` minus the borrow
    count.  Limiting ``max_position`` to the digit length of ``p`` minus one
    reproduces a truncated borrow range that undercounts when a borrow
    propagates above the top digit of ``p`` (q=3, n=10, p=4 gives 3, not 2).
    """
    if not 0 <= p <= n:
        raise ValueError(f"need 0 <= p <= n, got p={p}, n={n}")
    head, rem = divmod((n - p) - (digit_sum(n, q) - digit_sum(p, q)), q - 1)
    if rem:
        raise ArithmeticError("digit-sum difference not divisible by q-1")
    return head - len(borrow_positions(n, p, q, max_position))


def binomial(n: int, p: int) -> int:
    if n < 0 or p < 0:
        raise ValueError(f"binomial needs nonnegative arguments, got ({n}, {p})")
    return math.comb(n, p)


def is_power_of_two(n: int) -> bool:
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    return n & (n - 1) == 0
