"""The ordered ring Z[t] with t positive and infinite.

An element is an integer polynomial in ``t``; ``p > q`` iff the leading
coefficient of ``p - q`` is positive, which puts ``t`` above every integer.
"""
from __future__ import annotations

from functools import total_ordering
from typing import Iterable


@total_ordering
class ZtElement:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)  # constant term first
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_int(cls, n: int) -> ZtElement:
        return cls((n,))

    @classmethod
    def t(cls) -> ZtElement:
        return cls((0, 1))

    @staticmethod
    def _lift(other) -> ZtElement:
        return ZtElement.from_int(other) if isinstance(other, int) else other

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def sign(self) -> int:
        if not self.coeffs:
            return 0
        return 1 if self.coeffs[-1] > 0 else -1

    def is_infinite(self) -> bool:
        return len(self.coeffs) > 1

    def __add__(self, other) -> ZtElement:
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return ZtElement((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> ZtElement:
        return ZtElement(-c for c in self.coeffs)

    def __sub__(self, other) -> ZtElement:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> ZtElement:
        return self._lift(other) - self

    def __mul__(self, other) -> ZtElement:
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZtElement()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return ZtElement(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> ZtElement:
        if n < 0:
            raise ValueError("negative exponent")
        result, base = ZtElement.from_int(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = ZtElement.from_int(other)
        if not isinstance(other, ZtElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __lt__(self, other) -> bool:
        return (self._lift(other) - self).sign() > 0

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ZtElement({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(parts)
