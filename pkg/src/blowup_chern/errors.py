"""Exception hierarchy.

Every error carries a machine-readable ``code`` and the process ``exit_code``
the command line front end maps it to.
"""

from __future__ import annotations


class BlowupChernError(Exception):
    code = "ERROR"
    exit_code = 1


class ParseError(BlowupChernError, ValueError):
    """Malformed polynomial text."""

    code = "PARSE_ERROR"
    exit_code = 2

    def __init__(self, text: str, position: int, expected: tuple[str, ...]):
        self.text = text
        self.position = position
        self.expected = tuple(expected)
        got = repr(text[position]) if position < len(text) else "end of input"
        super().__init__(
            f"at position {position}: expected one of {', '.join(self.expected)}; got {got}"
        )


class WindowViolation(BlowupChernError, ValueError):
    """A monomial of ``p`` lies outside the normal-form support window."""

    code = "WINDOW_VIOLATION"
    exit_code = 2

    def __init__(self, j: int, monomial: tuple[int, int]):
        self.j = j
        self.monomial = monomial
        k, i = monomial
        super().__init__(
            f"monomial z^{k} u^{i} is outside the support window for j={j} "
            f"(need 1 <= i <= {2 * j - 2} and i-{j}+1 <= k <= {j - 1})"
        )


class CertificationFailure(BlowupChernError, RuntimeError):
    """A truncated computation changed when its truncation was enlarged."""

    code = "CERTIFICATION_FAILURE"
    exit_code = 3


class NonStabilization(CertificationFailure):
    code = "NON_STABILIZATION"


class NonFiniteLength(CertificationFailure):
    code = "NON_FINITE_LENGTH"


class RankDeficient(CertificationFailure):
    code = "RANK_DEFICIENT"
