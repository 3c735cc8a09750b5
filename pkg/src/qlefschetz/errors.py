"""Error types shared by all modules.

Every error carries a machine-readable ``code`` (e.g. ``"GRADING_VIOLATION"``)
so callers and the CLI can dispatch on it without string matching.
"""


class QLError(Exception):
    """Base error with a stable code."""

    def __init__(self, code: str, message: str = "", **detail):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {message}" if message else code)


class OracleGap(QLError):
    """A Gromov-Witten invariant was requested that no oracle can supply."""

    def __init__(self, message: str, **detail):
        super().__init__("ORACLE_GAP", message, **detail)


class ModeUnavailable(QLError):
    """A computation needs data that is declared out of scope."""

    def __init__(self, blocking: str, message: str = ""):
        self.blocking = blocking
        super().__init__("MODE_UNAVAILABLE", message or f"blocked by {blocking}", blocking=blocking)
