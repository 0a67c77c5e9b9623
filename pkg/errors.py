from typing import Optional


class PlanarSuccError(Exception):
    def __init__(self, message: str, diag: Optional[dict] = None):
        super().__init__(message)
        self.diag = dict(diag or {})


# ========= グラフ操作 =========

class UnknownVertex(PlanarSuccError, KeyError):
    def __init__(self, vertex, diag: Optional[dict] = None):
        super().__init__(f"unknown vertex {vertex}", {"vertex": vertex, **(diag or {})})
        self.vertex = vertex

    def __str__(self) -> str:
        return self.args[0]


class DeletedVertex(PlanarSuccError, KeyError):
    def __init__(self, vertex, diag: Optional[dict] = None):
        super().__init__(f"vertex {vertex} is deleted", {"vertex": vertex, **(diag or {})})
        self.vertex = vertex

    def __str__(self) -> str:
        return self.args[0]


class NotAnEdge(PlanarSuccError, ValueError):
    def __init__(self, u, v, diag: Optional[dict] = None):
        super().__init__(f"{{{u}, {v}}} is not an edge", {"edge": (u, v), **(diag or {})})
        self.edge = (u, v)


class SameVertex(PlanarSuccError, ValueError):
    def __init__(self, vertex, diag: Optional[dict] = None):
        super().__init__(f"cannot pair vertex {vertex} with itself", {"vertex": vertex, **(diag or {})})


class EdgeExists(PlanarSuccError, ValueError):
    def __init__(self, u, v, diag: Optional[dict] = None):
        super().__init__(f"edge {{{u}, {v}}} already exists", {"edge": (u, v), **(diag or {})})


# ========= 入力 =========

class ParseError(PlanarSuccError, ValueError):
    def __init__(self, line_no: int, reason: str, path: str = ""):
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {reason}", {"line_no": line_no, "reason": reason, "path": path})
        self.line_no = line_no


class ConfigError(PlanarSuccError, ValueError):
    pass


class NotConnected(PlanarSuccError, ValueError):
    pass


# ========= 簡潔データ構造 =========

class OutOfUniverse(PlanarSuccError, ValueError):
    pass


class IndexOutOfRange(PlanarSuccError, IndexError):
    pass


# ========= テーブル =========

class CapExceeded(PlanarSuccError, ValueError):
    pass


class TooLarge(PlanarSuccError, ValueError):
    pass


class NonplanarResult(PlanarSuccError, ValueError):
    pass


# ========= 動的構造 =========

class NotBoundary(PlanarSuccError, ValueError):
    pass


class NotManaged(PlanarSuccError, KeyError):
    def __str__(self) -> str:
        return self.args[0]


class HashingModeRequired(PlanarSuccError, RuntimeError):
    def __init__(self, operation: str):
        super().__init__(f"hashing mode required for {operation}", {"operation": operation})


class InvariantViolation(PlanarSuccError, AssertionError):
    pass
